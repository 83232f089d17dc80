"""Integer points z with A z inside an axis-parallel box, for an injective
real matrix A (lattice basis followed into total space coordinates).

A few "narrow" rows (usually the internal coordinates) are solved for
directly, and the remaining coordinates are swept over their bounding range,
so the work is proportional to the number of sweep values rather than to the
volume of the full coordinate box.
"""
from concurrent.futures import ThreadPoolExecutor
from itertools import product

import numpy as np


def _pick_pivots(block):
    """Rows and columns of a well-conditioned square sub-block of `block`."""
    a = np.array(block, dtype=float)
    rows, cols = [], []
    work = a.copy()
    rank = np.linalg.matrix_rank(a)
    for _ in range(rank):
        mask = np.zeros_like(work, dtype=bool)
        mask[rows, :] = True
        mask[:, cols] = True
        cand = np.where(mask, 0.0, np.abs(work))
        i, j = np.unravel_index(np.argmax(cand), cand.shape)
        if cand[i, j] < 1e-12:
            break
        rows.append(int(i))
        cols.append(int(j))
        piv = work[i, j]
        work = work - np.outer(work[:, j], work[i, :]) / piv
    return rows, cols


def _range(pinv_row, lo, hi):
    low = np.where(pinv_row > 0, pinv_row * lo, pinv_row * hi).sum()
    high = np.where(pinv_row > 0, pinv_row * hi, pinv_row * lo).sum()
    return low, high


def lll_reduce(basis, delta=0.75):
    """LLL-reduce the columns of a float matrix; returns (reduced, unimodular U)."""
    b = np.array(basis, dtype=float)
    r = b.shape[1]
    u = np.eye(r, dtype=np.int64)

    def gso(b):
        q = np.zeros_like(b)
        mu = np.zeros((r, r))
        norms = np.zeros(r)
        for i in range(r):
            v = b[:, i].copy()
            for j in range(i):
                mu[i, j] = b[:, i] @ q[:, j] / norms[j] if norms[j] > 0 else 0.0
                v -= mu[i, j] * q[:, j]
            q[:, i] = v
            norms[i] = v @ v
        return mu, norms

    mu, norms = gso(b)
    i = 1
    guard = 0
    while i < r and guard < 10000:
        guard += 1
        for j in range(i - 1, -1, -1):
            c = int(round(mu[i, j]))
            if c:
                b[:, i] -= c * b[:, j]
                u[:, i] -= c * u[:, j]
                mu, norms = gso(b)
        if norms[i] >= (delta - mu[i, i - 1] ** 2) * norms[i - 1]:
            i += 1
        else:
            b[:, [i - 1, i]] = b[:, [i, i - 1]]
            u[:, [i - 1, i]] = u[:, [i, i - 1]]
            mu, norms = gso(b)
            i = max(i - 1, 1)
    return b, u


def _sweep_size(A, lo, hi, narrow_rows):
    pinv = np.linalg.pinv(A)
    sizes = []
    for j in range(A.shape[1]):
        a, c = _range(pinv[j], lo, hi)
        sizes.append(max(0.0, np.floor(c) - np.ceil(a) + 1))
    narrow = list(narrow_rows)
    _, cols = _pick_pivots(A[narrow, :]) if narrow else ([], [])
    free = [sizes[j] for j in range(A.shape[1]) if j not in cols]
    return float(np.prod(free)) if free else 1.0


def lattice_points_in_box(A, lo, hi, narrow_rows, tol=1e-7, workers=1, chunk=20000,
                          sweep_limit=2_000_000):
    """All integer z (as an int64 array, rows sorted) with lo - tol <= A z <= hi + tol.

    `A` is an m x r float matrix of full column rank.  `narrow_rows` names
    the rows whose box is small; they are solved for, the other coordinates
    are swept.  When the sweep would be long (a very thin box), the box is
    rescaled to a cube and the lattice basis LLL-reduced first.
    """
    A = np.asarray(A, dtype=float)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if _sweep_size(A, lo, hi, narrow_rows) > sweep_limit:
        return _reduced_points(A, lo, hi, tol, workers, chunk)
    return _swept_points(A, lo, hi, narrow_rows, tol, workers, chunk)


def _reduced_points(A, lo, hi, tol, workers, chunk):
    half = np.maximum(0.5 * (hi - lo), tol)
    mid = 0.5 * (hi + lo)
    scaled = A / half[:, None]
    red, u = lll_reduce(scaled)
    slack = tol / half
    w = _swept_points(red, mid / half - 1 - slack, mid / half + 1 + slack,
                      range(A.shape[0]), 0.0, workers, chunk)
    if len(w) == 0:
        return np.zeros((0, A.shape[1]), dtype=np.int64)
    z = w @ u.T
    y = z.astype(float) @ A.T
    ok = np.all((y >= lo - tol) & (y <= hi + tol), axis=1)
    z = z[ok]
    return z[np.lexsort(z.T[::-1])]


def _in_box(cand, A, lo, hi, tol):
    if len(cand) == 0:
        return np.zeros((0, A.shape[1]), dtype=np.int64)
    y = cand.astype(float) @ A.T
    return cand[np.all((y >= lo - tol) & (y <= hi + tol), axis=1)]


def _swept_points(A, lo, hi, narrow_rows, tol, workers, chunk, expand_limit=1_000_000):
    m, r = A.shape
    pinv = np.linalg.pinv(A)
    zlo = np.empty(r)
    zhi = np.empty(r)
    for j in range(r):
        a, b = _range(pinv[j], lo, hi)
        zlo[j] = np.ceil(a - tol)
        zhi[j] = np.floor(b + tol)
    if np.any(zlo > zhi):
        return np.zeros((0, r), dtype=np.int64)
    narrow = list(narrow_rows)
    sub_rows, solve_cols = _pick_pivots(A[narrow, :])
    solve_rows = [narrow[i] for i in sub_rows]
    free_cols = [j for j in range(r) if j not in solve_cols]
    if not solve_cols:
        free_cols = list(range(r))
    ranges = [np.arange(int(zlo[j]), int(zhi[j]) + 1, dtype=np.int64) for j in free_cols]
    if solve_cols:
        M = A[np.ix_(solve_rows, solve_cols)]
        Minv = np.linalg.inv(M)
        half = 0.5 * (hi[solve_rows] - lo[solve_rows]) + tol
        mid = 0.5 * (hi[solve_rows] + lo[solve_rows])
        spread = np.abs(Minv) @ half
        Afree = A[np.ix_(solve_rows, free_cols)]
    # the sweep set is the product of the free ranges; split along the first axis
    if free_cols:
        first = ranges[0]
        rest = int(np.prod([len(x) for x in ranges[1:]])) if len(ranges) > 1 else 1
        step = max(1, chunk // max(1, rest))
        pieces = [first[i:i + step] for i in range(0, len(first), step)]
    else:
        pieces = [None]

    def run(first_part):
        if free_cols:
            grids = np.meshgrid(first_part, *ranges[1:], indexing="ij")
            zf = np.stack([g.ravel() for g in grids], axis=1)
        else:
            zf = np.zeros((1, 0), dtype=np.int64)
        if not solve_cols:
            cand = zf
        else:
            centre = (mid[None, :] - zf.astype(float) @ Afree.T) @ Minv.T
            low = np.ceil(centre - spread - tol).astype(np.int64)
            upp = np.floor(centre + spread + tol).astype(np.int64)
            width = upp - low + 1
            keep = np.all(width > 0, axis=1)
            zf, low, upp = zf[keep], low[keep], upp[keep]
            if len(zf) == 0:
                return np.zeros((0, r), dtype=np.int64)
            wmax = (upp - low + 1).max(axis=0)
            offs = np.array(list(product(*[range(int(w)) for w in wmax])), dtype=np.int64)
            # expand in batches so the candidate array stays bounded
            batch = max(1, expand_limit // len(offs))
            found = []
            for start in range(0, len(zf), batch):
                sl = slice(start, start + batch)
                zs = low[sl, None, :] + offs[None, :, :]
                ok = np.all(zs <= upp[sl, None, :], axis=2)
                idx, sub = np.nonzero(ok)
                cand = np.zeros((len(idx), r), dtype=np.int64)
                cand[:, free_cols] = zf[sl][idx]
                cand[:, solve_cols] = zs[idx, sub]
                found.append(_in_box(cand, A, lo, hi, tol))
            return np.concatenate(found, axis=0) if found else np.zeros((0, r), dtype=np.int64)
        return _in_box(cand, A, lo, hi, tol)

    if workers > 1 and len(pieces) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(run, pieces))
    else:
        parts = [run(p) for p in pieces]
    parts = [p for p in parts if len(p)]
    if not parts:
        return np.zeros((0, r), dtype=np.int64)
    out = np.concatenate(parts, axis=0)
    order = np.lexsort(out.T[::-1])
    return out[order]
