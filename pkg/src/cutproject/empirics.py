"""Brute-force ground truth from generated patterns: patch censuses,
repetitivity, cut-region counts and the PW estimator."""
from fractions import Fraction
from math import lcm

import numpy as np

from .algebra import compare, dot, rational_restriction
from .enumeration import lattice_points_in_box
from .geometry import Hyperplane, UnsupportedDimension, arrangement_census, supporting_hyperplanes
from .scheme import generate_pattern


class ParameterError(ValueError):
    pass


# ---------------------------------------------------------------- patches

class PatchCensus:
    def __init__(self, r, L, pattern, classes, centers):
        self.r = r
        self.L = L
        self.pattern = pattern
        self.classes = classes  # list of lists of point indices (centers), first-occurrence order
        self.centers = centers

    @property
    def p_hat(self):
        return len(self.classes)

    def counts(self):
        return [len(c) for c in self.classes]

    def class_offsets(self, i):
        """Exact physical offsets and labels of the representative patch of class i."""
        pat = self.pattern
        c = self.classes[i][0]
        members = _patch_members(pat, c, self.r)
        out = []
        for j in members:
            diff = [int(a - b) for a, b in zip(pat.coords[j], pat.coords[c])]
            out.append((tuple(pat.scheme.physical(diff)), pat.label(j)))
        return out


def _exact_within(pat, i, j, r):
    diff = [int(a - b) for a, b in zip(pat.coords[j], pat.coords[i])]
    return all(compare(abs(v), r) <= 0 for v in pat.scheme.physical(diff))


def _patch_members(pat, i, r, order=None, xs=None, tol=1e-9):
    """Indices of points within max-distance r of point i (exact on near ties)."""
    phys = pat.physical
    if order is None:
        order = np.argsort(phys[:, 0], kind="stable")
        xs = phys[order, 0]
    rf = float(r)
    slack = tol * (1 + rf)
    a = np.searchsorted(xs, phys[i, 0] - rf - slack, side="left")
    b = np.searchsorted(xs, phys[i, 0] + rf + slack, side="right")
    cand = order[a:b]
    dist = np.abs(phys[cand] - phys[i]).max(axis=1)
    inside = dist < rf - slack
    near = np.abs(dist - rf) <= slack
    keep = list(cand[inside])
    keep.extend(j for j in cand[near] if _exact_within(pat, i, j, r))
    return sorted(int(j) for j in keep)


def _label_ids(pat):
    names = sorted({p.label or "" for p in pat.scheme.window.pieces})
    lookup = np.array([names.index(p.label or "") for p in pat.scheme.window.pieces], dtype=np.int64)
    return lookup[pat.label_index] if len(pat) else np.zeros(0, dtype=np.int64)


def _centers(pat, r, L):
    """Points whose closed r-ball lies in the generated box."""
    bound = Fraction(L) - Fraction(r)
    bf = float(bound)
    norm = np.abs(pat.physical).max(axis=1) if len(pat) else np.zeros(0)
    slack = 1e-9 * (1 + float(L))
    ok = norm < bf - slack
    for i in np.nonzero(np.abs(norm - bf) <= slack)[0]:
        ok[i] = all(compare(abs(v), bound) <= 0 for v in pat.exact_physical(i))
    return np.nonzero(ok)[0]


def patch_census(s, r, L, pattern=None, workers=1):
    """Classes of r-patches centred at pattern points, by exact translation."""
    r = Fraction(r)
    L = Fraction(L)
    if r < 0:
        raise ParameterError("radius must be nonnegative")
    if L < 4 * r:
        raise ParameterError("box L=%s is smaller than 4r=%s" % (L, 4 * r))
    pat = pattern if pattern is not None else generate_pattern(s, L, workers)
    if pat.L < L:
        raise ParameterError("pattern box is smaller than L")
    centers = _centers(pat, r, L)
    labels = _label_ids(pat)
    if pat.scheme.d == 1:
        keys = _keys_1d(pat, centers, r, labels)
    else:
        keys = _keys_general(pat, centers, r, labels)
    classes = {}
    for c, key in zip(centers, keys):
        classes.setdefault(key, []).append(int(c))
    ordered = sorted(classes.values(), key=lambda v: v[0])
    return PatchCensus(r, L, pat, ordered, centers)


def _keys_general(pat, centers, r, labels):
    order = np.argsort(pat.physical[:, 0], kind="stable")
    xs = pat.physical[order, 0]
    keys = []
    for c in centers:
        members = _patch_members(pat, c, r, order, xs)
        diff = pat.coords[members] - pat.coords[c]
        block = np.column_stack([diff, labels[members]])
        block = block[np.lexsort(block.T[::-1])]
        keys.append(block.tobytes())
    return keys


def _keys_1d(pat, centers, r, labels):
    """Patches on the line are runs of consecutive points."""
    order = np.argsort(pat.physical[:, 0], kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    xs = pat.physical[order, 0]
    coords = pat.coords[order]
    gaps = coords[1:] - coords[:-1]
    if len(gaps):
        _, gap_id = np.unique(gaps, axis=0, return_inverse=True)
        gap_id = gap_id.reshape(-1).astype(np.int64)
    else:
        gap_id = np.zeros(0, dtype=np.int64)
    lab = labels[order]
    rf = float(r)
    slack = 1e-9 * (1 + rf)
    keys = []
    for c in centers:
        i = rank[c]
        a = int(np.searchsorted(xs, xs[i] - rf + slack, side="left"))
        b = int(np.searchsorted(xs, xs[i] + rf - slack, side="right")) - 1
        while a > 0 and xs[i] - xs[a - 1] <= rf + slack and \
                _exact_within(pat, order[i], order[a - 1], r):
            a -= 1
        while b + 1 < len(xs) and xs[b + 1] - xs[i] <= rf + slack and \
                _exact_within(pat, order[i], order[b + 1], r):
            b += 1
        keys.append((i - a, gap_id[a:b].tobytes(), lab[a:b + 1].tobytes()))
    return keys


# ---------------------------------------------------------------- tables

def _box_for(r, L, L_min):
    if L is not None:
        return Fraction(L)
    return max(Fraction(L_min), 4 * Fraction(r))


def empirical_complexity(s, radii, alpha, L=None, L_min=50, workers=1):
    """Rows (r, p_hat, p_hat / r^alpha) and a drift flag on the ratio column."""
    radii = _check_radii(radii)
    rows = []
    cache = {}
    for r in radii:
        box = _box_for(r, L, L_min)
        if box not in cache:
            cache[box] = generate_pattern(s, box, workers)
        cen = patch_census(s, r, box, cache[box])
        rows.append({"r": r, "L": box, "p_hat": cen.p_hat,
                     "ratio": cen.p_hat / float(r) ** alpha})
    ratios = [row["ratio"] for row in rows]
    up = all(b >= a for a, b in zip(ratios, ratios[1:]))
    down = all(b <= a for a, b in zip(ratios, ratios[1:]))
    spread = max(ratios) / min(ratios) if min(ratios) > 0 else float("inf")
    return {"alpha": alpha, "rows": rows, "spread": spread,
            "drift": bool((up or down) and spread > 10)}


def _check_radii(radii):
    radii = [Fraction(r) for r in radii]
    if not radii or radii[0] <= 0 or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ParameterError("radii must be positive and increasing")
    return radii


def covering_radius(points, region_half, d, rng=None, samples=4000):
    """Largest max-norm distance from a point of [-h, h]^d to the point set.

    Exact on the line (endpoints and midpoints of gaps); sampled otherwise.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, d)
    if d == 1:
        xs = np.sort(pts[:, 0])
        mids = (xs[1:] + xs[:-1]) / 2
        probes = np.concatenate([[-region_half, region_half],
                                 mids[(mids > -region_half) & (mids < region_half)]])
        idx = np.searchsorted(xs, probes)
        left = np.abs(probes - xs[np.clip(idx - 1, 0, len(xs) - 1)])
        right = np.abs(xs[np.clip(idx, 0, len(xs) - 1)] - probes)
        return float(np.minimum(left, right).max())
    sample = rng.uniform(-region_half, region_half, size=(samples, d))
    out = 0.0
    for chunk in np.array_split(sample, max(1, samples // 500)):
        dist = np.abs(chunk[:, None, :] - pts[None, :, :]).max(axis=2).min(axis=1)
        out = max(out, float(dist.max()))
    return out


def empirical_repetitivity(s, radii, L, seed=0, samples=4000, workers=1):
    """Rows (r, rho_hat, rho_hat / r); rho_hat is None ("at least L") when some
    class occurs only once in the box."""
    radii = _check_radii(radii)
    L = Fraction(L)
    pat = generate_pattern(s, L, workers)
    rows = []
    for r in radii:
        cen = patch_census(s, r, L, pat)
        rng = np.random.default_rng(seed)
        half = float(L - r) / 2
        rho = 0.0
        single = False
        for members in cen.classes:
            if len(members) == 1:
                single = True
                break
            rho = max(rho, covering_radius(pat.physical[members], half, s.d, rng, samples))
        if single:
            rows.append({"r": r, "rho_hat": None, "ratio": None, "insufficient_box": True})
        else:
            rows.append({"r": r, "rho_hat": rho, "ratio": rho / float(r), "insufficient_box": False})
    return {"L": L, "rows": rows}


# ---------------------------------------------------------------- cut regions

class CutRegionCensus:
    def __init__(self, r, count, min_volume, cutter_count):
        self.r = r
        self.count = count
        self.min_volume = min_volume
        self.cutter_count = cutter_count


def lattice_ball(s, r, workers=1):
    """Gamma(r): lattice coordinates with total-space max norm <= r."""
    A = s.float_matrix()
    rf = float(r)
    z = lattice_points_in_box(A, [-rf] * s.k, [rf] * s.k, range(s.d, s.k), workers=workers)
    y = z.astype(float) @ A.T if len(z) else np.zeros((0, s.k))
    norm = np.abs(y).max(axis=1)
    slack = 1e-9 * (1 + rf)
    keep = norm < rf - slack
    stacked = s.stacked
    for i in np.nonzero(np.abs(norm - rf) <= slack)[0]:
        vals = [dot(row, [int(c) for c in z[i]]) for row in stacked]
        keep[i] = all(compare(abs(v), Fraction(r)) <= 0 for v in vals)
    return z[keep]


def cutters(s, r, workers=1):
    """Distinct translates H - gamma_< (gamma in Gamma(r)) meeting int(W)."""
    hyper, _ = supporting_hyperplanes(s.window)
    ball = lattice_ball(s, r, workers)
    out = {}
    for h in hyper:
        row = [dot(h.normal, [s.proj_internal[i][j] for i in range(s.n)]) for j in range(s.k)]
        restr = rational_restriction([row])
        den = lcm(*(x.denominator for rr in restr for x in rr))
        m_int = [[int(x * den) for x in rr] for rr in restr]
        reps = ball[_distinct_images(ball, m_int)]
        lo, hi = _normal_range(h, s.window)
        moved = h.offset.approx() - reps.astype(float) @ np.array([float(x) for x in row])
        for g in reps[(moved > lo - 1e-9) & (moved < hi + 1e-9)]:
            c = Hyperplane(h.normal, h.offset - dot(row, [int(x) for x in g]), canonical=True)
            out.setdefault(c.key(), c)
    return [out[k] for k in sorted(out)]


def _distinct_images(ball, m_int):
    """First index of each distinct integer image m_int . gamma over the ball."""
    if len(ball) == 0:
        return np.zeros(0, dtype=np.int64)
    big = max(abs(x) for rr in m_int for x in rr) * int(np.abs(ball).max()) * ball.shape[1]
    if big < 2 ** 62:
        # gamma with equal restricted images give the same cutter
        _, first = np.unique(ball @ np.array(m_int, dtype=np.int64).T, axis=0, return_index=True)
        return np.sort(first)
    seen = {}
    for i, g in enumerate(ball.tolist()):
        seen.setdefault(tuple(sum(a * b for a, b in zip(rr, g)) for rr in m_int), i)
    return np.array(sorted(seen.values()), dtype=np.int64)


def _normal_range(h, window):
    vals = [dot(h.normal, v).approx() for p in window.pieces for v in p.vertices]
    return min(vals), max(vals)


def cut_region_census(s, r, workers=1):
    if s.n > 2:
        raise UnsupportedDimension("cut-region census needs internal dimension <= 2")
    cs = cutters(s, r, workers) if r > 0 else []
    census = arrangement_census(s.window, cs)
    return CutRegionCensus(Fraction(r), census.face_count, census.min_volume, len(cs))


def pw_estimate(s, radii, workers=1):
    """Rows (r, minimal cut-region volume, volume * r^d)."""
    radii = _check_radii(radii)
    rows = []
    for r in radii:
        c = cut_region_census(s, r, workers)
        vol = float(c.min_volume)
        rows.append({"r": r, "regions": c.count, "min_volume": c.min_volume,
                     "product": vol * float(r) ** s.d})
    return rows
