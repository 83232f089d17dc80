"""Continued fractions, Diophantine constants of embedded groups, and the
scheme-level checks D, D_F and the flag-group condition."""
from fractions import Fraction
from math import isqrt, lcm

import numpy as np

from .algebra import IntLattice, compare, mat_vec
from .enumeration import lattice_points_in_box
from .complexity import (Flag, find_decomposition, flag_group, enumerate_flags,
                         generalized_vertices_and_F, prepare, restrict_to_factor, split_vectors)

DEFAULT_SCHEDULE = tuple(2 ** j for j in range(4, 17))


class ParameterError(ValueError):
    pass


# ---------------------------------------------------------------- continued fractions

class CFExpansion:
    def __init__(self, value, partial_quotients, periodic=None):
        self.value = value
        self.partial_quotients = list(partial_quotients)
        self.periodic = periodic  # (preperiod length, period list)

    def to_json(self):
        out = {"partial_quotients": self.partial_quotients}
        if self.periodic is not None:
            out["preperiod"] = self.periodic[0]
            out["period"] = list(self.periodic[1])
        return out


def _quadratic_form(x):
    """Integers (P, D, Q) with x = (P + sqrt D) / Q and Q | D - P^2."""
    f = x.field
    _, p, q = (Fraction(c) for c in f.minpoly)
    disc = p * p - 4 * q
    # theta = (-p + s sqrt(disc)) / 2
    s = (f.theta() * 2 + f.rational(p)).sign()
    a, b = x.c
    u = a - b * p / 2
    v = b * s / 2 / disc.denominator
    root = disc.numerator * disc.denominator
    w = lcm(u.denominator, v.denominator)
    big_u, big_v = int(u * w), int(v * w)
    if big_v < 0:
        big_u, big_v, w = -big_u, -big_v, -w
    return big_u * abs(w), root * big_v * big_v * w * w, w * abs(w)


def cf_expand(x, depth=20):
    """Partial quotients of x; quadratic values also get their period."""
    if x.is_rational():
        raise ParameterError("rational input")
    field = x.field
    quotients = []
    if field.degree == 2:
        P, D, Q = _quadratic_form(x)
        seen = {}
        i = 0
        while True:
            state = (P, Q)
            if state in seen:
                start = seen[state]
                period = quotients[start:]
                while len(quotients) < depth:
                    quotients.append(period[(len(quotients) - start) % len(period)])
                return CFExpansion(x, quotients[:max(depth, start + len(period))], (start, period))
            seen[state] = i
            a = _quadratic_floor(P, D, Q)
            quotients.append(a)
            P = a * Q - P
            Q = (D - P * P) // Q
            i += 1
    cur = x
    for _ in range(depth):
        a = cur.floor()
        quotients.append(a)
        frac = cur - a
        if frac.is_zero():
            break
        cur = frac.inverse()
    return CFExpansion(x, quotients, None)


def _quadratic_floor(P, D, Q):
    """floor((P + sqrt D) / Q) for D not a square."""
    r = isqrt(D)
    if Q > 0:
        return (P + r) // Q
    return -((P + r) // -Q) - 1


def convergents(quotients):
    """(p_i, q_i) for the prefixes of a partial-quotient list."""
    out = []
    p0, q0, p1, q1 = 1, 0, quotients[0], 1
    out.append((p1, q1))
    for a in quotients[1:]:
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        out.append((p1, q1))
    return out


def verify_periodic(cf):
    """Re-expand the periodic part exactly and confirm it reproduces the value."""
    if cf.periodic is None:
        return False
    pre, period = cf.periodic
    x = cf.value
    for a in cf.partial_quotients[:pre]:
        x = (x - a).inverse()
    y = x
    for a in period:
        y = (y - a).inverse()
    return y == x


def is_bad_quadratic(x):
    """Certificate of bounded partial quotients for quadratic irrationals."""
    if x.field.degree != 2:
        return {"applicable": False, "reason": "field degree %d" % x.field.degree}
    cf = cf_expand(x, depth=1)
    pre, period = cf.periodic
    return {"applicable": True, "badly_approximable": True, "preperiod": pre,
            "period": list(period), "bound": max(period), "verified": verify_periodic(cf)}


# ---------------------------------------------------------------- estimator

class EmbeddedGroup:
    """A group of lattice vectors (rational rows of `basis`) viewed through
    the scheme's projections."""

    def __init__(self, scheme, basis, name="Gamma"):
        self.scheme = scheme
        self.basis = [[Fraction(x) for x in b] for b in basis]
        self.name = name
        sm = scheme.float_matrix()
        bm = np.array([[float(x) for x in b] for b in self.basis]) if self.basis else np.zeros((0, scheme.k))
        self.matrix = sm @ bm.T  # total-space image of coefficient vectors

    @property
    def rank(self):
        return len(self.basis)

    def lift(self, coeffs):
        k = self.scheme.k
        return [sum((Fraction(int(c)) * b[t] for c, b in zip(coeffs, self.basis)), Fraction(0))
                for t in range(k)]


def _exact_parts(group, coeffs, target):
    s = group.scheme
    g = group.lift(coeffs)
    total = mat_vec(s.stacked, g)
    internal = total[s.d:]
    diff = [a - b for a, b in zip(internal, target)]
    dist = max((abs(x) for x in diff), key=_cmpkey)
    eta = max((abs(x) for x in total), key=_cmpkey)
    return g, dist, eta


class _CmpKey:
    __slots__ = ("x",)

    def __init__(self, x):
        self.x = x

    def __lt__(self, other):
        return compare(self.x, other.x) < 0


def _cmpkey(x):
    return _CmpKey(x)


def _exact_less(a, b, delta):
    """Is dist_a * eta_a^delta < dist_b * eta_b^delta (exactly)?"""
    p, q = delta.numerator, delta.denominator
    lhs = (a[0] ** q) * (a[1] ** p)
    rhs = (b[0] ** q) * (b[1] ** p)
    return compare(lhs, rhs)


class DiophantineEstimate:
    def __init__(self, group_name, delta, schedule, targets, records):
        self.group_name = group_name
        self.delta = delta
        self.schedule = list(schedule)
        self.targets = targets
        self.records = records  # per target: list of dicts per R

    def values(self, target_index=0):
        return [r["c"] for r in self.records[target_index]]

    def min_values(self):
        out = []
        for j in range(len(self.schedule)):
            vals = [rec[j]["c"] for rec in self.records if rec[j]["c"] is not None]
            out.append(min(vals) if vals else None)
        return out

    def verdict(self):
        verdicts = [classify(rec) for rec in self.records]
        return "empirically-failing" if "empirically-failing" in verdicts else "empirically-consistent"

    def csv_rows(self, precision=12):
        rows = []
        for ti, rec in enumerate(self.records):
            for r in rec:
                rows.append([str(r["R"]), str(ti),
                             "" if r["c"] is None else "%.*g" % (precision, r["c"])]
                            + list(r["witness"] or []))
        return rows

    def to_json(self):
        return {"group": self.group_name, "delta": str(self.delta),
                "schedule": [R if isinstance(R, int) else str(R) for R in self.schedule],
                "targets": [[x.to_strings() for x in t] for t in self.targets],
                "c_R": [[r["c"] for r in rec] for rec in self.records],
                "verdict": self.verdict()}


def classify(records):
    vals = [r["c"] for r in records if r["c"] is not None]
    if len(vals) < 4:
        return "empirically-consistent"
    # The running minimum is a step function: one drop onto a plateau is what a
    # Diophantine group shows when the scan first meets its liminf.  Decay means
    # repeated drops, the latest of them still inside the last four radii.
    drops = [j for j in range(1, len(vals)) if vals[j] * 2 <= vals[j - 1]]
    ongoing = len(drops) >= 2 and drops[-1] >= len(vals) - 3
    if vals[-1] < vals[0] / 32 and ongoing:
        return "empirically-failing"
    return "empirically-consistent"


def _scan(group, target, target_f, lo_int, hi_int, R, workers):
    s = group.scheme
    d = s.d
    lo = np.concatenate([np.full(d, -float(R)), lo_int])
    hi = np.concatenate([np.full(d, float(R)), hi_int])
    if np.any(lo > hi):
        return np.zeros((0, group.rank), dtype=np.int64)
    return lattice_points_in_box(group.matrix, lo, hi, range(d, s.k), workers=workers)


def dioph_estimate(group, targets, delta, schedule=DEFAULT_SCHEDULE, workers=1):
    """Running minimum of ||g_< - t|| * eta(g)^delta over eta(g) <= R."""
    delta = Fraction(delta)
    if delta <= 0:
        raise ParameterError("delta must be positive")
    s = group.scheme
    if group.rank == 0:
        raise ParameterError("group has rank 0")
    schedule = [int(R) if float(R).is_integer() else Fraction(R) for R in schedule]
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ParameterError("schedule must be increasing")
    records = []
    for t in targets:
        t = tuple(t)
        tf = np.array([float(x) for x in t])
        tnorm = float(np.abs(tf).max()) if len(tf) else 0.0
        best = None  # (float value, exact (dist, eta), coeffs, lift)
        rec = []
        prev_R = None
        for R in schedule:
            Rf = float(R)
            if prev_R is None:
                eps = max(1.0, 2 * tnorm)
                while True:
                    pts = _scan(group, t, tf, np.maximum(tf - eps, -Rf), np.minimum(tf + eps, Rf),
                                R, workers)
                    best = _update(group, t, tf, pts, Rf, delta, best)
                    if eps >= Rf + tnorm:
                        break
                    if best is not None and eps > tnorm and \
                            best[0] <= eps * (eps - tnorm) ** float(delta) * (1 - 1e-9):
                        break
                    eps *= 2
            else:
                if best is None:
                    width = Rf + tnorm
                else:
                    width = best[0] / float(prev_R) ** float(delta) * (1 + 1e-9) + 1e-12
                pts = _scan(group, t, tf, np.maximum(tf - width, -Rf), np.minimum(tf + width, Rf),
                            R, workers)
                best = _update(group, t, tf, pts, Rf, delta, best)
            prev_R = R
            if best is None:
                rec.append({"R": R, "c": None, "witness": None})
            else:
                rec.append({"R": R, "c": best[0], "witness": [str(x) for x in best[3]]})
        records.append(rec)
    return DiophantineEstimate(group.name, delta, schedule, [tuple(t) for t in targets], records)


def _update(group, t, tf, pts, Rf, delta, best):
    if len(pts) == 0:
        return best
    s = group.scheme
    y = pts.astype(float) @ group.matrix.T
    eta = np.abs(y).max(axis=1)
    dist = np.abs(y[:, s.d:] - tf[None, :]).max(axis=1)
    nonzero = np.any(pts != 0, axis=1)
    ok = nonzero & (eta <= Rf * (1 + 1e-12) + 1e-12)
    if not np.any(ok):
        return best
    pts, eta, dist = pts[ok], eta[ok], dist[ok]
    val = dist * eta ** float(delta)
    # exact coincidences with the target are excluded
    scale = 1e-9 * (1.0 + np.abs(tf).max() if len(tf) else 1.0)
    near_zero = dist <= scale
    order = np.lexsort(tuple(pts.T[::-1]) + (val,))
    cutoff = best[0] * (1 + 1e-9) if best is not None else np.inf
    candidates = []
    vmin = None
    for idx in order:
        v = val[idx]
        if v > cutoff or (vmin is not None and v > vmin * (1 + 1e-9) + 1e-300):
            if not near_zero[idx]:
                break
            continue
        coeffs = tuple(int(c) for c in pts[idx])
        g, de, ee = _exact_parts(group, coeffs, t)
        if de.is_zero():
            continue
        candidates.append((coeffs, g, de, ee))
        if vmin is None:
            vmin = v
    if not candidates:
        return best
    chosen = None
    for cand in candidates:
        if chosen is None:
            chosen = cand
            continue
        c = _exact_less((cand[2], cand[3]), (chosen[2], chosen[3]), delta)
        if c < 0 or (c == 0 and tuple(cand[1]) < tuple(chosen[1])):
            chosen = cand
    exact = (chosen[2], chosen[3])
    value = float(chosen[2]) * float(chosen[3]) ** float(delta)
    if best is not None:
        c = _exact_less(exact, best[1], delta)
        if c > 0 or (c == 0 and tuple(best[3]) <= tuple(chosen[1])):
            return best
    return (value, exact, chosen[0], chosen[1])


# ---------------------------------------------------------------- scheme-level checks

def standard_group(s, scale=1, name="Gamma"):
    k = s.k
    return EmbeddedGroup(s, [[Fraction(1 if i == j else 0, scale) for j in range(k)]
                             for i in range(k)], name)


def _factor_ratio(p, factor):
    """Ratio of the two internal generator images along a 1-dimensional factor."""
    sc = p.scheme
    lat = factor.lattice
    if lat.rank != 2 or factor.n_i != 1:
        return None
    axis = factor.basis[0]
    comps = []
    for b in lat.basis:
        img = mat_vec(sc.proj_internal, list(b))
        j = next(i for i, a in enumerate(axis) if not a.is_zero())
        comps.append(img[j] / axis[j])
    if comps[0].is_zero():
        return None
    return comps[1] / comps[0]


def _combine(verdicts):
    if "empirically-failing" in verdicts:
        return "empirically-failing"
    if verdicts and all(v == "certified" for v in verdicts):
        return "certified"
    return "empirically-consistent"


def check_D(s, schedule=DEFAULT_SCHEDULE, workers=1):
    p = prepare(s)
    sc = p.scheme
    factors = find_decomposition(p)
    runs = []
    for i, f in enumerate(factors):
        group = EmbeddedGroup(sc, [list(b) for b in f.lattice.basis], "Gamma_%d" % (i + 1))
        zero = tuple(sc.field.zero() for _ in range(sc.n))
        est = dioph_estimate(group, [zero], f.delta, schedule, workers)
        cert = None
        if sc.field.degree == 2 and f.n_i == 1 and f.k_i == 2:
            ratio = _factor_ratio(p, f)
            if ratio is not None and not ratio.is_rational():
                cert = is_bad_quadratic(ratio)
        verdict = "certified" if cert and cert.get("badly_approximable") else est.verdict()
        runs.append({"factor": i, "k_i": f.k_i, "n_i": f.n_i, "delta": str(f.delta),
                     "certificate": cert, "estimate": est, "verdict": verdict})
    evidence = stabiliser_certificates(p)
    return {"runs": runs, "verdict": _combine([r["verdict"] for r in runs]),
            "supporting_certificates": evidence}


def stabiliser_certificates(p):
    """Quadratic certificates for rank-2 stabilisers with a 1-dimensional image."""
    sc = p.scheme
    out = []
    if sc.field.degree != 2:
        return out
    for i, normal in enumerate(p.subspaces):
        st = p.stabiliser((i,))
        if st.rank != 2 or st.beta != 1:
            continue
        imgs = [mat_vec(sc.proj_internal, list(b)) for b in st.lattice.basis]
        j = next((t for t in range(sc.n) if not imgs[0][t].is_zero()), None)
        if j is None:
            continue
        ratio = imgs[1][j] / imgs[0][j]
        if ratio.is_rational():
            continue
        out.append({"subspace": i, "certificate": is_bad_quadratic(ratio)})
    return out


def _dedupe_targets(targets):
    """Drop one of each +-f pair (c is symmetric under g -> -g)."""
    seen = set()
    out = []
    for t in targets:
        key = tuple(tuple(x.c) for x in t)
        neg = tuple(tuple((-x).c) for x in t)
        if neg in seen:
            continue
        seen.add(key)
        out.append(t)
    return out


def check_DF(s, schedule=DEFAULT_SCHEDULE, scale_n=1, workers=1):
    """Inhomogeneous runs of each factor against F_i, for Gamma and (1/N) Gamma.

    Both lattices are always reported side by side; the verdict is taken from
    the rescaled runs.
    """
    if scale_n < 1:
        raise ParameterError("scale_N must be a positive integer")
    p = prepare(s)
    sc = p.scheme
    factors = find_decomposition(p)
    vertices, F, split = generalized_vertices_and_F(p, factors)
    runs = []
    for N in sorted({1, scale_n}):
        for i, f in enumerate(factors):
            if split is None:
                targets = F
            else:
                seen = {}
                for parts in split:
                    seen.setdefault(tuple(tuple(x.c) for x in parts[i]), parts[i])
                targets = [seen[k] for k in sorted(seen)]
            targets = _dedupe_targets(targets)
            basis = [[x / N for x in b] for b in f.lattice.basis]
            name = "Gamma_%d" % (i + 1) if N == 1 else "(1/%d)Gamma_%d" % (N, i + 1)
            est = dioph_estimate(EmbeddedGroup(sc, basis, name), targets, f.delta, schedule, workers)
            runs.append({"factor": i, "scale_N": N, "n_targets": len(targets),
                         "estimate": est, "verdict": est.verdict()})
    decisive = [r["verdict"] for r in runs if r["scale_N"] == scale_n]
    note = "N=1 suffices in codimension 1" if sc.n == 1 else None
    return {"runs": runs, "verdict": _combine(decisive), "note": note}


def check_flag_condition(s, schedule=DEFAULT_SCHEDULE, workers=1, max_pairs=None):
    """Gamma_i[f, f'] against the singleton (v(f') - v(f))_i for flag pairs."""
    p = prepare(s)
    sc = p.scheme
    factors = find_decomposition(p)
    _, concrete = enumerate_flags(p)
    # Gamma[f, f'] only depends on the subspaces of the two flags
    sub_key = [tuple(sorted(p.hyperplane_subspace(h) for h in (p.hyperplanes[m] for m in f.members)))
               for f in concrete]
    restricted = {}
    jobs = {}
    for a in range(len(concrete)):
        for b in range(a, len(concrete)):
            f, g = concrete[a], concrete[b]
            diff = tuple(x - y for x, y in zip(g.vertex, f.vertex))
            pair = (sub_key[a], sub_key[b])
            if pair not in restricted:
                grp = flag_group(p, Flag(f.members, f.normals), Flag(g.members, g.normals))
                if not grp.finite:
                    return {"runs": [], "verdict": "not-applicable", "reason": "C fails"}
                restricted[pair] = [restrict_to_factor(p, grp.lattice, fac) for fac in factors]
            parts = split_vectors(p, factors, [diff])[0] if len(factors) > 1 else [diff]
            for i, fac in enumerate(factors):
                lat = restricted[pair][i]
                tkey = tuple(tuple(x.c) for x in parts[i])
                nkey = tuple(tuple((-x).c) for x in parts[i])
                lkey = (i, lat.basis)
                if (lkey, nkey) in jobs:
                    continue
                jobs.setdefault((lkey, tkey), (i, lat, parts[i], (a, b)))
    runs = []
    keys = sorted(jobs, key=lambda kk: (jobs[kk][0], jobs[kk][3]))
    if max_pairs is not None:
        keys = keys[:max_pairs]
    for key in keys:
        i, lat, target, pair = jobs[key]
        group = EmbeddedGroup(sc, [list(b) for b in lat.basis], "Gamma_%d[f%d,f%d]" % (i + 1, *pair))
        est = dioph_estimate(group, [target], factors[i].delta, schedule, workers)
        runs.append({"factor": i, "flags": list(pair), "estimate": est, "verdict": est.verdict()})
    return {"runs": runs, "verdict": _combine([r["verdict"] for r in runs]),
            "aggregate_min": _aggregate_min(runs), "distinct_runs": len(jobs)}


def _aggregate_min(runs):
    if not runs:
        return []
    n = len(runs[0]["estimate"].schedule)
    out = []
    for j in range(n):
        vals = [v for r in runs for v in [r["estimate"].min_values()[j]] if v is not None]
        out.append(min(vals) if vals else None)
    return out
