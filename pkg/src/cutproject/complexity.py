"""Stabilisers, flags, the complexity exponent, decompositions, flag groups
and weak homogeneity of a polytopal scheme."""
from fractions import Fraction
from itertools import combinations
from math import lcm

from .algebra import (IntLattice, dot, field_rank, field_solve, hnf, hnf_and_index,
                      integer_kernel, mat_vec, rational_restriction, rational_solve)
from .geometry import InvalidWindow, _field_nullspace, subspace_key, supporting_hyperplanes, vec_key
from .scheme import integer_solvable, unlabel


class StabiliserInfo:
    def __init__(self, subspaces, lattice, beta=None):
        self.subspaces = tuple(subspaces)
        self.lattice = lattice
        self.rank = lattice.rank
        self.beta = beta

    def to_json(self):
        out = {"normals": [[a.to_strings() for a in v] for v in self.subspaces],
               "rank": self.rank, "basis": self.lattice.basis_strings()}
        if self.beta is not None:
            out["beta"] = self.beta
        return out


class Flag:
    """n supporting hyperplanes meeting in one point (`vertex`), or n subspaces."""

    def __init__(self, members, normals, vertex=None):
        self.members = tuple(members)
        self.normals = tuple(normals)
        self.vertex = vertex

    def to_json(self):
        out = {"members": list(self.members)}
        if self.vertex is not None:
            out["vertex"] = [x.to_strings() for x in self.vertex]
        return out


class FlagGroup:
    def __init__(self, flags, lattice, index, generators):
        self.flags = flags
        self.lattice = lattice
        self.index = index
        self.generators = generators

    @property
    def finite(self):
        return isinstance(self.index, int)

    def to_json(self):
        return {"index": self.index,
                "basis": self.lattice.basis_strings() if self.lattice is not None else None}


# ---------------------------------------------------------------- preparation

class Prepared:
    """An unlabelled scheme together with its hyperplanes and subspaces."""

    def __init__(self, scheme):
        if scheme.window is None:
            raise InvalidWindow("scheme has no window")
        self.original = scheme
        self.scheme = unlabel(scheme) if scheme.window.labelled else scheme
        self.hyperplanes, self.subspaces = supporting_hyperplanes(self.scheme.window)
        self.subspace_index = {subspace_key(v): i for i, v in enumerate(self.subspaces)}
        self._stab = {}
        self._groups = {}

    @property
    def n(self):
        return self.scheme.n

    def row(self, normal):
        s = self.scheme
        return [dot(normal, [s.proj_internal[i][j] for i in range(s.n)]) for j in range(s.k)]

    def stabiliser(self, idx):
        idx = tuple(sorted(idx))
        if idx not in self._stab:
            self._stab[idx] = stabiliser(self.scheme, [self.subspaces[i] for i in idx])
        return self._stab[idx]

    def hyperplane_subspace(self, h):
        return self.subspace_index[subspace_key(h.normal)]


def prepare(s):
    return s if isinstance(s, Prepared) else Prepared(s)


def _projected_rank(s, lattice):
    if lattice.rank == 0:
        return 0
    images = [mat_vec(s.proj_internal, list(b)) for b in lattice.basis]
    return field_rank(images)


def stabiliser(s, subspaces):
    """Gamma^S for a nonempty set S of supporting subspaces (given by normals)."""
    subspaces = list(subspaces)
    if not subspaces:
        raise ValueError("stabiliser of the empty set is the whole lattice")
    rows = []
    for normal in subspaces:
        rows.append([dot(normal, [s.proj_internal[i][j] for i in range(s.n)])
                     for j in range(s.k)])
    lattice = integer_kernel(rational_restriction(rows), s.k)
    beta = _projected_rank(s, lattice) if len(subspaces) == 1 else None
    return StabiliserInfo(subspaces, lattice, beta)


# ---------------------------------------------------------------- flags

def enumerate_flags(s):
    """Flags of subspaces (index tuples) and concrete flags with vertices."""
    p = prepare(s)
    n = p.n
    sub_flags = [c for c in combinations(range(len(p.subspaces)), n)
                 if field_rank([p.subspaces[i] for i in c]) == n]
    if not sub_flags:
        raise InvalidWindow("supporting subspaces do not meet in a point")
    concrete = []
    valid = set(sub_flags)
    for c in combinations(range(len(p.hyperplanes)), n):
        hs = [p.hyperplanes[i] for i in c]
        subs = tuple(sorted(p.hyperplane_subspace(h) for h in hs))
        if len(set(subs)) < n or subs not in valid:
            continue
        vertex = field_solve([list(h.normal) for h in hs], [h.offset for h in hs])
        concrete.append(Flag(c, [h.normal for h in hs], tuple(vertex)))
    return [Flag(c, [p.subspaces[i] for i in c]) for c in sub_flags], concrete


# ---------------------------------------------------------------- exponent

class ComplexityReport:
    def __init__(self, **kw):
        self.__dict__.update(kw)


def complexity_exponent(s):
    p = prepare(s)
    sc = p.scheme
    d, n, k = sc.d, sc.n, sc.k
    stabs = [p.stabiliser((i,)) for i in range(len(p.subspaces))]
    alpha_h = [d - st.rank + st.beta for st in stabs]
    sub_flags, _ = enumerate_flags(p)
    alpha_f = [sum(alpha_h[i] for i in f.members) for f in sub_flags]
    alpha = max(alpha_f)
    spanning = all(st.beta == n - 1 for st in stabs)
    consequences = []
    for f in sub_flags:
        parts = []
        one_dim = True
        for i in f.members:
            rest = tuple(j for j in f.members if j != i)
            lat = p.stabiliser(rest).lattice if rest else IntLattice.standard(k)
            parts.append(lat)
            one_dim = one_dim and _projected_rank(sc, lat) == 1
        total = parts[0]
        for lat in parts[1:]:
            total = total + lat
        consequences.append({"flag": list(f.members), "one_dimensional": one_dim,
                             "sum_finite_index": total.rank == k})
    return ComplexityReport(alpha=alpha, C=(alpha == d), stabilisers=stabs, alpha_H=alpha_h,
                            flags=sub_flags, alpha_f=alpha_f, hyperplane_spanning=spanning,
                            consequences=consequences)


# ---------------------------------------------------------------- decomposition

class Factor:
    def __init__(self, subset, complement, basis, lattice, n_i, restricted_ranks):
        self.subset = tuple(subset)          # S_i: subspaces containing X_i
        self.complement = tuple(complement)  # subspaces cutting X_i
        self.basis = basis                   # field basis of X_i
        self.lattice = lattice               # Gamma_i
        self.k_i = lattice.rank
        self.n_i = n_i
        self.d_i = self.k_i - n_i
        self.delta = Fraction(self.d_i, n_i)
        self.restricted_ranks = restricted_ranks

    @property
    def r_i(self):
        ranks = set(self.restricted_ranks)
        return ranks.pop() if len(ranks) == 1 else None

    def to_json(self):
        expected = self.delta
        r_i = self.r_i
        return {"S": list(self.subset), "cut_by": list(self.complement),
                "X_basis": [[a.to_strings() for a in v] for v in self.basis],
                "k_i": self.k_i, "n_i": self.n_i, "d_i": self.d_i, "delta": str(self.delta),
                "restricted_ranks": list(self.restricted_ranks), "r_i": r_i,
                "constant_rank_matches": r_i is not None and r_i == self.k_i - expected - 1,
                "Gamma_i": self.lattice.basis_strings()}


def _subspace_basis(p, subset):
    field = p.scheme.field
    n = p.n
    if not subset:
        return [[field.one() if i == j else field.zero() for j in range(n)] for i in range(n)]
    return _field_nullspace([list(p.subspaces[i]) for i in subset], n, field)


def _is_decomposition(p, blocks):
    allidx = set(range(len(p.subspaces)))
    bases = []
    for block in blocks:
        bases.append(_subspace_basis(p, sorted(allidx - set(block))))
    dims = sum(len(b) for b in bases)
    if dims != p.n:
        return False
    stacked = [v for b in bases for v in b]
    return field_rank(stacked) == p.n


def find_decomposition(s):
    """Maximal decomposition as a list of Factors (one factor if indecomposable)."""
    p = prepare(s)
    sc = p.scheme
    m = len(p.subspaces)
    blocks = [tuple(range(m))]
    changed = True
    while changed:
        changed = False
        for bi, block in enumerate(blocks):
            if len(block) < 2:
                continue
            first, rest = block[0], block[1:]
            for size in range(0, len(rest)):
                for extra in combinations(rest, size):
                    a = (first,) + extra
                    b = tuple(i for i in block if i not in a)
                    trial = blocks[:bi] + [a, b] + blocks[bi + 1:]
                    if _is_decomposition(p, trial):
                        blocks = trial
                        changed = True
                        break
                if changed:
                    break
            if changed:
                break
    factors = []
    allidx = set(range(m))
    for block in sorted(blocks):
        subset = tuple(sorted(allidx - set(block)))
        basis = _subspace_basis(p, subset)
        lattice = p.stabiliser(subset).lattice if subset else IntLattice.standard(sc.k)
        ranks = [(p.stabiliser(subset + (v,)).rank if subset else p.stabiliser((v,)).rank)
                 for v in block]
        factors.append(Factor(subset, block, basis, lattice, len(basis), ranks))
    return factors


def decomposition_json(factors, k):
    total = factors[0].lattice
    for f in factors[1:]:
        total = total + f.lattice
    return {"decomposable": len(factors) > 1, "factors": [f.to_json() for f in factors],
            "sum_k_i": sum(f.k_i for f in factors), "sum_n_i": sum(f.n_i for f in factors),
            "sum_finite_index": total.rank == k}


# ---------------------------------------------------------------- vertices and F

def generalized_vertices_and_F(s, factors=None):
    """Deduplicated generalised vertices, the displacement set F, and its split."""
    p = prepare(s)
    _, concrete = enumerate_flags(p)
    seen = {}
    for f in concrete:
        seen.setdefault(vec_key(f.vertex), f.vertex)
    vertices = [seen[key] for key in sorted(seen)]
    diffs = {}
    for a in vertices:
        for b in vertices:
            v = tuple(x - y for x, y in zip(a, b))
            diffs.setdefault(vec_key(v), v)
    F = [diffs[key] for key in sorted(diffs)]
    split = None
    if factors is not None and len(factors) > 1:
        split = split_vectors(p, factors, F)
    return vertices, F, split


def split_vectors(p, factors, vectors):
    """Components of each vector along the direct sum of the factor spaces."""
    basis = [v for f in factors for v in f.basis]
    n = p.n
    cols = [[basis[j][i] for j in range(n)] for i in range(n)]
    out = []
    for vec in vectors:
        coeff = field_solve(cols, list(vec))
        parts = []
        start = 0
        for f in factors:
            comp = [p.scheme.field.zero()] * n
            for j in range(f.n_i):
                c = coeff[start + j]
                comp = [a + c * b for a, b in zip(comp, f.basis[j])]
            start += f.n_i
            parts.append(tuple(comp))
        out.append(parts)
    return out


# ---------------------------------------------------------------- flag groups

def _lift_internal(sc, v):
    """Rational y with proj_internal . y = v, or None."""
    rows = rational_restriction(sc.proj_internal)
    rhs = [c for x in v for c in x.c]
    return rational_solve(rows, rhs)


def flag_group(s, f, f2=None):
    """Gamma[f] (or Gamma[f, f2]) as a lattice in Q^k with its index over Z^k."""
    p = prepare(s)
    if f2 is not None:
        a = flag_group(p, f)
        b = flag_group(p, f2)
        if not (a.finite and b.finite):
            return FlagGroup((f, f2), None, "infinite", [])
        lattice = a.lattice + b.lattice
        return FlagGroup((f, f2), lattice, hnf_and_index(IntLattice.standard(p.scheme.k), lattice),
                         a.generators + b.generators)
    key = tuple(subspace_key(v) for v in f.normals)
    if key in p._groups:
        return p._groups[key]
    sc = p.scheme
    n, k = sc.n, sc.k
    normals = [list(v) for v in f.normals]
    gens = []
    finite = True
    for i in range(n):
        for j in range(k):
            col = [sc.proj_internal[t][j] for t in range(n)]
            rhs = [sc.field.zero()] * n
            rhs[i] = dot(normals[i], col)
            if rhs[i].is_zero():
                continue
            v = field_solve(normals, rhs)
            y = _lift_internal(sc, v)
            if y is None:
                finite = False
                break
            gens.append(y)
        if not finite:
            break
    if not finite:
        grp = FlagGroup((f,), None, "infinite", gens)
    else:
        lattice = IntLattice(k, gens + [[1 if a == b else 0 for b in range(k)] for a in range(k)])
        grp = FlagGroup((f,), lattice, hnf_and_index(IntLattice.standard(k), lattice), gens)
    p._groups[key] = grp
    return grp


def restrict_to_factor(p, lattice, factor):
    """{gamma in lattice : gamma_< in X_i} for a rational lattice."""
    sc = p.scheme
    if not factor.subset:
        return lattice
    rows = []
    for idx in factor.subset:
        r = p.row(p.subspaces[idx])
        rows.append([sum((a * b for a, b in zip(r, vec)), sc.field.zero()) for vec in lattice.basis])
    ker = integer_kernel(rational_restriction(rows), lattice.rank)
    gens = [[sum(c * vec[t] for c, vec in zip(kv, lattice.basis)) for t in range(sc.k)]
            for kv in ker.basis]
    return IntLattice(sc.k, gens)


def coset_representatives(lattice):
    """Representatives of lattice / Z^k for a lattice containing Z^k."""
    k = lattice.ambient_rank
    coords = []
    for j in range(k):
        e = [1 if t == j else 0 for t in range(k)]
        c = lattice.coordinates(e)
        coords.append([int(x) for x in c])
    h = hnf(coords)
    diag = [h[i][i] for i in range(len(h))]
    reps = [[0] * lattice.rank]
    for i, dval in enumerate(diag):
        reps = [r[:i] + [c] + r[i + 1:] for r in reps for c in range(dval)]
    out = []
    for r in reps:
        out.append([sum(Fraction(c) * b[t] for c, b in zip(r, lattice.basis)) for t in range(k)])
    return out


# ---------------------------------------------------------------- homogeneity

def _vertex_membership(p, f_vertex, hyperplanes, scale):
    """Do all hyperplanes meet x + (1/scale) Gamma_< for the internal point x?"""
    for h in hyperplanes:
        val = (dot(h.normal, f_vertex) - h.offset) * scale
        if not integer_solvable(p.row(h.normal), val):
            return False
    return True


def f_denominator(p, vertices):
    """Smallest N with F inside (1/N) Gamma_<, or None if F leaves Q Gamma_<."""
    sc = p.scheme
    base = vertices[0]
    den = 1
    for v in vertices[1:]:
        y = _lift_internal(sc, [a - b for a, b in zip(v, base)])
        if y is None:
            return None
        for c in y:
            den = lcm(den, c.denominator)
    return den


def check_weak_homogeneity(s, n_max=12):
    """Verdict dict: homogeneous, weakly(N), not-within-bound or undetermined."""
    p = prepare(s)
    sub_flags, concrete = enumerate_flags(p)
    groups = [flag_group(p, f) for f in sub_flags]
    vertices, _, _ = generalized_vertices_and_F(p)
    fden = f_denominator(p, vertices)
    result = {"N_max": n_max, "F_denominator": fden}
    if not all(g.finite for g in groups):
        result.update(verdict="undetermined", N=None,
                      reason="some flag group has infinite index (C fails)")
        return result
    f = concrete[0]
    grp = flag_group(p, Flag(f.members, f.normals))
    reps = [mat_vec(p.scheme.proj_internal, r) for r in coset_representatives(grp.lattice)]
    for N in range(1, n_max + 1):
        for rep in reps:
            x = [a + b / N for a, b in zip(f.vertex, rep)]
            if _vertex_membership(p, x, p.hyperplanes, N):
                verdict = "homogeneous" if N == 1 else "weakly(%d)" % N
                result.update(verdict=verdict, N=N,
                              common_point=[c.to_strings() for c in x])
                return result
    result.update(verdict="not-within-bound", N=None)
    return result


# ---------------------------------------------------------------- report

def analyze(s, n_max=12):
    """Full algebraic report as a JSON-ready dict."""
    p = prepare(s)
    sc = p.scheme
    rep = complexity_exponent(p)
    sub_flags, concrete = enumerate_flags(p)
    groups = [flag_group(p, f) for f in sub_flags]
    factors = find_decomposition(p)
    vertices, F, split = generalized_vertices_and_F(p, factors)
    homog = check_weak_homogeneity(p, n_max)
    all_finite = all(g.finite for g in groups)
    stabilisers = []
    for i, st in enumerate(rep.stabilisers):
        entry = st.to_json()
        entry["alpha_H"] = rep.alpha_H[i]
        stabilisers.append(entry)
    out = {
        "k": sc.k, "d": sc.d, "n": sc.n,
        "alpha": rep.alpha,
        "C": rep.C,
        "n_subspaces": len(p.subspaces),
        "n_hyperplanes": len(p.hyperplanes),
        "subspaces": [[a.to_strings() for a in v] for v in p.subspaces],
        "stabilisers": stabilisers,
        "hyperplane_spanning": rep.hyperplane_spanning,
        "flags": [{"subspaces": list(f.members), "alpha_f": a,
                   "flag_group_index": g.index}
                  for f, a, g in zip(sub_flags, rep.alpha_f, groups)],
        "flag_consequences": rep.consequences,
        "all_flag_groups_finite": all_finite,
        "decomposition": "indecomposable" if len(factors) == 1 else "decomposable",
        "decomposition_detail": decomposition_json(factors, sc.k),
        "homogeneity": homog["verdict"],
        "homogeneity_detail": homog,
        "vertices": [[x.to_strings() for x in v] for v in vertices],
        "F": [[x.to_strings() for x in v] for v in F],
        "unlabelled": sc is not p.original,
    }
    if split is not None:
        out["F_split"] = [[[x.to_strings() for x in part] for part in parts] for parts in split]
    return out
