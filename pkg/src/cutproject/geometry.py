"""Exact convex pieces of the window, their supporting hyperplanes and
face censuses of hyperplane arrangements in internal dimension one or two."""
from functools import cmp_to_key
from itertools import combinations
import math

from .algebra import compare, field_rank, field_solve, dot


class InvalidWindow(ValueError):
    pass


class UnsupportedDimension(ValueError):
    pass


def _canonical_normal(normal):
    """Scale so the first nonzero coordinate is 1; returns (normal, factor)."""
    for x in normal:
        if not x.is_zero():
            inv = x.inverse()
            return tuple(y * inv for y in normal), inv
    raise InvalidWindow("zero normal vector")


def _key(x):
    return tuple(x.c)


def vec_key(v):
    return tuple(tuple(x.c) for x in v)


class Hyperplane:
    """{x : normal . x = offset} with the first nonzero normal entry equal to 1."""

    __slots__ = ("normal", "offset", "_hash")

    def __init__(self, normal, offset, canonical=False):
        if canonical:
            self.normal = tuple(normal)
            self.offset = offset
        else:
            n, f = _canonical_normal(normal)
            self.normal = n
            self.offset = offset * f
        self._hash = None

    @property
    def dim(self):
        return len(self.normal)

    def subspace(self):
        return self.normal

    def translate(self, shift):
        """The hyperplane H + shift."""
        return Hyperplane(self.normal, self.offset + dot(self.normal, shift), canonical=True)

    def value(self, x):
        return dot(self.normal, x) - self.offset

    def key(self):
        return (tuple(_key(a) for a in self.normal), _key(self.offset))

    def __eq__(self, other):
        return isinstance(other, Hyperplane) and self.key() == other.key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __repr__(self):
        return "Hyperplane(%s . x = %s)" % (
            [round(a.approx(), 6) for a in self.normal], round(self.offset.approx(), 6))

    def to_json(self):
        return {"normal": [a.to_strings() for a in self.normal], "offset": self.offset.to_strings()}


def subspace_key(normal):
    return tuple(_key(a) for a in normal)


def _lex_cmp(u, v):
    for a, b in zip(u, v):
        c = compare(a, b)
        if c:
            return c
    return 0


def _field_nullspace(rows, ncols, field):
    a = [list(r) for r in rows]
    pivots = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(a)) if not a[i][col].is_zero()), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = a[r][col].inverse()
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and not a[i][col].is_zero():
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
        if r == len(a):
            break
    out = []
    for fc in range(ncols):
        if fc in pivots:
            continue
        v = [field.zero()] * ncols
        v[fc] = field.one()
        for row, pc in zip(a, pivots):
            v[pc] = -row[fc]
        out.append(v)
    return out


def _affine_rank(points):
    if len(points) <= 1:
        return 0
    base = points[0]
    return field_rank([[a - b for a, b in zip(p, base)] for p in points[1:]])


class WindowPolytope:
    """A closed convex polytope in internal space with an optional label.

    `halfspaces` holds (Hyperplane, side) pairs with side 'le' or 'ge'; only
    facet-defining halfspaces are kept.  In dimension two the vertices are in
    counterclockwise order.
    """

    def __init__(self, halfspaces, vertices, label=None):
        self.halfspaces = tuple(halfspaces)
        self.vertices = tuple(tuple(v) for v in vertices)
        self.label = label

    @property
    def dim(self):
        return len(self.vertices[0])

    @property
    def field(self):
        return self.vertices[0][0].field

    @classmethod
    def from_vertices(cls, points, label=None):
        pts = _dedupe_points(points)
        if not pts:
            raise InvalidWindow("empty vertex list")
        n = len(pts[0])
        if _affine_rank(pts) < n:
            raise InvalidWindow("polytope has empty interior")
        if n == 1:
            lo = min(pts, key=cmp_to_key(_lex_cmp))[0]
            hi = max(pts, key=cmp_to_key(_lex_cmp))[0]
            one = lo.field.one()
            hs = [(Hyperplane((one,), lo, True), "ge"), (Hyperplane((one,), hi, True), "le")]
            return cls(_sorted_halfspaces(hs), [(lo,), (hi,)], label)
        if n == 2:
            hull = convex_hull_2d(pts)
            hs = []
            for i in range(len(hull)):
                p, q = hull[i], hull[(i + 1) % len(hull)]
                normal = (q[1] - p[1], p[0] - q[0])
                hs.append(_make_halfspace(normal, dot(normal, p), "le"))
            return cls(_sorted_halfspaces(hs), hull, label)
        return cls._general_from_vertices(pts, label)

    @classmethod
    def _general_from_vertices(cls, pts, label):
        n = len(pts[0])
        field = pts[0][0].field
        facets = {}
        for subset in combinations(range(len(pts)), n):
            base = pts[subset[0]]
            diffs = [[a - b for a, b in zip(pts[i], base)] for i in subset[1:]]
            null = _field_nullspace(diffs, n, field)
            if len(null) != 1:
                continue
            normal = null[0]
            off = dot(normal, base)
            signs = [compare(dot(normal, p), off) for p in pts]
            if any(s > 0 for s in signs) and any(s < 0 for s in signs):
                continue
            side = "ge" if any(s > 0 for s in signs) else "le"
            tight = [p for p, s in zip(pts, signs) if s == 0]
            if _affine_rank(tight) != n - 1:
                continue
            h, sd = _make_halfspace(normal, off, side)
            facets[(h, sd)] = True
        verts = [p for p in pts if _is_vertex(p, facets, n)]
        verts.sort(key=cmp_to_key(_lex_cmp))
        return cls(_sorted_halfspaces(list(facets)), verts, label)

    @classmethod
    def from_halfspaces(cls, halfspaces, label=None):
        """halfspaces: list of (normal, offset, side)."""
        hs = [_make_halfspace(nrm, off, side) for nrm, off, side in halfspaces]
        if not hs:
            raise InvalidWindow("no halfspaces given")
        n = hs[0][0].dim
        cand = []
        for subset in combinations(hs, n):
            mat = [list(h.normal) for h, _ in subset]
            if field_rank(mat) < n:
                continue
            x = field_solve(mat, [h.offset for h, _ in subset])
            if all(_satisfies(h, s, x) for h, s in hs):
                cand.append(tuple(x))
        pts = _dedupe_points(cand)
        if len(pts) <= n or _affine_rank(pts) < n:
            raise InvalidWindow("halfspaces do not bound a polytope with interior")
        poly = cls.from_vertices(pts, label)
        given = {(h.key(), s) for h, s in hs}
        if any((h.key(), s) not in given for h, s in poly.halfspaces):
            raise InvalidWindow("halfspaces describe an unbounded region")
        return poly

    def contains_interior(self, x):
        for h, side in self.halfspaces:
            c = compare(dot(h.normal, x), h.offset)
            if c == 0 or (c > 0) != (side == "ge"):
                return False
        return True

    def contains_closed(self, x):
        for h, side in self.halfspaces:
            c = compare(dot(h.normal, x), h.offset)
            if c != 0 and (c > 0) != (side == "ge"):
                return False
        return True

    def translate(self, shift):
        hs = [(h.translate(shift), s) for h, s in self.halfspaces]
        verts = [tuple(a + b for a, b in zip(v, shift)) for v in self.vertices]
        return WindowPolytope(_sorted_halfspaces(hs), verts, self.label)

    def scaled(self, factor):
        """Image under x -> factor * x for a nonzero scalar factor."""
        pts = [tuple(a * factor for a in v) for v in self.vertices]
        return WindowPolytope.from_vertices(pts, self.label)

    def volume(self):
        if self.dim == 1:
            return self.vertices[1][0] - self.vertices[0][0]
        if self.dim == 2:
            return polygon_area(self.vertices)
        raise UnsupportedDimension("volume only for n <= 2")

    def bounding_box(self):
        n = self.dim
        lo, hi = [], []
        for i in range(n):
            coords = [v[i] for v in self.vertices]
            lo.append(min(coords, key=cmp_to_key(compare)))
            hi.append(max(coords, key=cmp_to_key(compare)))
        return lo, hi


def _is_vertex(p, facets, n):
    tight = [h.normal for (h, _s) in facets if compare(dot(h.normal, p), h.offset) == 0]
    return field_rank(tight) == n if tight else False


def _make_halfspace(normal, offset, side):
    n, f = _canonical_normal(normal)
    off = offset * f
    if f.sign() < 0:
        side = "ge" if side == "le" else "le"
    return (Hyperplane(n, off, True), side)


def _sorted_halfspaces(hs):
    return sorted(hs, key=lambda hsd: (hsd[0].key(), hsd[1]))


def _satisfies(h, side, x):
    c = compare(dot(h.normal, x), h.offset)
    return c == 0 or (c > 0) == (side == "ge")


def _dedupe_points(points):
    seen = {}
    for p in points:
        p = tuple(p)
        seen.setdefault(vec_key(p), p)
    return list(seen.values())


def orientation(o, a, b):
    return ((a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])).sign()


def convex_hull_2d(points):
    """Counterclockwise hull without collinear points (exact)."""
    pts = sorted(_dedupe_points(points), key=cmp_to_key(_lex_cmp))
    if len(pts) < 3:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and orientation(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and orientation(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def polygon_area(verts):
    acc = None
    m = len(verts)
    for i in range(m):
        p, q = verts[i], verts[(i + 1) % m]
        t = p[0] * q[1] - p[1] * q[0]
        acc = t if acc is None else acc + t
    return acc / 2


def polygon_area_float(verts):
    acc = 0.0
    m = len(verts)
    for i in range(m):
        p, q = verts[i], verts[(i + 1) % m]
        acc += p[0] * q[1] - p[1] * q[0]
    return acc / 2


class Window:
    """Finite union of convex pieces whose interiors are pairwise disjoint."""

    def __init__(self, pieces, check=True):
        if not pieces:
            raise InvalidWindow("window needs at least one piece")
        self.pieces = tuple(pieces)
        dims = {p.dim for p in pieces}
        if len(dims) != 1:
            raise InvalidWindow("pieces of different dimensions")
        if check and self.dim <= 2:
            for a, b in combinations(self.pieces, 2):
                if not interiors_disjoint(a, b):
                    raise InvalidWindow("window pieces overlap")

    @property
    def dim(self):
        return self.pieces[0].dim

    @property
    def field(self):
        return self.pieces[0].field

    @property
    def labelled(self):
        return any(p.label is not None for p in self.pieces)

    def contains_interior(self, x):
        return any(p.contains_interior(x) for p in self.pieces)

    def translate(self, shift):
        return Window([p.translate(shift) for p in self.pieces], check=False)

    def volume(self):
        acc = None
        for p in self.pieces:
            v = p.volume()
            acc = v if acc is None else acc + v
        return acc

    def bounding_box(self):
        los, his = zip(*(p.bounding_box() for p in self.pieces))
        n = self.dim
        lo = [min((b[i] for b in los), key=cmp_to_key(compare)) for i in range(n)]
        hi = [max((b[i] for b in his), key=cmp_to_key(compare)) for i in range(n)]
        return lo, hi

    def diameter(self):
        """Max-norm diameter of the union."""
        lo, hi = self.bounding_box()
        return max((b - a for a, b in zip(lo, hi)), key=cmp_to_key(compare))


def interiors_disjoint(a, b):
    """Separating-hyperplane test using facet normals (exact, convex pieces)."""
    for poly, other in ((a, b), (b, a)):
        for h, side in poly.halfspaces:
            vals = [compare(dot(h.normal, v), h.offset) for v in other.vertices]
            if side == "le" and all(c >= 0 for c in vals):
                return True
            if side == "ge" and all(c <= 0 for c in vals):
                return True
    return False


def supporting_hyperplanes(window):
    """Deduplicated supporting hyperplanes and supporting subspaces (normals)."""
    hyper = {}
    for piece in window.pieces:
        if _affine_rank(list(piece.vertices)) < piece.dim:
            raise InvalidWindow("degenerate piece")
        for h, _ in piece.halfspaces:
            hyper.setdefault(h.key(), h)
    hs = [hyper[k] for k in sorted(hyper)]
    subs = {}
    for h in hs:
        subs.setdefault(subspace_key(h.normal), h.normal)
    return hs, [subs[k] for k in sorted(subs)]


# ---------------------------------------------------------------- arrangements

class Census:
    def __init__(self, face_count, min_volume, faces, vertex_count=None, edge_count=None):
        self.face_count = face_count
        self.min_volume = min_volume
        self.faces = faces
        self.vertex_count = vertex_count
        self.edge_count = edge_count

    def __iter__(self):
        return iter((self.face_count, self.min_volume, self.faces))


def arrangement_census(window, cutters, keep_faces=False):
    """Count the open faces of int(W) minus the cutter hyperplanes.

    Returns a Census with the face count, the exact minimal face volume
    (length for n = 1, area for n = 2) and optionally the faces themselves.
    """
    n = window.dim
    if n > 2:
        raise UnsupportedDimension("arrangement census needs internal dimension <= 2")
    uniq = {}
    for c in cutters:
        uniq.setdefault(c.key(), c)
    cutters = [uniq[k] for k in sorted(uniq)]
    faces = []
    total_v = total_e = 0
    for piece in window.pieces:
        if n == 1:
            faces.extend(_split_interval(piece, cutters))
        else:
            f, nv, ne = _split_polygon(piece, cutters)
            faces.extend(f)
            total_v += nv
            total_e += ne
    if n == 1:
        vols = [b - a for a, b in faces]
        faces_out = [((a,), (b,)) for a, b in faces]
    else:
        vols = None
        faces_out = faces
    if n == 1:
        min_vol = min(vols, key=cmp_to_key(compare))
    else:
        approx = [abs(polygon_area_float([(p[0].approx(), p[1].approx()) for p in f])) for f in faces]
        best = min(approx)
        cands = [f for f, a in zip(faces, approx) if a <= best * (1 + 1e-9) + 1e-300]
        exact = [abs(polygon_area(f)) for f in cands]
        min_vol = min(exact, key=cmp_to_key(compare))
    ordered = None
    if keep_faces:
        ordered = sorted(faces_out, key=lambda f: sorted(tuple(x.approx() for x in p) for p in f))
    return Census(len(faces_out), min_vol, ordered, total_v or None, total_e or None)


def _split_interval(piece, cutters):
    lo, hi = piece.vertices[0][0], piece.vertices[1][0]
    pts = {}
    for c in cutters:
        x = c.offset / c.normal[0]
        if compare(lo, x) < 0 and compare(x, hi) < 0:
            pts.setdefault(_key(x), x)
    cuts = sorted(pts.values(), key=cmp_to_key(compare))
    bounds = [lo] + cuts + [hi]
    return [(bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1)]


def _line_intersection(h1, h2):
    a, b = h1.normal
    c, d = h2.normal
    det = a * d - b * c
    if det.is_zero():
        return None
    inv = det.inverse()
    x = (h1.offset * d - b * h2.offset) * inv
    y = (a * h2.offset - h1.offset * c) * inv
    return (x, y)


def _split_polygon(piece, cutters):
    verts = list(piece.vertices)
    m = len(verts)
    field = piece.field
    active = []
    for c in cutters:
        signs = [compare(dot(c.normal, v), c.offset) for v in verts]
        if any(s < 0 for s in signs) and any(s > 0 for s in signs):
            active.append(c)
    # boundary lines, one per edge (edge i joins verts[i] -> verts[i+1])
    edge_lines = []
    for i in range(m):
        p, q = verts[i], verts[(i + 1) % m]
        edge_lines.append(Hyperplane((q[1] - p[1], p[0] - q[0]),
                                     (q[1] - p[1]) * p[0] + (p[0] - q[0]) * p[1]))
    points = {}

    def intern(p):
        k = vec_key(p)
        if k not in points:
            points[k] = p
        return k

    for v in verts:
        intern(v)
    on_edge = [[] for _ in range(m)]
    chords = []
    for c in active:
        ends = []
        for i in range(m):
            p, q = verts[i], verts[(i + 1) % m]
            sp = compare(dot(c.normal, p), c.offset)
            sq = compare(dot(c.normal, q), c.offset)
            if sp == 0:
                ends.append((intern(p), None))
            elif sp * sq < 0:
                x = _line_intersection(c, edge_lines[i])
                k = intern(x)
                on_edge[i].append(k)
                ends.append((k, i))
        keys = list(dict.fromkeys(k for k, _ in ends))
        chords.append((c, keys))
    line_pts = [set(keys) for _, keys in chords]
    for i in range(len(chords)):
        ci = chords[i][0]
        for j in range(i + 1, len(chords)):
            x = _line_intersection(ci, chords[j][0])
            if x is None:
                continue
            if not piece.contains_interior(x):
                continue
            k = intern(x)
            line_pts[i].add(k)
            line_pts[j].add(k)
    edges = set()
    for (c, _), pts in zip(chords, line_pts):
        u = (-c.normal[1], c.normal[0])
        order = sorted(pts, key=cmp_to_key(lambda a, b: compare(dot(u, points[a]), dot(u, points[b]))))
        for a, b in zip(order, order[1:]):
            edges.add((a, b) if a < b else (b, a))
    for i in range(m):
        p, q = verts[i], verts[(i + 1) % m]
        d = (q[0] - p[0], q[1] - p[1])
        inner = sorted(set(on_edge[i]), key=cmp_to_key(
            lambda a, b: compare(dot(d, points[a]), dot(d, points[b]))))
        seq = [vec_key(p)] + inner + [vec_key(q)]
        for a, b in zip(seq, seq[1:]):
            edges.add((a, b) if a < b else (b, a))
    faces = _trace_faces(points, edges)
    return faces, len(points), len(edges)


def _trace_faces(points, edges):
    approx = {k: (p[0].approx(), p[1].approx()) for k, p in points.items()}
    nbrs = {}
    for a, b in edges:
        nbrs.setdefault(a, []).append(b)
        nbrs.setdefault(b, []).append(a)
    for a, lst in nbrs.items():
        ax, ay = approx[a]
        lst.sort(key=lambda b: math.atan2(approx[b][1] - ay, approx[b][0] - ax))
    pos = {a: {b: i for i, b in enumerate(lst)} for a, lst in nbrs.items()}
    seen = set()
    faces = []
    for a, b in sorted(edges):
        for start in ((a, b), (b, a)):
            if start in seen:
                continue
            cycle = []
            u, v = start
            while (u, v) not in seen:
                seen.add((u, v))
                cycle.append(u)
                lst = nbrs[v]
                i = pos[v][u]
                w = lst[(i - 1) % len(lst)]
                u, v = v, w
            area = polygon_area_float([approx[k] for k in cycle])
            if area > 0:
                faces.append([points[k] for k in cycle])
    return faces
