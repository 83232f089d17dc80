"""Cut-and-project schemes over Z^k: validation, star map, cyclic reduction,
label removal and point-pattern generation."""
from fractions import Fraction
from itertools import product
import json

import numpy as np

from .algebra import (NumberField, IntLattice, compare, dot, field_rank,
                      integer_kernel, rational_restriction, mat_vec, _det_fraction)
from .enumeration import lattice_points_in_box
from .geometry import (Window, WindowPolytope, InvalidWindow, supporting_hyperplanes,
                       subspace_key)


class SchemeFormatError(ValueError):
    """Malformed scheme file (maps to exit code 2)."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class InvalidScheme(ValueError):
    """Scheme data that violates a structural requirement (exit code 1)."""


class SingularityError(ValueError):
    def __init__(self, coords, message=None):
        self.coords = tuple(int(x) for x in coords)
        super().__init__(message or "lattice point %s projects onto the window boundary"
                         % (list(self.coords),))


class CyclicData:
    def __init__(self, modulus, kappa, windows, shifts):
        self.modulus = int(modulus)
        self.kappa = tuple(int(x) for x in kappa)
        self.windows = dict(windows)
        self.shifts = {int(g): tuple(int(x) for x in v) for g, v in shifts.items()}

    def residue(self, gamma):
        return sum(a * b for a, b in zip(self.kappa, gamma)) % self.modulus


class Scheme:
    """Lattice Z^k with projections to physical (d) and internal (n) space."""

    def __init__(self, field, k, d, n, proj_physical, proj_internal, window, cyclic=None,
                 parent=None):
        self.field = field
        self.k, self.d, self.n = int(k), int(d), int(n)
        self.proj_physical = [list(r) for r in proj_physical]
        self.proj_internal = [list(r) for r in proj_internal]
        self.window = window
        self.cyclic = cyclic
        # (basis rows, shift per piece) linking a reduced scheme to its source
        self.parent = parent
        if self.k != self.d + self.n:
            raise InvalidScheme("k must equal d + n")
        if len(self.proj_physical) != self.d or any(len(r) != self.k for r in self.proj_physical):
            raise InvalidScheme("proj_physical must be d x k")
        if len(self.proj_internal) != self.n or any(len(r) != self.k for r in self.proj_internal):
            raise InvalidScheme("proj_internal must be n x k")
        if window is not None and window.dim != self.n:
            raise InvalidScheme("window dimension differs from n")
        self._float = None

    @property
    def stacked(self):
        return self.proj_physical + self.proj_internal

    def float_matrix(self):
        if self._float is None:
            self._float = np.array([[float(x) for x in row] for row in self.stacked])
        return self._float

    def physical(self, gamma):
        return mat_vec(self.proj_physical, [int(x) for x in gamma])

    def internal(self, gamma):
        return mat_vec(self.proj_internal, [int(x) for x in gamma])

    def with_window(self, window):
        return Scheme(self.field, self.k, self.d, self.n, self.proj_physical,
                      self.proj_internal, window, None, self.parent)


def star_map(s, x):
    """Internal image of the lattice vector x."""
    return s.internal(x)


# ---------------------------------------------------------------- validation

def _field_kernel_basis(mat, k, field):
    from .geometry import _field_nullspace
    return _field_nullspace(mat, k, field)


def integer_solvable(row, value):
    """Is there gamma in Z^k with row . gamma = value (row, value over the field)?"""
    cols = rational_restriction([row])
    k = len(row)
    gens = [[cols[t][j] for t in range(len(cols))] for j in range(k)]
    lat = IntLattice(len(cols), gens)
    return lat.contains(list(value.c))


def singular_hyperplanes(s):
    """Supporting hyperplanes that contain a point of the projected lattice."""
    if s.window is None:
        return []
    hs, _ = supporting_hyperplanes(s.window)
    out = []
    for h in hs:
        row = [dot(h.normal, [s.proj_internal[i][j] for i in range(s.n)]) for j in range(s.k)]
        if integer_solvable(row, h.offset):
            out.append(h)
    return out


def validate_scheme(s):
    """Check the standing assumptions; returns a JSON-ready report dict."""
    checks = {}
    failures = []
    k = s.k
    if field_rank(s.stacked) < k:
        checks["stacked_invertible"] = False
        failures.append("stacked projection matrix is singular")
    else:
        checks["stacked_invertible"] = True
    ker_phys = integer_kernel(rational_restriction(s.proj_physical), k)
    checks["physical_injective"] = ker_phys.rank == 0
    if ker_phys.rank:
        failures.append("physical projection is not injective on Z^k (kernel %s)"
                        % ker_phys.basis_strings())
    ker_int = integer_kernel(rational_restriction(s.proj_internal), k)
    checks["internal_injective"] = ker_int.rank == 0
    if ker_int.rank:
        failures.append("internal projection is not injective on Z^k (kernel %s)"
                        % ker_int.basis_strings())
    # integer vectors inside the row space of the internal projection
    comp = _field_kernel_basis(s.proj_internal, k, s.field)
    if comp:
        dense_obstruction = integer_kernel(rational_restriction(comp), k)
    else:
        dense_obstruction = IntLattice.standard(k)
    checks["internal_dense"] = dense_obstruction.rank == 0
    if dense_obstruction.rank:
        failures.append("projected lattice is not dense in internal space "
                        "(integer functionals %s)" % dense_obstruction.basis_strings())
    report = {"valid": not failures, "checks": checks, "failures": failures}
    if s.window is not None:
        sing = singular_hyperplanes(s)
        report["nonsingular"] = not sing
        report["singular_hyperplanes"] = [h.to_json() for h in sing]
    return report


# ---------------------------------------------------------------- cyclic reduction

def reduce_cyclic(s):
    """Remove a cyclic internal component by shifting every residue window
    into residue zero and restricting to the kernel of kappa."""
    cyc = s.cyclic
    if cyc is None:
        return s
    m = cyc.modulus
    if m < 1:
        raise InvalidScheme("cyclic modulus must be positive")
    k = s.k
    if m > 1:
        from math import gcd
        g = m
        for x in cyc.kappa:
            g = gcd(g, x)
        if g != 1:
            raise InvalidScheme("kappa is not surjective onto Z/%dZ" % m)
    pieces = []
    shifts = []
    for g in sorted(cyc.windows):
        win = cyc.windows[g]
        if win is None or not win.pieces:
            continue
        if g not in cyc.shifts and g % m == 0:
            cyc.shifts[g] = (0,) * k
        if g not in cyc.shifts:
            raise InvalidScheme("missing shift for residue %d" % g)
        gamma = cyc.shifts[g]
        if cyc.residue(gamma) != g % m:
            raise InvalidScheme("shift for residue %d has residue %d" % (g, cyc.residue(gamma)))
        offset = [-x for x in s.internal(gamma)]
        for p in win.pieces:
            pieces.append(p.translate(offset))
            shifts.append(gamma)
    if not pieces:
        raise InvalidScheme("cyclic data has no nonempty window")
    window = Window(pieces)
    if m == 1:
        return Scheme(s.field, k, s.d, s.n, s.proj_physical, s.proj_internal, window, None,
                      s.parent)
    # kernel of gamma -> kappa . gamma mod m, via the kernel of (kappa | -m)
    ker = integer_kernel([list(cyc.kappa) + [-m]], k + 1)
    basis = IntLattice(k, [list(b[:k]) for b in ker.basis]).basis
    bmat = [[int(x) for x in b] for b in basis]
    phys = [[sum_field(s.field, row, b) for b in bmat] for row in s.proj_physical]
    intl = [[sum_field(s.field, row, b) for b in bmat] for row in s.proj_internal]
    parent = {"basis": bmat, "piece_shifts": shifts, "modulus": m}
    return Scheme(s.field, k, s.d, s.n, phys, intl, window, None, parent)


def sum_field(field, row, coeffs):
    acc = field.zero()
    for a, c in zip(row, coeffs):
        if c:
            acc = acc + a * c
    return acc


def lattice_index(basis_rows):
    return abs(int(_det_fraction(basis_rows)))


# ---------------------------------------------------------------- unlabel

def _shells(k, bound):
    for radius in range(1, bound + 1):
        shell = [z for z in product(range(-radius, radius + 1), repeat=k)
                 if max(abs(x) for x in z) == radius]
        shell.sort(key=lambda z: (sum(abs(x) for x in z), z))
        for z in shell:
            yield z


def _boxes_apart(a, b):
    (alo, ahi), (blo, bhi) = a, b
    for i in range(len(alo)):
        if compare(ahi[i], blo[i]) < 0 or compare(bhi[i], alo[i]) < 0:
            return True
    return False


def _float_box(box):
    return np.array([float(x) for x in box[0]]), np.array([float(x) for x in box[1]])


def unlabel(s, bound=10):
    """Translate labelled pieces by projected lattice vectors until they are
    pairwise disjoint, then drop the labels."""
    win = s.window
    labels = {p.label for p in win.pieces}
    if len(win.pieces) == 1 or len(labels) <= 1:
        out = s.with_window(Window([WindowPolytope(p.halfspaces, p.vertices, None)
                                    for p in win.pieces]))
        out.unlabel_shifts = [(0,) * s.k] * len(win.pieces)
        return out
    _, subs_before = supporting_hyperplanes(win)
    intl = s.float_matrix()[s.d:]
    placed, boxes, fboxes, shifts = [], [], [], []
    for piece in win.pieces:
        box = piece.bounding_box()
        flo, fhi = _float_box(box)
        found = None
        if all(_boxes_apart(box, b) for b in boxes):
            found = (0,) * s.k
        else:
            for z in _shells(s.k, bound):
                t = intl @ np.array(z, dtype=float)
                lo, hi = flo + t, fhi + t
                if not all(np.any(hi < blo - 1e-9) or np.any(bhi < lo - 1e-9)
                           for blo, bhi in fboxes):
                    continue
                shift = s.internal(z)
                moved = ([a + c for a, c in zip(box[0], shift)],
                         [a + c for a, c in zip(box[1], shift)])
                if all(_boxes_apart(moved, b) for b in boxes):
                    found = tuple(z)
                    break
        if found is None:
            raise InvalidWindow("no separating lattice translate within coordinate bound %d"
                                % bound)
        shift = s.internal(found)
        moved_piece = piece.translate(shift) if any(found) else piece
        placed.append(moved_piece)
        mb = moved_piece.bounding_box()
        boxes.append(mb)
        fboxes.append(_float_box(mb))
        shifts.append(found)
    pieces = [WindowPolytope(p.halfspaces, p.vertices, None) for p in placed]
    out_window = Window(pieces)
    _, subs_after = supporting_hyperplanes(out_window)
    if [subspace_key(v) for v in subs_before] != [subspace_key(v) for v in subs_after]:
        raise InvalidWindow("label removal changed the supporting subspaces")
    out = s.with_window(out_window)
    out.unlabel_shifts = shifts
    return out


# ---------------------------------------------------------------- patterns

class PointPattern:
    """Points of a cut-and-project set inside the physical box of radius L.

    `coords` holds lattice coordinates sorted lexicographically, `physical`
    float positions, and `label_index` the containing window piece.
    """

    def __init__(self, scheme, L, coords, physical, label_index):
        self.scheme = scheme
        self.L = L
        self.coords = coords
        self.physical = physical
        self.label_index = label_index

    def __len__(self):
        return len(self.coords)

    def label(self, i):
        return self.scheme.window.pieces[int(self.label_index[i])].label

    def labels(self):
        return [self.label(i) for i in range(len(self))]

    def exact_physical(self, i):
        return self.scheme.physical(self.coords[i])


def _piece_tables(window):
    tabs = []
    for p in window.pieces:
        normals = []
        offsets = []
        for h, side in p.halfspaces:
            sgn = 1.0 if side == "le" else -1.0
            normals.append([sgn * float(a) for a in h.normal])
            offsets.append(sgn * float(h.offset))
        tabs.append((np.array(normals), np.array(offsets)))
    return tabs


def classify_internal(s, coords, internal, tol=1e-9):
    """Piece index containing each internal point (-1 outside), exact on ties.

    Raises SingularityError when a point lies on the window boundary.
    """
    window = s.window
    tabs = _piece_tables(window)
    out = np.full(len(coords), -1, dtype=np.int64)
    unsure = np.zeros(len(coords), dtype=bool)
    scale = 1.0 + np.abs(internal).max(axis=1) if len(coords) else np.zeros(0)
    for idx, (nrm, off) in enumerate(tabs):
        vals = internal @ nrm.T - off[None, :]
        margin = tol * scale[:, None] * (1.0 + np.abs(nrm).sum(axis=1))[None, :]
        inside = np.all(vals < -margin, axis=1)
        outside = np.any(vals > margin, axis=1)
        out[inside] = idx
        unsure |= ~inside & ~outside
    for i in np.nonzero(unsure & (out < 0))[0]:
        z = coords[i]
        x = s.internal(z)
        hit = -1
        for idx, p in enumerate(window.pieces):
            if p.contains_interior(x):
                hit = idx
                break
            if p.contains_closed(x):
                raise SingularityError(z)
        out[i] = hit
    return out


def generate_pattern(s, L, workers=1):
    """All lattice points with physical max-norm <= L and internal image in int(W)."""
    L = Fraction(L)
    if s.window is None:
        raise InvalidScheme("scheme has no window (reduce the cyclic component first)")
    A = s.float_matrix()
    lo_w, hi_w = s.window.bounding_box()
    lo = [-float(L)] * s.d + [float(x) for x in lo_w]
    hi = [float(L)] * s.d + [float(x) for x in hi_w]
    coords = lattice_points_in_box(A, lo, hi, range(s.d, s.k), workers=workers)
    y = coords.astype(float) @ A.T if len(coords) else np.zeros((0, s.k))
    phys = y[:, :s.d]
    # physical box: settle near-boundary points exactly
    near = np.any(np.abs(np.abs(phys) - float(L)) <= 1e-9 * (1 + float(L)), axis=1)
    keep = np.all(np.abs(phys) <= float(L) + 1e-9 * (1 + float(L)), axis=1)
    for i in np.nonzero(near & keep)[0]:
        ex = s.physical(coords[i])
        if any(compare(abs(v), L) > 0 for v in ex):
            keep[i] = False
    coords, y = coords[keep], y[keep]
    labels = classify_internal(s, coords, y[:, s.d:])
    inside = labels >= 0
    return PointPattern(s, L, coords[inside], y[inside, :s.d], labels[inside])


# ---------------------------------------------------------------- file format

_TOP_KEYS = {"field", "k", "d", "n", "proj_physical", "proj_internal", "window", "cyclic"}


def _scalar(field, obj, where):
    if isinstance(obj, list):
        if len(obj) != field.degree:
            raise SchemeFormatError("%s: expected %d coefficients" % (where, field.degree))
        try:
            return field.scalar(obj)
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemeFormatError("%s: %s" % (where, exc))
    if isinstance(obj, (str, int)) and not isinstance(obj, bool):
        try:
            return field.rational(Fraction(obj))
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemeFormatError("%s: %s" % (where, exc))
    raise SchemeFormatError("%s: scalar must be a coefficient array" % where)


def _check_keys(obj, allowed, where):
    if not isinstance(obj, dict):
        raise SchemeFormatError("%s must be an object" % where)
    extra = set(obj) - set(allowed)
    if extra:
        raise SchemeFormatError("%s: unknown keys %s" % (where, sorted(extra)))


def _parse_window(field, n, arr, where):
    if not isinstance(arr, list) or not arr:
        raise SchemeFormatError("%s must be a nonempty array" % where)
    pieces = []
    for i, obj in enumerate(arr):
        w = "%s[%d]" % (where, i)
        _check_keys(obj, {"label", "vertices", "halfspaces"}, w)
        label = obj.get("label")
        if label is not None and not isinstance(label, str):
            raise SchemeFormatError("%s.label must be a string" % w)
        if ("vertices" in obj) == ("halfspaces" in obj):
            raise SchemeFormatError("%s needs exactly one of vertices/halfspaces" % w)
        try:
            if "vertices" in obj:
                verts = []
                for j, v in enumerate(obj["vertices"]):
                    if not isinstance(v, list) or len(v) != n:
                        raise SchemeFormatError("%s.vertices[%d] must have %d entries" % (w, j, n))
                    verts.append(tuple(_scalar(field, x, "%s.vertices[%d]" % (w, j)) for x in v))
                pieces.append(WindowPolytope.from_vertices(verts, label))
            else:
                hs = []
                for j, h in enumerate(obj["halfspaces"]):
                    hw = "%s.halfspaces[%d]" % (w, j)
                    _check_keys(h, {"normal", "offset", "side"}, hw)
                    if h.get("side") not in ("le", "ge"):
                        raise SchemeFormatError("%s.side must be 'le' or 'ge'" % hw)
                    nrm = h.get("normal")
                    if not isinstance(nrm, list) or len(nrm) != n:
                        raise SchemeFormatError("%s.normal must have %d entries" % (hw, n))
                    hs.append(([_scalar(field, x, hw) for x in nrm],
                               _scalar(field, h.get("offset"), hw), h["side"]))
                pieces.append(WindowPolytope.from_halfspaces(hs, label))
        except InvalidWindow as exc:
            raise InvalidScheme("%s: %s" % (w, exc))
    try:
        return Window(pieces)
    except InvalidWindow as exc:
        raise InvalidScheme("%s: %s" % (where, exc))


def _matrix(field, obj, rows, cols, where):
    if not isinstance(obj, list) or len(obj) != rows:
        raise InvalidScheme("%s must have %d rows" % (where, rows))
    out = []
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != cols:
            raise InvalidScheme("%s row %d must have %d entries" % (where, i, cols))
        out.append([_scalar(field, x, "%s[%d][%d]" % (where, i, j)) for j, x in enumerate(row)])
    return out


def parse_scheme(obj):
    _check_keys(obj, _TOP_KEYS, "scheme")
    for key in ("field", "k", "d", "n", "proj_physical", "proj_internal"):
        if key not in obj:
            raise SchemeFormatError("missing key %r" % key)
    fobj = obj["field"]
    _check_keys(fobj, {"minpoly", "root"}, "field")
    root = fobj.get("root")
    _check_keys(root, {"lo", "hi"}, "field.root")
    try:
        field = NumberField(fobj["minpoly"], Fraction(str(root["lo"])), Fraction(str(root["hi"])))
    except (KeyError, TypeError) as exc:
        raise SchemeFormatError("field: %s" % exc)
    except ValueError as exc:
        raise InvalidScheme("field: %s" % exc)
    k, d, n = obj["k"], obj["d"], obj["n"]
    if not all(isinstance(x, int) and not isinstance(x, bool) and x >= 1 for x in (k, d, n)):
        raise SchemeFormatError("k, d, n must be positive integers")
    if k != d + n:
        raise InvalidScheme("k must equal d + n")
    phys = _matrix(field, obj["proj_physical"], d, k, "proj_physical")
    intl = _matrix(field, obj["proj_internal"], n, k, "proj_internal")
    window = None
    if "window" in obj:
        window = _parse_window(field, n, obj["window"], "window")
    cyclic = None
    if "cyclic" in obj:
        cobj = obj["cyclic"]
        _check_keys(cobj, {"modulus", "kappa", "windows", "shifts"}, "cyclic")
        try:
            m = int(cobj["modulus"])
            kappa = [int(x) for x in cobj["kappa"]]
            wins = {int(g): _parse_window(field, n, w, "cyclic.windows[%s]" % g)
                    for g, w in cobj["windows"].items()}
            shifts = {int(g): [int(x) for x in v] for g, v in cobj.get("shifts", {}).items()}
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            if isinstance(exc, (InvalidScheme, SchemeFormatError)):
                raise
            raise SchemeFormatError("cyclic: %s" % exc)
        if len(kappa) != k:
            raise InvalidScheme("cyclic.kappa must have length k")
        cyclic = CyclicData(m, kappa, wins, shifts)
    if window is None and cyclic is None:
        raise SchemeFormatError("missing key 'window'")
    return Scheme(field, k, d, n, phys, intl, window, cyclic)


def load_scheme(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SchemeFormatError("cannot read %s: %s" % (path, exc))
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemeFormatError("JSON parse error: %s" % exc.msg, exc.lineno, exc.colno)
    return parse_scheme(obj)


def scalar_json(x):
    return x.to_strings()


def scheme_to_json(s):
    """Serialise a scheme (without cyclic data) back to the file format."""
    f = s.field
    lo, hi = f.theta_interval()
    out = {
        "field": {"minpoly": list(f.minpoly), "root": {"lo": str(lo), "hi": str(hi)}},
        "k": s.k, "d": s.d, "n": s.n,
        "proj_physical": [[scalar_json(x) for x in row] for row in s.proj_physical],
        "proj_internal": [[scalar_json(x) for x in row] for row in s.proj_internal],
    }
    if s.window is not None:
        out["window"] = [_piece_json(p) for p in s.window.pieces]
    return out


def _piece_json(p):
    obj = {"vertices": [[scalar_json(x) for x in v] for v in p.vertices]}
    if p.label is not None:
        obj["label"] = p.label
    return obj
