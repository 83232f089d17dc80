"""Exact arithmetic in a real number field Q(theta) and integer lattice algebra.

Field elements are stored in the power basis 1, theta, ..., theta^(g-1) with
rational coefficients.  Signs are decided by bisecting a rational interval
that isolates theta, so every comparison is exact.
"""
from fractions import Fraction
from math import gcd
import threading


class FieldMismatch(ValueError):
    pass


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def _poly_eval(coeffs_desc, x):
    acc = Fraction(0)
    for c in coeffs_desc:
        acc = acc * x + c
    return acc


def _interval_mul(a, b):
    prods = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return (min(prods), max(prods))


class NumberField:
    """Q(theta) for the unique root theta of `minpoly` inside [lo, hi].

    `minpoly` lists integer coefficients from the leading one down, and must
    be monic.  Degree one gives plain rational arithmetic.
    """

    def __init__(self, minpoly, lo, hi, check=True):
        poly = [int(c) for c in minpoly]
        while poly and poly[0] == 0:
            poly.pop(0)
        if len(poly) < 2:
            raise ValueError("minimal polynomial must have degree >= 1")
        if poly[0] != 1:
            raise ValueError("minimal polynomial must be monic")
        self.minpoly = tuple(poly)
        self.degree = len(poly) - 1
        lo, hi = _frac(lo), _frac(hi)
        if lo > hi:
            lo, hi = hi, lo
        if check:
            self._check(lo, hi)
        self._lock = threading.Lock()
        self._lo, self._hi = lo, hi
        g = self.degree
        # theta^(g+j) expressed in the power basis, j = 0 .. g-2
        low = [Fraction(-c) for c in reversed(poly[1:])]
        table = []
        cur = list(low)
        for _ in range(max(g - 1, 0)):
            table.append(tuple(cur))
            top = cur[-1]
            cur = [Fraction(0)] + cur[:-1]
            cur = [cur[t] + top * low[t] for t in range(g)]
        self._reduce = table
        if g == 1:
            self._exact_root = Fraction(-poly[1])
        else:
            self._exact_root = None
        self._theta_float = float(self.theta_interval(Fraction(1, 10 ** 20))[0])
        self._zero = FieldScalar(self, (Fraction(0),) * g)
        self._one = FieldScalar(self, (Fraction(1),) + (Fraction(0),) * (g - 1))

    def _check(self, lo, hi):
        import sympy

        x = sympy.Symbol("x")
        p = sympy.Poly(list(self.minpoly), x, domain="ZZ")
        if not p.is_irreducible:
            raise ValueError("minimal polynomial %s is reducible" % (self.minpoly,))
        if self.degree == 1:
            root = Fraction(-self.minpoly[1])
            if not lo <= root <= hi:
                raise ValueError("root interval does not contain the root")
            return
        count = p.count_roots(sympy.Rational(lo.numerator, lo.denominator),
                              sympy.Rational(hi.numerator, hi.denominator))
        if count != 1:
            raise ValueError("root interval [%s, %s] isolates %d roots" % (lo, hi, count))

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, NumberField) or other.minpoly != self.minpoly:
            return False
        a = self.theta_interval(Fraction(1, 10 ** 30))
        b = other.theta_interval(Fraction(1, 10 ** 30))
        return a[0] <= b[1] and b[0] <= a[1]

    def __hash__(self):
        return hash(self.minpoly)

    def __repr__(self):
        return "NumberField(%s, theta~%.12g)" % (list(self.minpoly), self._theta_float)

    def theta_interval(self, width=None):
        """Current isolating interval, refined until shorter than `width`."""
        if self._exact_root is not None:
            return (self._exact_root, self._exact_root)
        with self._lock:
            lo, hi = self._lo, self._hi
            if width is not None and hi - lo > width:
                s_lo = _poly_eval(self.minpoly, lo)
                while hi - lo > width:
                    mid = (lo + hi) / 2
                    s_mid = _poly_eval(self.minpoly, mid)
                    if s_mid == 0:
                        lo = hi = mid
                        break
                    if (s_mid > 0) == (s_lo > 0):
                        lo, s_lo = mid, s_mid
                    else:
                        hi = mid
                self._lo, self._hi = lo, hi
            return (lo, hi)

    @property
    def theta_float(self):
        return self._theta_float

    def zero(self):
        return self._zero

    def one(self):
        return self._one

    def theta(self):
        if self.degree == 1:
            return self.rational(self._exact_root)
        c = [Fraction(0)] * self.degree
        c[1] = Fraction(1)
        return FieldScalar(self, tuple(c))

    def rational(self, q):
        c = [Fraction(0)] * self.degree
        c[0] = _frac(q)
        return FieldScalar(self, tuple(c))

    def scalar(self, coeffs):
        coeffs = [_frac(c) for c in coeffs]
        if len(coeffs) != self.degree:
            raise ValueError("expected %d coefficients, got %d" % (self.degree, len(coeffs)))
        return FieldScalar(self, tuple(coeffs))

    def coerce(self, x):
        if isinstance(x, FieldScalar):
            if x.field is not self and x.field != self:
                raise FieldMismatch("scalar belongs to a different field")
            return x
        return self.rational(x)


class FieldScalar:
    __slots__ = ("field", "c", "_hash")

    def __init__(self, field, coeffs):
        self.field = field
        self.c = coeffs
        self._hash = None

    def _other(self, other):
        if isinstance(other, FieldScalar):
            if other.field is not self.field and other.field != self.field:
                raise FieldMismatch("operands live in different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.rational(other)
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldScalar(self.field, tuple(a + b for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldScalar(self.field, tuple(a - b for a, b in zip(self.c, o.c)))

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return o - self

    def __neg__(self):
        return FieldScalar(self.field, tuple(-a for a in self.c))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return FieldScalar(self.field, tuple(a * other for a in self.c))
        o = self._other(other)
        if o is NotImplemented:
            return o
        g = self.field.degree
        if g == 1:
            return FieldScalar(self.field, (self.c[0] * o.c[0],))
        prod = [Fraction(0)] * (2 * g - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(o.c):
                    if b:
                        prod[i + j] += a * b
        out = prod[:g]
        for j, row in enumerate(self.field._reduce):
            top = prod[g + j]
            if top:
                for t in range(g):
                    out[t] += top * row[t]
        return FieldScalar(self.field, tuple(out))

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        g = self.field.degree
        if g == 1:
            return FieldScalar(self.field, (1 / self.c[0],))
        # columns are self * theta^t; solve for the preimage of 1
        cols = []
        cur = self
        th = self.field.theta()
        for _ in range(g):
            cols.append(cur.c)
            cur = cur * th
        mat = [[cols[j][i] for j in range(g)] for i in range(g)]
        rhs = [Fraction(1)] + [Fraction(0)] * (g - 1)
        sol = solve_rational_square(mat, rhs)
        return FieldScalar(self.field, tuple(sol))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return FieldScalar(self.field, tuple(a / other for a in self.c))
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        out = self.field.one()
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def is_zero(self):
        return not any(self.c)

    def is_rational(self):
        return not any(self.c[1:])

    def sign(self):
        if not any(self.c):
            return 0
        f = self.field
        if f.degree == 1:
            return 1 if self.c[0] > 0 else -1
        try:
            th = f.theta_float
            val = 0.0
            mag = 0.0
            p = 1.0
            for a in self.c:
                fa = float(a)
                val += fa * p
                mag += abs(fa * p)
                p *= th
            if abs(val) > 1e-12 * mag + 1e-290:
                return 1 if val > 0 else -1
        except OverflowError:
            pass
        width = None
        while True:
            lo, hi = f.theta_interval(width)
            vlo, vhi = self._interval_value(lo, hi)
            if vlo > 0:
                return 1
            if vhi < 0:
                return -1
            width = (hi - lo) / 16

    def _interval_value(self, lo, hi):
        acc = (Fraction(0), Fraction(0))
        x = (lo, hi)
        for a in reversed(self.c):
            acc = _interval_mul(acc, x)
            acc = (acc[0] + a, acc[1] + a)
        return acc

    def __float__(self):
        f = self.field
        if f.degree == 1:
            return float(self.c[0])
        if self.is_zero():
            return 0.0
        width = Fraction(1, 10 ** 24)
        while True:
            lo, hi = f.theta_interval(width)
            vlo, vhi = self._interval_value(lo, hi)
            mid = (vlo + vhi) / 2
            if vhi - vlo <= abs(mid) * Fraction(1, 10 ** 17) or vhi - vlo < Fraction(1, 10 ** 300):
                return float(mid)
            width = width / 10 ** 8

    def approx(self):
        """Fast double approximation (not certified)."""
        th = self.field.theta_float
        val = 0.0
        p = 1.0
        for a in self.c:
            val += float(a) * p
            p *= th
        return val

    def floor(self):
        m = int(self.approx() // 1)
        while compare(self, self.field.rational(m)) < 0:
            m -= 1
        while compare(self, self.field.rational(m + 1)) >= 0:
            m += 1
        return m

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __eq__(self, other):
        if isinstance(other, FieldScalar):
            if other.field is not self.field and other.field != self.field:
                return False
            return self.c == other.c
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.c[0] == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.c if self.field.degree > 1 else self.c[0])
        return self._hash

    def __lt__(self, other):
        return compare(self, other) < 0

    def __le__(self, other):
        return compare(self, other) <= 0

    def __gt__(self, other):
        return compare(self, other) > 0

    def __ge__(self, other):
        return compare(self, other) >= 0

    def __repr__(self):
        if self.field.degree == 1:
            return "FieldScalar(%s)" % self.c[0]
        return "FieldScalar(%s ~ %.10g)" % ([str(a) for a in self.c], self.approx())

    def to_strings(self):
        return [str(a) for a in self.c]


def compare(a, b):
    """Ordering of real embeddings: -1, 0 or 1."""
    if isinstance(a, FieldScalar):
        b = a._other(b)
    elif isinstance(b, FieldScalar):
        a = b._other(a)
    else:
        return (a > b) - (a < b)
    if a.c == b.c:
        return 0
    return (a - b).sign()


def exact_compare(a, b):
    """Return '<', '=' or '>' for two scalars of the same field."""
    if isinstance(a, FieldScalar) and isinstance(b, FieldScalar):
        if a.field is not b.field and a.field != b.field:
            raise FieldMismatch("cannot compare scalars of different fields")
    return "<=>"[compare(a, b) + 1]


# ---------------------------------------------------------------- rational

def solve_rational_square(mat, rhs):
    """Solve a nonsingular rational system by Gauss-Jordan elimination."""
    n = len(mat)
    a = [[Fraction(x) for x in row] + [Fraction(rhs[i])] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        if p != 1:
            a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


def rational_echelon(rows):
    """Reduced row echelon form; returns (rows, pivot columns)."""
    a = [[Fraction(x) for x in row] for row in rows]
    if not a:
        return [], []
    ncols = len(a[0])
    pivots = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][col]
        a[r] = [x / p for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def rational_rank(rows):
    return len(rational_echelon(rows)[1])


def rational_nullspace(rows, ncols):
    """Basis of the rational kernel of the matrix with the given rows."""
    red, pivots = rational_echelon(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[fc]
        basis.append(v)
    return basis


def rational_solve(rows, rhs):
    """One rational solution of rows * x = rhs, or None if inconsistent."""
    if not rows:
        return None
    ncols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rational_echelon(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, pc in zip(red, pivots):
        x[pc] = row[ncols]
    return x


def common_denominator(values):
    den = 1
    for v in values:
        d = Fraction(v).denominator
        den = den * d // gcd(den, d)
    return den


# ---------------------------------------------------------------- field matrices

def rational_restriction(mat):
    """Expand an m x k matrix over Q(theta) into an (m*g) x k rational matrix.

    Row i becomes g rows, one per power-basis coordinate, so rational vectors
    v satisfy mat * v = 0 exactly when the expanded matrix kills v.
    """
    out = []
    for row in mat:
        if not row:
            out.append([])
            continue
        g = len(row[0].c)
        for t in range(g):
            out.append([x.c[t] for x in row])
    return out


def field_rank(mat):
    """Rank over the field by exact elimination."""
    a = [list(row) for row in mat]
    if not a or not a[0]:
        return 0
    rank = 0
    ncols = len(a[0])
    for col in range(ncols):
        piv = next((r for r in range(rank, len(a)) if not a[r][col].is_zero()), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = a[rank][col].inverse()
        for r in range(rank + 1, len(a)):
            if not a[r][col].is_zero():
                f = a[r][col] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[rank])]
        rank += 1
        if rank == len(a):
            break
    return rank


def field_solve(mat, rhs):
    """Solve a square nonsingular system over the field."""
    n = len(mat)
    a = [list(row) + [rhs[i]] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not a[r][col].is_zero()), None)
        if piv is None:
            raise ZeroDivisionError("singular field system")
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col].inverse()
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and not a[r][col].is_zero():
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


def field_inverse(mat):
    n = len(mat)
    field = mat[0][0].field
    cols = []
    for j in range(n):
        e = [field.one() if i == j else field.zero() for i in range(n)]
        cols.append(field_solve(mat, e))
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def mat_vec(mat, vec):
    out = []
    for row in mat:
        acc = None
        for a, x in zip(row, vec):
            if x == 0:
                continue
            term = a * x
            acc = term if acc is None else acc + term
        out.append(acc if acc is not None else row[0].field.zero() if row else 0)
    return out


def dot(u, v):
    acc = None
    for a, b in zip(u, v):
        t = a * b
        acc = t if acc is None else acc + t
    return acc


# ---------------------------------------------------------------- lattices

def _integer_rows(rows):
    """Scale rational rows to integer rows; returns (int rows, denominator)."""
    den = common_denominator([x for row in rows for x in row]) if rows else 1
    return [[int(Fraction(x) * den) for x in row] for row in rows], den


def hnf(int_rows):
    """Row-style Hermite normal form of an integer matrix (zero rows dropped).

    Pivots are positive, entries below a pivot vanish and entries above it
    are reduced into [0, pivot).
    """
    a = [list(r) for r in int_rows if any(r)]
    if not a:
        return []
    ncols = len(a[0])
    r = 0
    for col in range(ncols):
        if r >= len(a):
            break
        while True:
            nz = [i for i in range(r, len(a)) if a[i][col] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(a[i][col]))
            a[r], a[piv] = a[piv], a[r]
            done = True
            for i in range(r + 1, len(a)):
                if a[i][col] != 0:
                    q = a[i][col] // a[r][col]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    if a[i][col] != 0:
                        done = False
            if done:
                break
        if r < len(a) and a[r][col] != 0:
            if a[r][col] < 0:
                a[r] = [-x for x in a[r]]
            p = a[r][col]
            for i in range(r):
                q = a[i][col] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
            r += 1
    return [row for row in a[:r]]


class IntLattice:
    """A lattice in Q^k given by generators, stored as a canonical HNF basis.

    Basis vectors are the rows of `basis`; read column-wise they form the
    column-style Hermite normal form.  Rational generators are allowed, so
    super-lattices of Z^k such as (1/N)Z^k are representable.
    """

    def __init__(self, ambient_rank, generators):
        self.ambient_rank = int(ambient_rank)
        gens = [[Fraction(x) for x in g] for g in generators]
        for g in gens:
            if len(g) != self.ambient_rank:
                raise ValueError("generator length differs from ambient rank")
        if gens:
            ints, den = _integer_rows(gens)
            rows = hnf(ints)
            self.basis = tuple(tuple(Fraction(x, den) for x in row) for row in rows)
        else:
            self.basis = ()

    @classmethod
    def standard(cls, k):
        return cls(k, [[1 if i == j else 0 for j in range(k)] for i in range(k)])

    @property
    def rank(self):
        return len(self.basis)

    def __eq__(self, other):
        return isinstance(other, IntLattice) and self.ambient_rank == other.ambient_rank \
            and self.basis == other.basis

    def __hash__(self):
        return hash(self.basis)

    def __repr__(self):
        return "IntLattice(k=%d, basis=%s)" % (
            self.ambient_rank, [[str(x) for x in b] for b in self.basis])

    def coordinates(self, v):
        """Rational coordinates of v in the basis, or None outside the span."""
        if not self.basis:
            return [] if not any(v) else None
        cols = [[self.basis[j][i] for j in range(self.rank)] for i in range(self.ambient_rank)]
        return rational_solve(cols, [Fraction(x) for x in v])

    def contains(self, v):
        c = self.coordinates(v)
        return c is not None and all(x.denominator == 1 for x in c)

    def __add__(self, other):
        return IntLattice(self.ambient_rank, list(self.basis) + list(other.basis))

    def scaled(self, q):
        q = Fraction(q)
        return IntLattice(self.ambient_rank, [[x * q for x in b] for b in self.basis])

    def denominator(self):
        return common_denominator([x for b in self.basis for x in b])

    def basis_strings(self):
        return [[str(x) for x in b] for b in self.basis]


def integer_kernel(mat, k=None):
    """Saturated lattice {v in Z^k : mat v = 0} for a rational matrix."""
    rows = [[Fraction(x) for x in row] for row in mat if row]
    if k is None:
        if not rows:
            raise ValueError("need k for an empty matrix")
        k = len(rows[0])
    rows = [r for r in rows if any(r)]
    if not rows:
        return IntLattice.standard(k)
    ints, _ = _integer_rows(rows)
    m = len(ints)
    # column operations on [A; I]; columns whose A part vanishes span the kernel
    cols = [[ints[i][j] for i in range(m)] + [1 if t == j else 0 for t in range(k)]
            for j in range(k)]
    start = 0
    for i in range(m):
        while True:
            nz = [j for j in range(start, k) if cols[j][i] != 0]
            if len(nz) <= 1:
                break
            piv = min(nz, key=lambda j: abs(cols[j][i]))
            for j in nz:
                if j != piv:
                    q = cols[j][i] // cols[piv][i]
                    cols[j] = [x - q * y for x, y in zip(cols[j], cols[piv])]
        nz = [j for j in range(start, k) if cols[j][i] != 0]
        if nz:
            j = nz[0]
            cols[start], cols[j] = cols[j], cols[start]
            start += 1
    kernel = [c[m:] for c in cols[start:]]
    return IntLattice(k, kernel)


def hnf_and_index(sub, sup):
    """Index of `sub` in `sup`: a positive int, 'infinite' or 'not-contained'."""
    if sub.ambient_rank != sup.ambient_rank:
        raise ValueError("ambient ranks differ")
    coords = []
    for b in sub.basis:
        c = sup.coordinates(b)
        if c is None or any(x.denominator != 1 for x in c):
            return "not-contained"
        coords.append(c)
    if sub.rank < sup.rank:
        return "infinite"
    det = abs(_det_fraction(coords)) if coords else Fraction(1)
    return int(det)


def _det_fraction(mat):
    n = len(mat)
    a = [[Fraction(x) for x in row] for row in mat]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            if a[r][col] != 0:
                f = a[r][col] / a[col][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


def saturation(lattice):
    """(Q-span of the lattice) intersected with Z^k."""
    k = lattice.ambient_rank
    if lattice.rank == 0:
        return IntLattice(k, [])
    normals = rational_nullspace([list(b) for b in lattice.basis], k)
    if not normals:
        return IntLattice.standard(k)
    return integer_kernel(normals, k)


def lattice_of_values(values, k):
    """Z-module generated by rational vectors; convenience wrapper."""
    return IntLattice(k, values)


def decimal_string(x, places):
    """Exact decimal with `places` digits after the point, ties to even."""
    if places < 0:
        raise ValueError("places must be nonnegative")
    scale = 10 ** places
    if isinstance(x, FieldScalar):
        y = x * scale
        low = y.floor()
        c = compare(y - low, Fraction(1, 2))
    else:
        y = Fraction(x) * scale
        low = y.numerator // y.denominator
        frac = y - low
        c = (frac > Fraction(1, 2)) - (frac < Fraction(1, 2))
    digits = low + 1 if c > 0 or (c == 0 and low % 2) else low
    sign = "-" if digits < 0 else ""
    whole, rest = divmod(abs(digits), scale)
    if places == 0:
        return "%s%d" % (sign, whole)
    return "%s%d.%0*d" % (sign, whole, places, rest)
