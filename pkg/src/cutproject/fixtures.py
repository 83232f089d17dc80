"""Ready-made schemes in the JSON file format.

Each builder returns a plain dict that `scheme.parse_scheme` accepts, so the
same objects serve the library, the CLI (`cutproject fixtures`) and the tests.
"""
from fractions import Fraction
import json
import os
import random

from .algebra import NumberField

GOLDEN = [1, -1, -1]
SQRT2 = [1, 0, -2]
PLASTIC = [1, 0, -1, -1]


def _q(x):
    return str(Fraction(x))


def _s(*coeffs):
    """Scalar in the power basis from rational coefficients."""
    return [_q(c) for c in coeffs]


def _field(minpoly, lo, hi):
    return {"minpoly": list(minpoly), "root": {"lo": _q(lo), "hi": _q(hi)}}


def _scalar_json(x):
    return x.to_strings()


def _interval(a, b, label=None):
    piece = {"vertices": [[a], [b]]}
    if label is not None:
        piece["label"] = label
    return piece


def _poly(vertices, label=None):
    piece = {"vertices": [list(v) for v in vertices]}
    if label is not None:
        piece["label"] = label
    return piece


# ---------------------------------------------------------------- codimension one

def fibonacci(window=None):
    """Golden-slope 2-to-1 scheme; physical gaps 1/sqrt5 and theta/sqrt5."""
    if window is None:
        window = [_interval(_s(Fraction(4, 3), -1), _s(Fraction(4, 3), 0))]
    return {
        "field": _field(GOLDEN, 1, 2),
        "k": 2, "d": 1, "n": 1,
        "proj_physical": [[_s(Fraction(-1, 5), Fraction(2, 5)), _s(Fraction(3, 5), Fraction(-1, 5))]],
        "proj_internal": [[_s(1, 0), _s(0, -1)]],
        "window": window,
    }


def fibonacci_weak3():
    """Window [1/7, 8/7 + theta/3]: weakly homogeneous with N = 3."""
    return fibonacci([_interval(_s(Fraction(1, 7), 0), _s(Fraction(8, 7), Fraction(1, 3)))])


def fibonacci_two_labels():
    a, b, c = Fraction(1, 7), Fraction(9, 14), Fraction(8, 7)
    return fibonacci([_interval(_s(a, 0), _s(b, 0), "a"), _interval(_s(b, 0), _s(c, 0), "b")])


def rational_slope():
    """Internal projection (1, -1): the projected lattice is discrete."""
    return {
        "field": _field([1, -1], 1, 1),
        "k": 2, "d": 1, "n": 1,
        "proj_physical": [[_s(1), _s(1)]],
        "proj_internal": [[_s(1), _s(-1)]],
        "window": [_interval(_s(Fraction(1, 3)), _s(Fraction(4, 3)))],
    }


def singular_stack():
    """Physical (1, 2) and internal (2, 4): the stacked matrix is singular."""
    return {
        "field": _field([1, -1], 1, 1),
        "k": 2, "d": 1, "n": 1,
        "proj_physical": [[_s(1), _s(2)]],
        "proj_internal": [[_s(2), _s(4)]],
        "window": [_interval(_s(Fraction(1, 3)), _s(Fraction(4, 3)))],
    }


def _cf_value(field, quotients, tail):
    """[a0; a1, ..., am, tail] as a field element."""
    x = tail
    for a in reversed(quotients[1:]):
        x = field.rational(a) + field.one() / x
    return field.rational(quotients[0]) + field.one() / x


LIOUVILLE_QUOTIENTS = (0, 1, 2, 4, 16, 256, 65536)


def liouville_slope_value():
    field = NumberField(PLASTIC, Fraction(13, 10), Fraction(14, 10))
    return field, _cf_value(field, LIOUVILLE_QUOTIENTS, field.theta())


def liouville():
    """Slope [0; 1, 2, 4, 16, 256, 65536, beta] with beta the plastic number.

    The partial quotients square at every step, so the lattice points near
    the physical line approach it ever faster along the convergents.
    """
    field, alpha = liouville_slope_value()
    half = field.rational(Fraction(1, 2))
    return {
        "field": _field(PLASTIC, Fraction(13, 10), Fraction(14, 10)),
        "k": 2, "d": 1, "n": 1,
        "proj_physical": [[_scalar_json(field.one() / (alpha * 2)), _scalar_json(half)]],
        "proj_internal": [[_s(1, 0, 0), _scalar_json(-alpha)]],
        "window": [_interval(_s(Fraction(1, 3), 0, 0), _s(Fraction(4, 3), 0, 0))],
    }


def growing_quotient_value(depth=12):
    """[0; 2, 1, 4, 8, 12, ...] truncated after `depth` quotients, golden tail."""
    quotients = [0, 2, 1] + [4 * (i - 2) for i in range(3, depth + 1)]
    field = NumberField(GOLDEN, 1, 2)
    return field, quotients, _cf_value(field, quotients, field.theta())


def random_codim_one(seed):
    """Golden or silver slope scheme with random rational windows and labels."""
    rng = random.Random(seed)
    if rng.random() < 0.5:
        minpoly, lo, hi = GOLDEN, 1, 2
    else:
        minpoly, lo, hi = SQRT2, 1, 2
    a, b = rng.randint(1, 4), rng.randint(1, 4)
    phys = [[_s(a, 0), _s(0, b)]]
    c = rng.choice([1, 2])
    intl = [[_s(c, 0), _s(0, -1)]]
    cuts = sorted({Fraction(rng.randint(1, 60), 61) for _ in range(rng.randint(2, 5))})
    start = Fraction(rng.randint(1, 29), 97)
    ends = [start] + [start + t * 2 for t in cuts]
    labels = rng.random() < 0.5
    window = []
    for i in range(len(ends) - 1):
        if not labels and i % 2:
            continue
        window.append(_interval(_s(ends[i], 0), _s(ends[i + 1], 0),
                                "L%d" % (i % 2) if labels else None))
    return {
        "field": _field(minpoly, lo, hi),
        "k": 2, "d": 1, "n": 1,
        "proj_physical": phys,
        "proj_internal": intl,
        "window": window,
    }


# ---------------------------------------------------------------- codimension two

def _ab_projections():
    h = Fraction(1, 2)
    phys = [[_s(1, 0), _s(0, h), _s(0, 0), _s(0, -h)],
            [_s(0, 0), _s(0, h), _s(1, 0), _s(0, h)]]
    intl = [[_s(1, 0), _s(0, -h), _s(0, 0), _s(0, h)],
            [_s(0, 0), _s(0, h), _s(-1, 0), _s(0, h)]]
    return phys, intl


def _ab_octagon(shift=(0, 0)):
    h = Fraction(1, 2)
    sx, sy = Fraction(shift[0]), Fraction(shift[1])
    pts = [((h, 0), (h, h)), ((-h, 0), (h, h)), ((-h, -h), (h, 0)), ((-h, -h), (-h, 0)),
           ((-h, 0), (-h, -h)), ((h, 0), (-h, -h)), ((h, h), (-h, 0)), ((h, h), (h, 0))]
    return [[_s(x[0] + sx, x[1]), _s(y[0] + sy, y[1])] for x, y in pts]


def ammann_beenker():
    """Eightfold scheme over Q(sqrt2) with a centred regular octagon window."""
    phys, intl = _ab_projections()
    return {
        "field": _field(SQRT2, 1, 2),
        "k": 4, "d": 2, "n": 2,
        "proj_physical": phys,
        "proj_internal": intl,
        "window": [_poly(_ab_octagon())],
    }


AB_SHIFT = (Fraction(1, 7), Fraction(2, 11))


def decorated_ammann_beenker():
    """Octagon split into 8 labelled triangles (centre plus one edge each),
    moved off the singular central position by a rational translate."""
    phys, intl = _ab_projections()
    octagon = _ab_octagon(AB_SHIFT)
    centre = [_s(AB_SHIFT[0], 0), _s(AB_SHIFT[1], 0)]
    pieces = []
    for i in range(8):
        pieces.append(_poly([centre, octagon[i], octagon[(i + 1) % 8]], "t%d" % i))
    return {
        "field": _field(SQRT2, 1, 2),
        "k": 4, "d": 2, "n": 2,
        "proj_physical": phys,
        "proj_internal": intl,
        "window": pieces,
    }


def penrose():
    """Fivefold scheme with its Z/5 component; coordinates in the skew basis
    (1, xi) of Q(xi), xi a primitive fifth root of unity, over Q(sqrt5)."""
    c = _s(-1, 1)  # golden ratio minus one
    nc = _s(1, -1)
    one, zero, mone = _s(1, 0), _s(0, 0), _s(-1, 0)
    phys = [[one, zero, mone, nc],
            [zero, one, c, nc]]
    intl = [[one, mone, c, zero],
            [zero, c, mone, one]]
    tau = (Fraction(1, 13), Fraction(1, 17))
    field = NumberField(GOLDEN, 1, 2)
    cval = field.theta() - 1
    base = [(field.one(), field.zero()), (field.zero(), field.one()), (-field.one(), cval),
            (-cval, -cval), (cval, -field.one())]
    phi = field.theta()
    scales = {1: field.one(), 4: -field.one(), 3: phi, 2: -phi}
    windows = {}
    for g, factor in scales.items():
        verts = [[_scalar_json(x * factor + tau[0]), _scalar_json(y * factor + tau[1])]
                 for x, y in base]
        windows[str(g)] = [_poly(verts)]
    return {
        "field": _field(GOLDEN, 1, 2),
        "k": 4, "d": 2, "n": 2,
        "proj_physical": phys,
        "proj_internal": intl,
        "cyclic": {"modulus": 5, "kappa": [1, 1, 1, 1], "windows": windows,
                   "shifts": {str(g): [6 * g - 5, 0, 0, 0] for g in range(1, 5)}},
    }


def rectangle():
    """Product of two golden 2-to-1 schemes with a rectangular window."""
    z, m5 = Fraction(-1, 5), Fraction(2, 5)
    phys = [[_s(z, m5), _s(Fraction(3, 5), z), _s(0, 0), _s(0, 0)],
            [_s(0, 0), _s(0, 0), _s(z, m5), _s(Fraction(3, 5), z)]]
    intl = [[_s(1, 0), _s(0, -1), _s(0, 0), _s(0, 0)],
            [_s(0, 0), _s(0, 0), _s(1, 0), _s(0, -1)]]
    a, b = Fraction(1, 3), Fraction(4, 3)
    c, d = Fraction(1, 5), Fraction(6, 5)
    verts = [[_s(a, 0), _s(c, 0)], [_s(b, 0), _s(c, 0)], [_s(b, 0), _s(d, 0)], [_s(a, 0), _s(d, 0)]]
    return {
        "field": _field(GOLDEN, 1, 2),
        "k": 4, "d": 2, "n": 2,
        "proj_physical": phys,
        "proj_internal": intl,
        "window": [_poly(verts)],
    }


QUARTIC = [1, 0, 0, -1, -1]  # x^4 - x - 1, real root near 1.2207


def generic_square():
    """4-to-2 scheme over a quartic field with a square window: both
    stabilisers are trivial, so the exponent is 2d = 4."""
    def s(*c):
        return _s(*c)
    phys = [[s(1, 0, 0, 0), s(0, 1, 0, 0), s(0, 0, 1, 0), s(0, 0, 0, 1)],
            [s(0, 0, 0, 1), s(1, 0, 0, 0), s(0, 1, 0, 0), s(0, 0, 1, 0)]]
    intl = [[s(1, 0, 0, 0), s(0, -1, 0, 0), s(0, 0, 2, 0), s(0, 0, 0, -1)],
            [s(0, 1, 0, 0), s(0, 0, -1, 1), s(1, 0, 0, -1), s(-1, 2, 0, 0)]]
    lo, hi = Fraction(1, 7), Fraction(8, 7)
    verts = [[s(lo, 0, 0, 0), s(lo, 0, 0, 0)], [s(hi, 0, 0, 0), s(lo, 0, 0, 0)],
             [s(hi, 0, 0, 0), s(hi, 0, 0, 0)], [s(lo, 0, 0, 0), s(hi, 0, 0, 0)]]
    return {
        "field": _field(QUARTIC, 1, 2),
        "k": 4, "d": 2, "n": 2,
        "proj_physical": phys,
        "proj_internal": intl,
        "window": [_poly(verts)],
    }


FIXTURES = {
    "fibonacci": fibonacci,
    "fibonacci_weak3": fibonacci_weak3,
    "fibonacci_two_labels": fibonacci_two_labels,
    "rational_slope": rational_slope,
    "singular_stack": singular_stack,
    "liouville": liouville,
    "ammann_beenker": ammann_beenker,
    "decorated_ammann_beenker": decorated_ammann_beenker,
    "penrose": penrose,
    "rectangle": rectangle,
    "generic_square": generic_square,
}
for _i in range(10):
    FIXTURES["codim1_random_%d" % _i] = (lambda i=_i: random_codim_one(1000 + i))


def write_fixtures(directory, names=None):
    os.makedirs(directory, exist_ok=True)
    paths = {}
    for name in names or sorted(FIXTURES):
        path = os.path.join(directory, name + ".json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(FIXTURES[name](), fh, indent=1, sort_keys=True)
            fh.write("\n")
        paths[name] = path
    return paths
