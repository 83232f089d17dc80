from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cutproject.algebra import compare, mat_vec
from cutproject.fixtures import FIXTURES
from cutproject.geometry import supporting_hyperplanes
from cutproject.scheme import (InvalidScheme, SchemeFormatError, generate_pattern, lattice_index,
                               parse_scheme, reduce_cyclic, star_map, unlabel, validate_scheme)
from conftest import load


def raw(name):
    return parse_scheme(FIXTURES[name]())


# ---------------------------------------------------------------- validation

def test_fibonacci_passes_all_assumptions(fib):
    rep = validate_scheme(fib)
    assert rep["valid"] and rep["nonsingular"]


def test_rational_slope_fails_density():
    rep = validate_scheme(raw("rational_slope"))
    assert not rep["valid"]
    assert rep["checks"]["internal_dense"] is False
    assert any("dense" in f for f in rep["failures"])


def test_singular_stack_is_invalid():
    rep = validate_scheme(raw("singular_stack"))
    assert not rep["valid"] and rep["checks"]["stacked_invertible"] is False


@pytest.mark.parametrize("name", sorted(n for n in FIXTURES
                                        if n not in ("rational_slope", "singular_stack")))
def test_every_regular_fixture_validates(name):
    assert validate_scheme(load(name))["valid"]


def test_unknown_key_rejected():
    obj = FIXTURES["fibonacci"]()
    obj["colour"] = "red"
    with pytest.raises(SchemeFormatError):
        parse_scheme(obj)


def test_dimension_mismatch_rejected():
    obj = FIXTURES["fibonacci"]()
    obj["k"] = 3
    with pytest.raises(InvalidScheme):
        parse_scheme(obj)


# ---------------------------------------------------------------- star map

def test_star_map_examples(fib):
    t = fib.field.theta()
    assert all(x.is_zero() for x in star_map(fib, (0, 0)))
    assert star_map(fib, (1, 0)) == [fib.field.one()]
    assert star_map(fib, (0, 1)) == [-t]


# ---------------------------------------------------------------- cyclic reduction

def test_trivial_cyclic_data_leaves_scheme_alone(fib):
    obj = FIXTURES["fibonacci"]()
    win = obj.pop("window")
    obj["cyclic"] = {"modulus": 1, "kappa": [0, 0], "windows": {"0": win}, "shifts": {}}
    red = reduce_cyclic(parse_scheme(obj))
    assert red.proj_internal == fib.proj_internal
    assert [p.vertices for p in red.window.pieces] == [p.vertices for p in fib.window.pieces]


def test_two_residue_toy_translates_second_window():
    obj = FIXTURES["fibonacci"]()
    del obj["window"]
    q = {"vertices": [[["0", "0"]], [["1/4", "0"]]]}
    obj["cyclic"] = {"modulus": 2, "kappa": [1, 0], "windows": {"0": [q], "1": [q]},
                     "shifts": {"1": [3, 0]}}
    red = reduce_cyclic(parse_scheme(obj))
    got = sorted((p.vertices[0][0].c, p.vertices[1][0].c) for p in red.window.pieces)
    assert got == [((-3, 0), (Fraction(-11, 4), 0)), ((0, 0), (Fraction(1, 4), 0))]
    assert lattice_index(red.parent["basis"]) == 2


def test_penrose_reduces_to_four_pentagons_over_index_five():
    red = load("penrose")
    assert len(red.window.pieces) == 4
    assert all(len(p.vertices) == 5 for p in red.window.pieces)
    assert lattice_index(red.parent["basis"]) == 5
    assert validate_scheme(red)["valid"]


def test_missing_shift_is_an_error():
    obj = FIXTURES["penrose"]()
    del obj["cyclic"]["shifts"]["2"]
    with pytest.raises(InvalidScheme):
        reduce_cyclic(parse_scheme(obj))


def test_reduced_penrose_points_come_from_the_right_residue():
    orig = raw("penrose")
    red = load("penrose")
    basis = np.array(red.parent["basis"])
    pat = generate_pattern(red, 6)
    assert len(pat) > 0
    for i in range(len(pat)):
        piece = int(pat.label_index[i])
        gamma = tuple(int(x) for x in pat.coords[i] @ basis + np.array(red.parent["piece_shifts"][piece]))
        g = orig.cyclic.residue(gamma)
        assert orig.cyclic.windows[g].contains_interior(orig.internal(gamma))


# ---------------------------------------------------------------- unlabel

def test_single_label_unlabel_is_identity(fib):
    out = unlabel(fib)
    assert [p.vertices for p in out.window.pieces] == [p.vertices for p in fib.window.pieces]


def test_decorated_unlabel_gives_disjoint_triangles_same_subspaces():
    s = load("decorated_ammann_beenker")
    out = unlabel(s)
    assert not out.window.labelled and len(out.window.pieces) == 8
    assert all(len(p.vertices) == 3 for p in out.window.pieces)
    before = supporting_hyperplanes(s.window)[1]
    after = supporting_hyperplanes(out.window)[1]
    assert before == after and len(after) == 8


def test_two_label_interval_separated():
    s = load("fibonacci_two_labels")
    out = unlabel(s)
    lo = [p.vertices[0][0] for p in out.window.pieces]
    hi = [p.vertices[1][0] for p in out.window.pieces]
    assert compare(hi[0], lo[1]) < 0 or compare(hi[1], lo[0]) < 0
    assert any(any(z) for z in out.unlabel_shifts)


# ---------------------------------------------------------------- generation

def test_zero_box_gives_only_origin(fib):
    pat = generate_pattern(fib, 0)
    assert [tuple(c) for c in pat.coords] == [(0, 0)]


def test_fibonacci_box_ten(fib):
    pat = generate_pattern(fib, 10)
    xs = np.sort(pat.physical[:, 0])
    gaps = np.diff(xs)
    short, long_ = gaps.min(), gaps.max()
    assert abs(long_ / short - (1 + 5 ** 0.5) / 2) < 1e-9
    assert set(np.round(gaps / short, 6)) == {1.0, round((1 + 5 ** 0.5) / 2, 6)}
    density = float(fib.window.volume()) / abs(np.linalg.det(fib.float_matrix()))
    assert abs(len(pat) - density * 20) <= 0.2 * density * 20
    assert len(pat) == 33


def test_ammann_beenker_box_five(ab):
    pat = generate_pattern(ab, 5)
    pts = pat.physical
    dmin = min(np.linalg.norm(a - b) for a, b in combinations(pts, 2))
    # shortest AB distance: short diagonal of the 45-degree rhombus with unit edge
    assert dmin >= 2 * np.sin(np.pi / 8) - 1e-9
    density = float(ab.window.volume()) / abs(np.linalg.det(ab.float_matrix()))
    expected = density * 100
    assert abs(len(pat) - expected) <= 0.2 * expected


def test_generated_points_lie_in_open_window(ab):
    pat = generate_pattern(ab, 4)
    for c in pat.coords:
        assert ab.window.contains_interior(star_map(ab, [int(x) for x in c]))


@settings(max_examples=15)
@given(st.fractions(min_value=1, max_value=20, max_denominator=4),
       st.fractions(min_value=0, max_value=10, max_denominator=4))
def test_pattern_restriction_consistency(L, extra):
    s = load("fibonacci")
    small = generate_pattern(s, L)
    big = generate_pattern(s, L + extra)
    inside = [tuple(c) for c, x in zip(big.coords, big.physical)
              if all(compare(abs(v), L) <= 0 for v in mat_vec(s.proj_physical, [int(t) for t in c]))]
    assert inside == [tuple(c) for c in small.coords]
