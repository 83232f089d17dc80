from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cutproject.algebra import (FieldMismatch, IntLattice, NumberField, compare, decimal_string,
                                exact_compare, field_rank, hnf_and_index, integer_kernel,
                                rational_rank, rational_restriction, saturation)
from cutproject.complexity import Flag, enumerate_flags, flag_group, prepare
from oracles import brute_kernel

SQRT2 = NumberField([1, 0, -2], 1, 2)
GOLD = NumberField([1, -1, -1], 1, 2)
QQ = NumberField([1, -1], 1, 1)

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def sq(*c):
    return SQRT2.scalar(c)


# ---------------------------------------------------------------- comparisons

def test_equal_constants_compare_equal():
    assert exact_compare(sq(1, 0), sq(1, 0)) == "="


def test_sqrt2_below_three_halves():
    assert exact_compare(SQRT2.theta(), Fraction(3, 2)) == "<"


def test_golden_square_is_theta_plus_one():
    t = GOLD.theta()
    assert exact_compare(t * t, t + 1) == "="


def test_fields_must_match():
    with pytest.raises(FieldMismatch):
        exact_compare(SQRT2.theta(), GOLD.theta())


def test_close_values_are_separated():
    # 99/70 and 140/99 are the convergents bracketing sqrt2
    assert compare(SQRT2.theta(), Fraction(99, 70)) < 0
    assert compare(SQRT2.theta(), Fraction(140, 99)) > 0


def test_non_monic_polynomial_rejected():
    with pytest.raises(ValueError):
        NumberField([2, 0, -1], 0, 1)


def test_interval_with_two_roots_rejected():
    with pytest.raises(ValueError):
        NumberField([1, 0, -2], -2, 2)


def test_floor_and_inverse():
    t = SQRT2.theta()
    assert (t * 10).floor() == 14
    assert (-t).floor() == -2
    assert (t - 1).inverse() == t + 1


# ---------------------------------------------------------------- restriction and kernels

def test_restriction_identity_over_rationals():
    m = [[QQ.rational(1), QQ.rational(-2)], [QQ.rational(3), QQ.rational(5)]]
    assert rational_restriction(m) == [[1, -2], [3, 5]]


def test_restriction_splits_power_basis():
    assert rational_restriction([[sq(1, 0), sq(0, 1)]]) == [[1, 0], [0, 1]]


def test_restriction_kernel_of_theta_row():
    rows = rational_restriction([[sq(0, 1), sq(-1, 0), sq(1, 0)]])
    assert sorted(map(list, rows)) == [[0, -1, 1], [1, 0, 0]]
    ker = integer_kernel(rows, 3)
    assert ker.basis == ((0, 1, 1),)


def test_kernel_of_zero_map_is_everything():
    assert integer_kernel([[0, 0, 0]], 3) == IntLattice.standard(3)


def test_kernel_of_identity_is_trivial():
    assert integer_kernel([[1, 0, 0], [0, 1, 0], [0, 0, 1]], 3).rank == 0


def test_kernel_of_single_equation():
    assert integer_kernel([[1, -2]], 2) == IntLattice(2, [[2, 1]])


# ---------------------------------------------------------------- indices

def test_index_of_lattice_in_itself():
    assert hnf_and_index(IntLattice.standard(2), IntLattice.standard(2)) == 1


def test_index_of_doubled_lattice():
    assert hnf_and_index(IntLattice.standard(2).scaled(2), IntLattice.standard(2)) == 4


def test_index_not_contained_and_infinite():
    assert hnf_and_index(IntLattice(2, [[Fraction(1, 2), 0]]), IntLattice.standard(2)) \
        == "not-contained"
    assert hnf_and_index(IntLattice(2, [[1, 0]]), IntLattice.standard(2)) == "infinite"


def test_ab_axes_flag_group_has_index_two(ab):
    p = prepare(ab)
    sub_flags, _ = enumerate_flags(p)
    axes = [f for f in sub_flags
            if all(sum(1 for a in v if not a.is_zero()) == 1 for v in f.normals)]
    assert len(axes) == 1
    grp = flag_group(p, Flag(axes[0].members, axes[0].normals))
    assert hnf_and_index(IntLattice.standard(4), grp.lattice) == 2


# ---------------------------------------------------------------- field rank

def test_field_rank_examples():
    z = SQRT2.zero()
    o = SQRT2.one()
    t = SQRT2.theta()
    assert field_rank([[z, z], [z, z]]) == 0
    assert field_rank([[o, z, z], [z, o, z], [z, z, o]]) == 3
    assert field_rank([[o, t], [t, t * t]]) == 1


# ---------------------------------------------------------------- decimals

def test_decimal_string_rounds_half_even():
    assert decimal_string(Fraction(5, 2), 0) == "2"
    assert decimal_string(Fraction(-1, 8), 2) == "-0.12"
    assert decimal_string(SQRT2.theta(), 6) == "1.414214"


# ---------------------------------------------------------------- invariants

small_ints = st.integers(min_value=-3, max_value=3)


@given(st.lists(st.lists(small_ints, min_size=3, max_size=3), min_size=1, max_size=2))
def test_kernel_matches_brute_force(rows):
    ker = integer_kernel(rows, 3)
    for b in ker.basis:
        assert all(sum(a * x for a, x in zip(r, b)) == 0 for r in rows)
    assert ker.rank + rational_rank(rows) == 3
    brute = brute_kernel(rows, 3, 4)
    assert all(ker.contains(v) for v in brute)
    # every kernel vector of the small box appears in the brute-force list
    assert set(brute) >= {tuple(int(x) for x in b) for b in ker.basis
                          if max(abs(x) for x in b) <= 4}


@given(st.lists(st.lists(small_ints, min_size=4, max_size=4), min_size=1, max_size=3))
def test_kernel_is_saturated(rows):
    ker = integer_kernel(rows, 4)
    assert hnf_and_index(ker, saturation(ker)) == 1


@given(st.lists(st.tuples(small_ints, small_ints), min_size=1, max_size=2))
def test_field_restriction_kernel_matches_brute_force(entries):
    row = [sq(a, b) for a, b in entries] + [sq(1, 0)]
    ker = integer_kernel(rational_restriction([row]), len(row))
    for v in brute_kernel(rational_restriction([row]), len(row), 3):
        assert ker.contains(v)
        total = sum((x * c for x, c in zip(row, v)), SQRT2.zero())
        assert total.is_zero()


@given(fractions, fractions, fractions, fractions)
def test_field_identities(a, b, c, d):
    x, y = sq(a, b), sq(c, d)
    assert (x + y) - y == x
    assert x * y == y * x
    if not y.is_zero():
        assert (x / y) * y == x
    assert compare(x * x, 0) >= 0


@given(st.tuples(fractions, fractions), st.tuples(fractions, fractions),
       st.tuples(fractions, fractions))
def test_compare_is_a_total_order(p, q, r):
    a, b, c = sq(*p), sq(*q), sq(*r)
    assert compare(a, b) == -compare(b, a)
    if compare(a, b) <= 0 and compare(b, c) <= 0:
        assert compare(a, c) <= 0
    assert (compare(a, b) > 0) == (a.approx() > b.approx() + 1e-9) or \
        abs(a.approx() - b.approx()) < 1e-9


@given(st.fractions(min_value=-1000, max_value=1000, max_denominator=10 ** 6),
       st.integers(min_value=0, max_value=8))
def test_decimal_string_matches_decimal_module(x, places):
    exact = Decimal(x.numerator) / Decimal(x.denominator)
    ref = exact.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN)
    got = decimal_string(x, places)
    assert Decimal(got) == ref
