from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cutproject.empirics import (ParameterError, covering_radius, cut_region_census, cutters,
                                 empirical_complexity, empirical_repetitivity, lattice_ball,
                                 patch_census, pw_estimate)
from cutproject.scheme import generate_pattern
from conftest import load
from oracles import fibonacci_cut_count, sturmian_patch_count

# Frozen from the oracles module: Sturmian word counts, hand-coordinate AB
# vertex sets with a sorted-offset patch hash, and float cut-point sweeps.
FIB_PATCHES = {2: 7, 4: 13, 8: 25, 16: 51, 32: 103, 64: 207}
AB_PATCHES = {2: 201, 4: 705, 8: 2801, 16: 8545}
AB_REGIONS = {2: 217, 4: 817, 8: 3277}
LIOUVILLE_RADII = (1, 3, 13, 211)
LIOUVILLE_RHO_RATIO = (2.08, 2.66, 8.62, 128.0)
LIOUVILLE_PW = (0.308, 0.227, 0.0616, 0.0039)


@pytest.fixture(scope="module")
def fib_table(fib):
    return empirical_complexity(fib, sorted(FIB_PATCHES), 1, L=1000)


@pytest.fixture(scope="module")
def ab_table(ab):
    return empirical_complexity(ab, sorted(AB_PATCHES), 2)


@pytest.fixture(scope="module")
def ab_regions(ab):
    return {r: cut_region_census(ab, r).count for r in AB_REGIONS}


# ---------------------------------------------------------------- patch counts

def test_fibonacci_three_patches_match_sturmian_word(fib):
    assert patch_census(fib, 3, 200).p_hat == 9 == sturmian_patch_count(3)


def test_fibonacci_complexity_table(fib_table):
    assert {int(row["r"]): row["p_hat"] for row in fib_table["rows"]} == FIB_PATCHES
    assert fib_table["spread"] <= 10 and not fib_table["drift"]


def test_ammann_beenker_two_patches(ab):
    cen = patch_census(ab, 2, 40)
    assert cen.p_hat == 201 and len(cen.pattern) == 7785


def test_ammann_beenker_complexity_table(ab_table):
    rows = ab_table["rows"]
    assert {int(row["r"]): row["p_hat"] for row in rows} == AB_PATCHES
    # the box is max(50, 4r)
    assert [row["L"] for row in rows] == [50, 50, 50, 64]
    assert ab_table["spread"] <= 10


def test_patch_classes_partition_centres(fib):
    cen = patch_census(fib, 5, 100)
    assert sum(cen.counts()) == len(cen.centers)
    members = sorted(i for c in cen.classes for i in c)
    assert members == sorted(int(c) for c in cen.centers)


def test_class_representative_offsets_are_exact(fib):
    cen = patch_census(fib, 2, 50)
    offs = cen.class_offsets(0)
    assert any(all(x == 0 for x in o) for o, _ in offs)
    assert all(abs(float(x)) <= 2 for o, _ in offs for x in o)


def test_box_must_cover_four_radii(fib):
    with pytest.raises(ParameterError):
        patch_census(fib, 10, 39)


def test_negative_radius_rejected(fib):
    with pytest.raises(ParameterError):
        patch_census(fib, -1, 10)


@pytest.mark.parametrize("radii", [[], [0, 1], [3, 2], [2, 2]])
def test_radii_must_increase(fib, radii):
    with pytest.raises(ParameterError):
        empirical_complexity(fib, radii, 1, L=100)


@settings(max_examples=10)
@given(st.fractions(min_value=Fraction(1, 2), max_value=12, max_denominator=4))
def test_patch_count_monotone_in_radius(r):
    fib = load("fibonacci")
    pat = generate_pattern(fib, 200)
    assert patch_census(fib, r, 200, pat).p_hat <= patch_census(fib, r + 1, 200, pat).p_hat


@settings(max_examples=6)
@given(st.integers(min_value=1, max_value=6))
def test_patch_count_stable_in_box(r):
    fib = load("fibonacci")
    assert patch_census(fib, r, 300).p_hat == patch_census(fib, r, 600).p_hat


# ---------------------------------------------------------------- cut regions

def test_fibonacci_cut_regions(fib):
    assert cut_region_census(fib, 10).count == 33 == fibonacci_cut_count(10)


def test_ammann_beenker_cut_regions(ab_regions):
    assert ab_regions == AB_REGIONS


def test_refinement_inequality(fib_table, ab_table, ab_regions, fib):
    # checked at every tested radius, including those below the window diameter
    for row in fib_table["rows"]:
        assert row["p_hat"] <= cut_region_census(fib, row["r"]).count
    for row in ab_table["rows"]:
        if int(row["r"]) in ab_regions:
            assert row["p_hat"] <= ab_regions[int(row["r"])]


def test_zero_radius_has_single_region(ab):
    c = cut_region_census(ab, 0)
    assert c.count == 1 and c.cutter_count == 0


def test_cut_region_volumes_partition_window(fib):
    c = cut_region_census(fib, 5)
    assert 0 < c.min_volume <= fib.window.volume() / c.count


def test_lattice_ball_contains_origin_and_is_symmetric(ab):
    ball = {tuple(int(x) for x in z) for z in lattice_ball(ab, 3)}
    assert (0, 0, 0, 0) in ball
    assert all(tuple(-x for x in z) in ball for z in ball)


def test_cutters_grow_with_radius(fib):
    assert len(cutters(fib, 3)) <= len(cutters(fib, 6))


# ---------------------------------------------------------------- repetitivity and PW

def test_covering_radius_on_the_line():
    pts = np.array([[-3.0], [-1.0], [0.0], [2.0], [3.0]])
    assert covering_radius(pts, 3, 1) == 1.0


def test_fibonacci_repetitivity_band(fib):
    rows = empirical_repetitivity(fib, sorted(FIB_PATCHES), 1000)["rows"]
    ratios = [row["ratio"] for row in rows]
    assert all(row["rho_hat"] is not None for row in rows)
    assert max(ratios) <= 6


def test_liouville_repetitivity_grows(liouville):
    rows = empirical_repetitivity(liouville, LIOUVILLE_RADII, 40000)["rows"]
    ratios = [row["ratio"] for row in rows]
    assert ratios == pytest.approx(LIOUVILLE_RHO_RATIO, rel=5e-3)
    assert all(b > a for a, b in zip(ratios, ratios[1:]))


def test_liouville_pw_product_decays(liouville):
    prods = [row["product"] for row in pw_estimate(liouville, LIOUVILLE_RADII)]
    assert prods == pytest.approx(LIOUVILLE_PW, rel=5e-3)
    assert all(b < a for a, b in zip(prods, prods[1:]))


def test_fibonacci_pw_product_bounded(fib):
    prods = [row["product"] for row in pw_estimate(fib, sorted(FIB_PATCHES))]
    assert max(prods) / min(prods) < 2


def test_small_box_flags_singleton_classes(ab):
    rows = empirical_repetitivity(ab, [3], 12)["rows"]
    assert rows[0]["insufficient_box"] and rows[0]["rho_hat"] is None
