from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cutproject.algebra import NumberField
from cutproject.geometry import (Hyperplane, InvalidWindow, UnsupportedDimension, Window,
                                 WindowPolytope, arrangement_census, supporting_hyperplanes)
from conftest import load

QQ = NumberField([1, -1], 1, 1)
SQRT2 = NumberField([1, 0, -2], 1, 2)


def square(field=QQ):
    z, o = field.zero(), field.one()
    return Window([WindowPolytope.from_vertices([(z, z), (o, z), (o, o), (z, o)])])


def line(field, a, b, c):
    """a x + b y = c."""
    return Hyperplane((field.coerce(a), field.coerce(b)), field.coerce(c))


def test_unit_square_has_four_hyperplanes_two_subspaces():
    hs, subs = supporting_hyperplanes(square())
    assert (len(hs), len(subs)) == (4, 2)


def test_octagon_has_eight_hyperplanes_four_subspaces():
    hs, subs = supporting_hyperplanes(load("ammann_beenker").window)
    assert (len(hs), len(subs)) == (8, 4)


def test_decorated_octagon_has_twelve_hyperplanes_eight_subspaces():
    hs, subs = supporting_hyperplanes(load("decorated_ammann_beenker").window)
    assert (len(hs), len(subs)) == (12, 8)


def test_degenerate_piece_rejected():
    z, o = QQ.zero(), QQ.one()
    with pytest.raises(InvalidWindow):
        WindowPolytope.from_vertices([(z, z), (o, o), (o + o, o + o)])


def test_overlapping_pieces_rejected():
    z, o, h = QQ.zero(), QQ.one(), QQ.rational(Fraction(1, 2))
    a = WindowPolytope.from_vertices([(z, z), (o, z), (o, o), (z, o)])
    b = WindowPolytope.from_vertices([(h, h), (o + h, h), (o + h, o + h), (h, o + h)])
    with pytest.raises(InvalidWindow):
        Window([a, b])


def test_interval_split_at_midpoint():
    w = Window([WindowPolytope.from_vertices([(QQ.zero(),), (QQ.one(),)])])
    cut = Hyperplane((QQ.one(),), QQ.rational(Fraction(1, 2)))
    count, vol, _ = arrangement_census(w, [cut])
    assert count == 2 and vol == Fraction(1, 2)


def test_square_split_by_diagonals():
    cuts = [line(QQ, 1, -1, 0), line(QQ, 1, 1, 1)]
    count, vol, _ = arrangement_census(square(), cuts)
    assert count == 4 and vol == Fraction(1, 4)


def test_square_split_by_irrational_line():
    t = SQRT2.theta()
    count, vol, _ = arrangement_census(square(SQRT2), [line(SQRT2, 1, 0, t - 1)])
    assert count == 2
    # the two pieces have areas sqrt2 - 1 and 2 - sqrt2; the smaller is returned
    assert vol == t - 1


def test_three_dimensional_arrangement_unsupported():
    z, o = QQ.zero(), QQ.one()
    cube = Window([WindowPolytope.from_vertices(
        [(a, b, c) for a in (z, o) for b in (z, o) for c in (z, o)])])
    with pytest.raises(UnsupportedDimension):
        arrangement_census(cube, [])


def test_faces_sorted_deterministically():
    cuts = [line(QQ, 1, -1, 0), line(QQ, 1, 1, 1), line(QQ, 1, 0, Fraction(1, 3))]
    first = arrangement_census(square(), cuts, keep_faces=True).faces
    second = arrangement_census(square(), list(reversed(cuts)), keep_faces=True).faces
    assert first == second


coef = st.integers(min_value=-3, max_value=3)
offset = st.fractions(min_value=-1, max_value=2, max_denominator=7)
cutters = st.lists(st.tuples(coef, coef, offset).filter(lambda t: t[0] or t[1]),
                   min_size=0, max_size=5)


@given(cutters)
def test_face_areas_partition_the_square(specs):
    cuts = [line(QQ, a, b, c) for a, b, c in specs]
    census = arrangement_census(square(), cuts, keep_faces=True)
    from cutproject.geometry import polygon_area
    total = sum((abs(polygon_area(f)) for f in census.faces), QQ.zero())
    assert total == 1
    # Euler relation for a subdivided disc
    assert census.vertex_count - census.edge_count + census.face_count == 1


@given(cutters, st.tuples(coef, coef, offset).filter(lambda t: t[0] or t[1]))
def test_face_count_monotone_in_cutters(specs, extra):
    cuts = [line(QQ, a, b, c) for a, b, c in specs]
    before = arrangement_census(square(), cuts).face_count
    after = arrangement_census(square(), cuts + [line(QQ, *extra)]).face_count
    assert after >= before


@given(st.lists(st.fractions(min_value=-1, max_value=2, max_denominator=9), max_size=6))
def test_interval_lengths_partition(points):
    w = Window([WindowPolytope.from_vertices([(QQ.zero(),), (QQ.one(),)])])
    census = arrangement_census(w, [Hyperplane((QQ.one(),), QQ.rational(p)) for p in points],
                                keep_faces=True)
    inside = {p for p in points if 0 < p < 1}
    assert census.face_count == len(inside) + 1
    assert sum((b[0] - a[0] for a, b in census.faces), QQ.zero()) == 1
