"""Polygon algebra: hulls, Hodge polygons, comparisons."""

from fractions import Fraction as F

import pytest

from expsum.errors import InvalidFunctionError
from expsum.polygon import (
    Polygon,
    SlopeMultiset,
    WidthMismatchError,
    hodge_polygon,
    hull_of_heights,
    is_symmetric,
    lies_above,
    lower_hull,
    max_gap,
    slope_run_length,
)


def _poly(*pts):
    return Polygon(tuple((F(x), F(y)) for x, y in pts))


# ---------- construction ----------
def test_polygon_rejects_concave_and_unordered():
    with pytest.raises(ValueError):
        _poly((0, 0), (1, 1), (2, 1))
    with pytest.raises(ValueError):
        _poly((1, 0), (0, 0))


def test_lower_hull_merges_collinear_and_skips_infinite():
    hull = lower_hull([(0, 0), (1, 1), (2, 2), (3, None), (4, 5)])
    assert hull.vertices == ((0, 0), (2, 2), (4, 5))


def test_lower_hull_drops_points_above():
    assert hull_of_heights([0, 5, 1]).vertices == ((0, 0), (2, 1))


def test_lower_hull_is_idempotent():
    hull = hull_of_heights([0, 1, 1, 3, 7])
    assert lower_hull(list(hull.vertices)) == hull


def test_lower_hull_needs_finite_points():
    with pytest.raises(ValueError):
        lower_hull([(0, None)])
    with pytest.raises(ValueError):
        lower_hull([])


def test_height_at_interpolates():
    p = _poly((0, 0), (2, 1))
    assert p.height_at(1) == F(1, 2)
    with pytest.raises(ValueError):
        p.height_at(3)


def test_slope_multiset_round_trip():
    sm = SlopeMultiset.of([F(1, 2), 0, F(1, 2), 1])
    assert sm.runs == ((0, 1), (F(1, 2), 2), (1, 1))
    assert sm.to_polygon().slopes() == sm
    assert sm.width == 4


# ---------- Hodge polygon ----------
def test_hodge_single_pole():
    assert hodge_polygon(1, [3]).vertices == ((0, 0), (1, F(1, 3)), (2, 1))


def test_hodge_two_poles_equal_orders():
    hp = hodge_polygon(2, [2, 2])
    assert hp.vertices == ((0, 0), (1, 0), (3, 1), (4, 2))
    assert slope_run_length(hp, F(1, 2)) == 2


def test_hodge_endpoint():
    hp = hodge_polygon(2, [2, 1])
    assert hp.end == (3, F(3, 2))


@pytest.mark.parametrize(
    "ell,orders", [(1, [2]), (1, [5]), (2, [3, 1]), (3, [2, 4, 1])]
)
def test_hodge_is_symmetric_with_half_height(ell, orders):
    hp = hodge_polygon(ell, orders)
    d = sum(orders) + ell - 2
    assert hp.width == d
    assert hp.end[1] == F(d, 2)
    assert is_symmetric(hp)


def test_hodge_rejects_bad_data():
    with pytest.raises(InvalidFunctionError) as exc:
        hodge_polygon(1, [1])
    assert "degree" in str(exc.value)
    with pytest.raises(InvalidFunctionError):
        hodge_polygon(2, [3])
    with pytest.raises(InvalidFunctionError):
        hodge_polygon(1, [0])


# ---------- comparisons ----------
def test_lies_above_and_gap():
    hp = hodge_polygon(1, [3])
    np_ = _poly((0, 0), (2, 1))
    assert lies_above(np_, hp)
    assert not lies_above(hp, np_)
    assert max_gap(np_, hp) == F(1, 6)
    assert max_gap(hp, hp) == 0


def test_comparison_needs_equal_width():
    with pytest.raises(WidthMismatchError):
        lies_above(_poly((0, 0), (2, 1)), _poly((0, 0), (3, 1)))


def test_shrink_and_json():
    p = _poly((0, 0), (2, 1), (4, 4))
    assert p.shrink(2).vertices == ((0, 0), (1, F(1, 2)), (2, 2))
    assert Polygon.from_json(p.to_json()) == p
    assert p.to_json()["vertices"][1] == [2, 1, 1, 1]
