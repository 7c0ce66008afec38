"""Exponential sums, L-functions, point counts and zeta numerators."""

from fractions import Fraction as F

import pytest

from expsum.errors import BudgetExceededError
from expsum.lfun import (
    character_twist_product,
    count_points,
    exp_sum,
    l_function,
    newton_summary,
    np_of_l,
    pole_independence,
    scaled_np,
    trace_histogram,
    trace_histogram_reference,
    zeta_numerator,
)
from expsum.polygon import hodge_polygon
from expsum.ratfun import make_function, reduce_mod_p


def _square(p):
    return reduce_mod_p(make_function([2], {(1, 2): 1}), p)


def _cubic(p, linear=0):
    coeffs = {(1, 3): 1}
    if linear:
        coeffs[(1, 1)] = linear
    return reduce_mod_p(make_function([3], coeffs), p)


def _two_pole(p):
    return reduce_mod_p(make_function([2, 2], {(1, 1): 1, (1, 2): 1, (2, 2): 2}), p)


# ---------- histograms ----------
@pytest.mark.parametrize("k", [1, 2])
def test_batch_histogram_matches_reference(k):
    for fbar in (_cubic(5, linear=1), _two_pole(5)):
        assert trace_histogram(fbar, k) == trace_histogram_reference(fbar, k)


def test_histogram_skips_poles():
    fbar = _two_pole(5)
    assert sum(trace_histogram(fbar, 1)) == 5 - 1
    assert sum(trace_histogram(fbar, 2)) == 25 - 1


def test_budget_is_enforced():
    with pytest.raises(BudgetExceededError):
        trace_histogram(_cubic(7), 2, budget=48)


# ---------- x^2 over F_3 ----------
def test_quadratic_sum_and_l_function():
    fbar = _square(3)
    assert exp_sum(fbar, 1).int_vector() == [1, 2]
    lpoly = l_function(fbar)
    assert lpoly.degree == 1
    assert lpoly.int_vectors() == [[1, 0], [1, 2]]
    assert np_of_l(lpoly) == hodge_polygon(1, [2])


def test_quadratic_zeta_numerator():
    fbar = _square(3)
    assert count_points(fbar, 1) == 4
    z = zeta_numerator(fbar)
    assert z.coeffs == (1, 0, 3)
    assert scaled_np(z) == hodge_polygon(1, [2])


# ---------- consistency ----------
def test_full_counts_agree_with_functional_equation():
    fbar = _cubic(5, linear=1)
    short = zeta_numerator(fbar)
    full = zeta_numerator(fbar, full_counts=True)
    assert short.coeffs == full.coeffs
    assert len(full.counts) == 8 and len(short.counts) == 4
    assert short.coeffs[0] == 1 and short.degree == 8


def test_twists_are_galois_conjugates():
    fbar = _cubic(5, linear=1)
    base = l_function(fbar)
    assert l_function(fbar, c=2) == base.conjugate(2)


def test_character_twist_product():
    report = character_twist_product(_cubic(5, linear=1))
    assert report.conjugates_agree
    assert report.holds


def test_zeta_and_l_polygons_agree():
    fbar = _two_pole(3)
    assert scaled_np(zeta_numerator(fbar)) == np_of_l(l_function(fbar))


# ---------- summaries ----------
def test_supersingular_cubic():
    s = newton_summary(_cubic(5))
    assert s.np.vertices == ((0, 0), (2, 1))
    assert not s.coincide
    assert s.max_gap == F(1, 6)
    assert s.ds0 == 0 and s.ds1 == 0
    assert s.lies_above and s.symmetric


def test_ordinary_cubic():
    s = newton_summary(_cubic(7))
    assert s.coincide
    assert s.max_gap == 0


def test_two_pole_summary_invariants():
    s = newton_summary(_two_pole(5))
    assert s.np.width == 4
    assert s.np.end == (4, 2)
    assert s.lies_above and s.symmetric


def test_pole_independence_skips_colliding_placements():
    f = make_function([2, 1, 1], {(1, 2): 1, (2, 1): 1, (3, 1): 1})
    report = pole_independence(f, 5, [[0, 1], [0, 2], [0, 5]])
    assert [key for key, _ in report.polygons] == [(0, 1), (0, 2)]
    assert report.skipped[0][0] == (0, 5)
    assert "collide" in report.skipped[0][1]
