"""Numeric Dwork matrices: characteristic polynomials, Fredholm series, block matrices,
matrix-level Newton polygon criteria."""

from fractions import Fraction as F

import numpy as np
import pytest

from expsum.arith import CycloElt, OrdValue
from expsum.dworkmat import (
    DimensionMismatchError,
    berkowitz,
    block_identity_check,
    block_matrix,
    build_frobenius,
    fredholm,
    fredholm_coefficients,
    galois_conjugates,
    np_from_fredholm,
    npma_check,
    random_block_case,
    trace_formula_check,
    truncation_certificate,
)
from expsum.errors import BudgetExceededError
from expsum.lfun import l_function, np_of_l
from expsum.ratfun import make_function, reduce_mod_p


# ---------- characteristic polynomials ----------
def test_berkowitz_matches_sympy_charpoly():
    m = [[F(1), F(2)], [F(3), F(4)]]
    assert berkowitz(m, F(1)) == [1, -5, -2]
    assert fredholm_coefficients(m) == [1, -5, -2]


def test_berkowitz_three_by_three():
    m = [[F(2), F(0), F(1)], [F(1), F(3), F(0)], [F(0), F(1), F(1)]]
    assert berkowitz(m, F(1)) == fredholm_coefficients(m)


def test_non_square_rejected():
    with pytest.raises(DimensionMismatchError):
        fredholm_coefficients([[F(1), F(2)]])


# ---------- block matrices ----------
def test_block_matrix_layout():
    a = [[F(1)]]
    b = [[F(2)]]
    c = [[F(3)]]
    assert block_matrix([a, b, c]) == [[0, 0, 3], [1, 0, 0], [0, 2, 0]]


def test_block_identity_on_seeded_cases():
    rng = np.random.default_rng(7)
    for _ in range(25):
        assert block_identity_check(random_block_case(rng, max_size=3, max_a=3))


def test_block_matrices_need_equal_sizes():
    with pytest.raises(DimensionMismatchError):
        block_matrix([[[F(1)]], [[F(1), F(0)], [F(0), F(1)]]])


# ---------- Frobenius matrix and Fredholm series ----------
def test_truncation_certificate():
    assert truncation_certificate(0, 12, 3, 8) == 8
    assert truncation_certificate(2, 12, 3, 8) == F(14, 3)
    assert truncation_certificate(9, 12, 3, 8) == 8


def test_build_frobenius_argument_checks():
    two_pole = reduce_mod_p(make_function([2, 2], {(1, 2): 1, (2, 2): 1}), 5)
    with pytest.raises(ValueError):
        build_frobenius(two_pole, 4, 4)
    cubic = reduce_mod_p(make_function([3], {(1, 3): 1}), 5)
    with pytest.raises(ValueError):
        build_frobenius(reduce_mod_p(make_function([3], {(1, 3): 1}), 5, 2), 4, 4)
    with pytest.raises(BudgetExceededError):
        build_frobenius(cubic, 30, 4, max_size=24)


def test_fredholm_rejects_bad_k_max():
    fbar = reduce_mod_p(make_function([2], {(1, 2): 1}), 3)
    M = build_frobenius(fbar, 4, 6)
    with pytest.raises(ValueError):
        fredholm(M, 5)


def test_quadratic_fredholm_polygon_matches_direct():
    fbar = reduce_mod_p(make_function([2], {(1, 2): 1}), 3)
    M = build_frobenius(fbar, 6, 6)
    assert M.row_decay_holds()
    series = fredholm(M, 3)
    assert series.coeffs[0] == series.coeffs[0].one(3, 6)
    poly = np_from_fredholm(series, upto=1)
    assert poly.matches(np_of_l(l_function(fbar)))


def test_fredholm_polygon_does_not_depend_on_branch():
    fbar = reduce_mod_p(make_function([2], {(1, 2): 1}), 3)
    polys = [
        np_from_fredholm(fredholm(build_frobenius(fbar, 6, 6, branch), 3), upto=1)
        for branch in (1, 2)
    ]
    assert polys[0].certified_vertices == polys[1].certified_vertices
    assert polys[1].matches(np_of_l(l_function(fbar)))


@pytest.mark.slow
def test_trace_formula_cubic():
    fbar = reduce_mod_p(make_function([3], {(1, 1): 1, (1, 3): 1}), 5)
    report = trace_formula_check(fbar, 12, 8)
    assert report.holds
    assert [r.degree for r in report.rows] == list(range(6))


# ---------- matrix-level Newton polygon criteria ----------
def _diag_case():
    one, zero = CycloElt.one(3), CycloElt.zero(3)
    return [[one, zero], [zero, CycloElt.from_rational(3, 3)]]


def test_npma_on_a_diagonal_matrix():
    M = _diag_case()
    report = npma_check(M, galois_conjugates(M, 2, 1), 1)
    assert report.t_a == OrdValue.of(0)
    assert report.t_b == OrdValue.of(1)
    assert report.prop_i and report.prop_ii and report.prop_iii
    assert report.bound == F(1, 2)
    assert report.thm_i and report.thm_ii
    assert report.consistent


def test_npma_argument_checks():
    M = _diag_case()
    with pytest.raises(ValueError):
        npma_check(M, [M], 3)
    with pytest.raises(ValueError):
        npma_check(M, [galois_conjugates(M, 2, 1)[0][::-1]], 1)
    big = [[CycloElt.one(3)] * 7 for _ in range(7)]
    with pytest.raises(BudgetExceededError):
        npma_check(big, [big], 1)
