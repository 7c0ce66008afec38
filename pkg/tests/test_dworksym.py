"""Symbolic Dwork bookkeeping: scalars, r-matrix, sigma_0, basis order, vertex data."""

from fractions import Fraction as F

import pytest

from expsum.dworksym import (
    IndexRangeError,
    NotAVertexError,
    SymContext,
    f_poly,
    f_valuation_bound,
    lambda_descriptor,
    minimal_weight_audit,
    perm_data,
    phi_basis,
    r_matrix,
    sigma0,
    slope_below_one_width,
    truncation_error_bound,
    vertex_data,
)
from expsum.errors import BudgetExceededError


# ---------- context and scalars ----------
def test_context_rejects_bad_primes():
    with pytest.raises(ValueError):
        SymContext(5, (5,))
    with pytest.raises(ValueError):
        SymContext(4, (3,))


def test_lambda_descriptors():
    assert lambda_descriptor(0, 5).bound == 0
    small = lambda_descriptor(2, 5)
    assert small.exact and small.bound == F(1, 2)
    big = lambda_descriptor(7, 5)
    assert not big.exact and big.bound == F(7, 4)
    with pytest.raises(IndexRangeError):
        lambda_descriptor(-1, 5)


def test_f_valuation_bound():
    ctx = SymContext(5, (3,))
    assert f_valuation_bound(ctx, 1, 4) == F(1, 2)
    assert f_valuation_bound(ctx, 1, 0) == 0
    with pytest.raises(IndexRangeError):
        f_valuation_bound(ctx, 1, -1)


def test_f_poly_weighted_monomials():
    ctx = SymContext(5, (3,))
    f3 = f_poly(ctx, 1, 3)
    assert len(f3.monomials) == 3
    assert f3.valuation_bound == F(1, 4)
    assert f_poly(ctx, 1, -1).is_zero


# ---------- r-matrix and sigma_0 ----------
def test_r_matrix_small_case():
    assert r_matrix(3, 5, 2) == ((2, 0), (0, 1))
    with pytest.raises(ValueError):
        r_matrix(3, 3, 2)


def test_sigma0_small_case():
    assert sigma0(3, 5, 2) == (2, 1)
    data = perm_data(3, 5, 2)
    assert data.zero_condition_holds
    assert data.r_sum == 0
    assert data.r == 2


@pytest.mark.parametrize("d,p,n", [(3, 7, 2), (4, 5, 3), (5, 7, 4), (4, 11, 3)])
def test_sigma0_is_a_permutation_meeting_zero_condition(d, p, n):
    data = perm_data(d, p, n)
    assert sorted(data.sigma0) == list(range(1, n + 1))
    assert data.zero_condition_holds


# ---------- basis order and vertices ----------
def test_phi_basis_two_poles():
    basis = phi_basis((2, 2), 3)
    assert [(e.phi, e.pole, e.exponent) for e in basis] == [
        (0, 1, 0),
        (F(1, 2), 1, 1),
        (F(1, 2), 2, 1),
    ]


def test_slope_below_one_width():
    assert slope_below_one_width(2, [2, 2]) == 3
    assert slope_below_one_width(1, [3]) == 2


def test_vertex_data_cubic_supersingular_prime():
    vd = vertex_data(1, [3], 1, 5)
    assert vd.decomposition == (1,)
    assert vd.c0 == F(1, 3)
    assert vd.s0 == 2
    assert vd.upper == F(1, 2)
    assert vd.gap == F(1, 6)


def test_vertex_data_cubic_ordinary_prime():
    vd = vertex_data(1, [3], 1, 7)
    assert vd.s0 == 2
    assert vd.upper == vd.c0 == F(1, 3)


def test_vertex_data_second_vertex():
    vd = vertex_data(1, [3], 2, 5)
    assert (vd.c0, vd.s0, vd.upper) == (1, 4, 1)


def test_vertex_data_rejects_non_vertices():
    assert vertex_data(2, [2, 2], 1, 5).c0 == 0
    assert vertex_data(2, [2, 2], 3, 5).c0 == 1
    with pytest.raises(NotAVertexError):
        vertex_data(2, [2, 2], 2, 5)
    with pytest.raises(NotAVertexError):
        vertex_data(1, [3], 3, 5)


# ---------- truncation bounds and audits ----------
def test_truncation_argument_checks():
    ctx = SymContext(5, (3,))
    with pytest.raises(ValueError):
        truncation_error_bound(ctx, "q", 1, 1, 1, 1)
    with pytest.raises(IndexRangeError):
        truncation_error_bound(ctx, "t", 1, 1, 1, 1)
    with pytest.raises(IndexRangeError):
        truncation_error_bound(ctx, "w", 1, 1, 1, 1, w=-1)


def test_p_truncation_drops_nothing_at_infinity():
    bound = truncation_error_bound(SymContext(5, (3,)), "p", 1, 1, 1, 1)
    assert bound.bound is None
    assert bound.clears


@pytest.mark.parametrize(
    "orders,top",
    [
        ((2,), (((1, 2), 2),)),
        ((3,), (((1, 1), 1), ((1, 3), 1))),
    ],
)
def test_minimal_weight_audit_first_vertex(orders, top):
    report = minimal_weight_audit(1, orders, 5, 1)
    assert report.passes
    assert report.diagonal_only and report.local_match and report.lex_unique
    assert report.lex_top == top
    assert report.lex_bound == report.vertex_upper == F(1, 2)


def test_audit_refuses_large_expansions():
    with pytest.raises(BudgetExceededError):
        minimal_weight_audit(1, (7,), 5, 1)
