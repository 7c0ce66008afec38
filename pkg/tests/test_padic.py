"""Precision-capped Z_p[zeta_p] arithmetic, gamma and Artin-Hasse constants."""

from fractions import Fraction as F

import pytest

from expsum.errors import InsufficientPrecisionError, InvariantViolationError
from expsum.padic import (
    PadicCyclo,
    PrecisionCert,
    artin_hasse_at_gamma,
    artin_hasse_coefficients,
    lambda_coeffs,
    log_series_terms,
    solve_gamma,
    teichmuller_int,
)


# ---------- elements and certificates ----------
def test_pi_has_valuation_one_over_p_minus_one():
    cert = PadicCyclo.pi(5, 4).cert()
    assert cert.exact and cert.v == F(1, 4)


def test_certificate_of_p_and_of_zero():
    assert PadicCyclo.from_rational(5, 4, 25).cert().v == 2
    zero = PadicCyclo.zero(5, 4).cert()
    assert not zero.exact and zero.v == 4


def test_certificate_bound_cannot_exceed_precision():
    with pytest.raises(ValueError):
        PrecisionCert(3, F(4), exact=True)


def test_non_integral_rational_rejected():
    with pytest.raises(ValueError):
        PadicCyclo.from_rational(5, 4, F(1, 5))


def test_unit_inverse():
    x = PadicCyclo.of_ints(5, 4, [1, 2])
    assert x * x.inverse() == PadicCyclo.one(5, 4)
    with pytest.raises(ZeroDivisionError):
        PadicCyclo.pi(5, 4).inverse()


def test_precision_is_tracked():
    x = PadicCyclo.from_rational(3, 5, 7)
    assert (x + PadicCyclo.one(3, 2)).N == 2
    with pytest.raises(InsufficientPrecisionError):
        x.with_precision(6)
    with pytest.raises(InsufficientPrecisionError):
        x.agrees(PadicCyclo.one(3, 2), 3)


def test_divide_by_p():
    assert PadicCyclo.from_rational(5, 4, 25).divide_by_p(2) == PadicCyclo.one(5, 2)
    with pytest.raises(InvariantViolationError):
        PadicCyclo.one(5, 4).divide_by_p(1)


def test_zeta_has_order_p():
    z = PadicCyclo.zeta(7, 3)
    assert z**7 == PadicCyclo.one(7, 3)
    assert z**3 == PadicCyclo.zeta(7, 3, 3)


# ---------- Teichmuller lifts ----------
@pytest.mark.parametrize("p,N", [(3, 4), (5, 3), (7, 2)])
def test_teichmuller_lifts(p, N):
    mod = p**N
    for x in range(1, p):
        t = teichmuller_int(x, p, N)
        assert t % p == x
        assert pow(t, p - 1, mod) == 1
    assert teichmuller_int(0, p, N) == 0


# ---------- Artin-Hasse and gamma ----------
def test_log_series_truncation():
    assert log_series_terms(3, 4) == 2
    assert log_series_terms(5, 1) == 1


def test_artin_hasse_coefficients():
    assert artin_hasse_coefficients(5, 3)[:3] == (1, 1, F(1, 2))
    assert artin_hasse_coefficients(2, 2) == (1, 1, 1)
    for p in (3, 5):
        assert all(e.denominator % p for e in artin_hasse_coefficients(p, 30))


@pytest.mark.parametrize("p,N", [(3, 4), (5, 3)])
def test_gamma_valuation(p, N):
    assert solve_gamma(p, N).cert().v == F(1, p - 1)


@pytest.mark.parametrize("p,N,branch", [(3, 4, 1), (5, 3, 1), (5, 3, 2)])
def test_artin_hasse_at_gamma_is_a_root_of_unity(p, N, branch):
    value = artin_hasse_at_gamma(p, N, branch)
    assert value.agrees(PadicCyclo.zeta(p, N, branch), N)


def test_lambda_valuations_grow():
    lams = lambda_coeffs(5, 8, 3)
    for m, lam in enumerate(lams):
        assert lam.cert().v >= min(F(m, 4), 3)


def test_gamma_argument_checks():
    with pytest.raises(ValueError):
        solve_gamma(5, 1)
    with pytest.raises(ValueError):
        solve_gamma(5, 3, branch=5)
