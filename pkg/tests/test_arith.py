"""Exact cyclotomic arithmetic: reduction, Galois action, norms, valuations."""

from fractions import Fraction

import pytest

from expsum.arith import (
    CycloElt,
    MismatchedPrimeError,
    OrdValue,
    cyclo_arith,
    norm_to_Q,
    pi_valuation,
    vp,
)


# ---------- representation ----------
def test_zeta_to_the_p_minus_one_folds():
    # zeta^2 = -1 - zeta in Q(zeta_3)
    assert CycloElt.zeta(3, 2).coeffs == (Fraction(-1), Fraction(-1))


def test_sum_of_all_roots_is_zero():
    total = sum((CycloElt.zeta(5, i) for i in range(5)), CycloElt.zero(5))
    assert total.is_zero


def test_zeta_has_order_p():
    assert CycloElt.zeta(7) ** 7 == CycloElt.one(7)


def test_wrong_length_rejected():
    with pytest.raises(ValueError):
        CycloElt(5, (Fraction(1),))


def test_mixed_primes_rejected():
    with pytest.raises(MismatchedPrimeError):
        cyclo_arith(CycloElt.one(3), CycloElt.one(5), "add")


def test_int_vector_needs_integrality():
    assert (CycloElt.zeta(3) * 2 + 1).int_vector() == [1, 2]
    with pytest.raises(ValueError):
        (CycloElt.one(3) / 2).int_vector()


# ---------- Galois action ----------
def test_conjugate_permutes_roots():
    assert CycloElt.zeta(5).conjugate(2) == CycloElt.zeta(5, 2)


def test_conjugate_by_multiple_of_p_rejected():
    with pytest.raises(ValueError):
        CycloElt.zeta(5).conjugate(10)


# ---------- norms and valuations ----------
def test_norm_of_one_plus_two_zeta3():
    # (1 + 2z)(1 + 2z^2) = 5 + 2(z + z^2) = 3
    assert norm_to_Q(CycloElt.from_ints(3, [1, 2])) == 3


def test_norm_of_rational():
    assert norm_to_Q(CycloElt.from_rational(5, Fraction(2, 3))) == Fraction(16, 81)


def test_vp():
    assert vp(Fraction(50, 3), 5) == 2
    assert vp(Fraction(2, 25), 5) == -2
    with pytest.raises(ValueError):
        vp(0, 5)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_ord_of_pi(p):
    assert pi_valuation(CycloElt.zeta(p) - 1) == OrdValue.of(Fraction(1, p - 1))


def test_ord_of_p_is_one():
    assert pi_valuation(CycloElt.from_rational(5, 5)) == OrdValue.of(1)


def test_ord_of_gauss_like_sum():
    assert pi_valuation(CycloElt.from_ints(3, [1, 2])) == OrdValue.of(Fraction(1, 2))


def test_ord_of_non_integral_element():
    x = (CycloElt.zeta(5) - 1) / 5
    assert pi_valuation(x) == OrdValue.of(Fraction(1, 4) - 1)


def test_ord_additive_on_products():
    x = CycloElt.from_ints(5, [2, 1, 0, 3])
    y = (CycloElt.zeta(5) - 1) ** 3
    assert pi_valuation(x * y) == pi_valuation(x) + pi_valuation(y)


def test_ord_of_zero_is_infinite():
    v = pi_valuation(CycloElt.zero(7))
    assert v.is_infinite
    assert OrdValue.of(100) < v
    assert str(v) == "inf"


def test_ord_scaled_to_q_units():
    assert OrdValue.of(1).scaled(2) == OrdValue.of(Fraction(1, 2))
    assert OrdValue.infinity().scaled(3).is_infinite
