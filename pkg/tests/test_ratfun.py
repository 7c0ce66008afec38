"""Rational functions: validation, reduction at good primes, evaluation."""

from fractions import Fraction as F

import numpy as np
import pytest

from expsum.errors import BadPrimeError, InvalidFunctionError
from expsum.ff import enumerate_field, make_field
from expsum.ratfun import (
    INF,
    PoleEvaluationError,
    evaluate,
    evaluate_array,
    make_function,
    reduce_mod_p,
    validate,
)


def _two_pole():
    # x^2 + x + 2 x^-2
    return make_function([2, 2], {(1, 1): 1, (1, 2): 1, (2, 2): 2})


# ---------- validation ----------
def test_default_pole_placement():
    f = make_function([2, 1, 3], {(1, 2): 1, (2, 1): 1, (3, 3): 1})
    assert f.poles == (INF, F(0), F(1))
    assert f.degree == 2 + 1 + 3 + 3 - 2
    assert f.a(3, 3) == 1 and f.a(3, 1) == 0


def test_all_violations_reported_together():
    with pytest.raises(InvalidFunctionError) as exc:
        validate(
            {
                "ell": 2,
                "orders": [2, 2],
                "poles": ["inf", "1"],
                "coeffs": [{"j": 1, "i": 3, "value": 1}, {"j": 1, "i": 0, "value": 4}],
            }
        )
    msgs = exc.value.violations
    assert "P_2 must be 0" in msgs
    assert "nonzero constant term" in msgs
    assert any("outside the pole orders" in m for m in msgs)
    assert sum("leading coefficient" in m for m in msgs) == 2


def test_zero_constant_term_is_accepted():
    f = make_function([2], {(1, 2): 1, (1, 0): 0})
    assert f.coeffs == ((F(0), F(1)),)


def test_linear_polynomial_rejected():
    with pytest.raises(InvalidFunctionError):
        make_function([1], {(1, 1): 1})


def test_float_coefficients_rejected():
    with pytest.raises(InvalidFunctionError):
        validate({"ell": 1, "orders": [2], "coeffs": [{"j": 1, "i": 2, "value": 0.5}]})


def test_relocated_requires_distinct_poles():
    f = _two_pole()
    assert f.relocated([3]).poles == (INF, F(3))
    with pytest.raises(InvalidFunctionError):
        make_function([2, 1, 1], {(1, 2): 1, (2, 1): 1, (3, 1): 1}).relocated([1, 1])


def test_exact_evaluation():
    f = _two_pole()
    assert f.evaluate_exact(2) == 4 + 2 + F(2, 4)
    with pytest.raises(PoleEvaluationError):
        f.evaluate_exact(0)


# ---------- reduction ----------
@pytest.mark.parametrize(
    "f,p,condition",
    [
        (make_function([3], {(1, 3): 1}), 3, "pole order"),
        (make_function([2], {(1, 2): F(1, 5)}), 5, "not p-integral"),
        (make_function([2], {(1, 2): 7}), 7, "not a p-unit"),
        (
            make_function([1, 1, 1], {(1, 1): 1, (2, 1): 1, (3, 1): 1}, ["inf", "0", "5"]),
            5,
            "collide",
        ),
        (make_function([2], {(1, 2): 1}), 9, "not prime"),
    ],
)
def test_bad_primes(f, p, condition):
    with pytest.raises(BadPrimeError) as exc:
        reduce_mod_p(f, p)
    assert condition in exc.value.condition
    assert exc.value.p == p


def test_reduction_of_fractions():
    fbar = reduce_mod_p(make_function([2], {(1, 1): F(1, 2), (1, 2): 1}), 7)
    assert int(fbar.coeffs[0][0]) == 4  # 2^-1 mod 7
    assert fbar.q == 7 and fbar.degree == 2


def test_twist_scales_values():
    fbar = reduce_mod_p(_two_pole(), 5)
    g = fbar.twisted(3)
    for x in enumerate_field(fbar.field):
        if x.is_zero:
            continue
        assert evaluate(g, x) == evaluate(fbar, x) * 3
    with pytest.raises(ValueError):
        fbar.twisted(10)


# ---------- evaluation ----------
def test_evaluation_matches_exact_values():
    f = _two_pole()
    fbar = reduce_mod_p(f, 7)
    for x in range(1, 7):
        exact = f.evaluate_exact(x)
        expected = exact.numerator * pow(exact.denominator, -1, 7) % 7
        assert int(evaluate(fbar, fbar.field.from_int(x))) == expected


def test_evaluation_at_pole_raises():
    fbar = reduce_mod_p(_two_pole(), 5)
    with pytest.raises(PoleEvaluationError):
        evaluate(fbar, fbar.field.zero())


def test_batch_evaluation_in_extension():
    fbar = reduce_mod_p(_two_pole(), 3)
    field = make_field(3, 2)
    values, mask = evaluate_array(fbar, field, field.elements_array())
    assert not mask[0] and mask[1:].all()
    assert not values[0].any()
    for idx in range(1, field.order):
        x = field.from_index(idx)
        assert tuple(int(v) for v in values[idx]) == evaluate(fbar, x).coeffs


def test_pushed_is_identity_on_own_field():
    fbar = reduce_mod_p(_two_pole(), 5)
    assert fbar.pushed(fbar.field) is fbar
    assert np.array_equal(
        evaluate_array(fbar, fbar.field, fbar.field.elements_array())[1],
        np.arange(5) != 0,
    )
