"""Finite fields: construction, scalar vs batch arithmetic, trace, embeddings."""

import numpy as np
import pytest

from expsum.errors import BudgetExceededError
from expsum.ff import (
    FieldMismatchError,
    distinguished_primitive,
    embed,
    enumerate_field,
    make_field,
    trace_to_prime,
)


# ---------- construction ----------
def test_first_irreducible_modulus():
    assert make_field(3, 2).modulus == (1, 0, 1)  # x^2 + 1
    assert make_field(5, 2).modulus == (2, 0, 1)  # x^2 + 1 splits mod 5


def test_prime_field_and_bad_input():
    assert make_field(7, 1).order == 7
    with pytest.raises(ValueError):
        make_field(6, 1)
    with pytest.raises(ValueError):
        make_field(5, 0)


def test_from_index_round_trip():
    f = make_field(3, 3)
    assert [f.from_index(i).index for i in range(f.order)] == list(range(f.order))
    with pytest.raises(ValueError):
        f.from_index(f.order)


def test_enumeration_budget():
    f = make_field(2, 5)
    assert len(list(enumerate_field(f, budget=32))) == 32
    with pytest.raises(BudgetExceededError):
        list(enumerate_field(f, budget=31))


# ---------- scalar arithmetic ----------
def test_inverse_and_division():
    f = make_field(5, 2)
    for i in range(1, f.order):
        x = f.from_index(i)
        assert x * x.inverse() == f.one()
    with pytest.raises(ZeroDivisionError):
        f.zero().inverse()


def test_multiplicative_group_order():
    f = make_field(3, 3)
    for i in range(1, f.order):
        assert f.from_index(i) ** (f.order - 1) == f.one()


def test_frobenius_fixes_prime_field():
    f = make_field(7, 2)
    for c in range(7):
        assert f.from_int(c).frobenius() == f.from_int(c)


def test_mixed_fields_rejected():
    with pytest.raises(FieldMismatchError):
        make_field(3, 2).one() + make_field(3, 3).one()


def test_int_of_non_prime_field_element():
    with pytest.raises(ValueError):
        int(make_field(3, 2).gen())


# ---------- batch kernels ----------
def test_batch_mul_matches_scalar():
    f = make_field(3, 3)
    xs = f.elements_array()
    ys = xs[::-1].copy()
    prod = f.batch_mul(xs, ys)
    for idx in range(f.order):
        x, y = f.from_index(idx), f.from_index(f.order - 1 - idx)
        assert tuple(int(v) for v in prod[idx]) == (x * y).coeffs


def test_batch_inverse_zero_row_is_zero():
    f = make_field(5, 2)
    inv = f.batch_inv(f.elements_array())
    assert not inv[0].any()
    assert tuple(int(v) for v in inv[7]) == f.from_index(7).inverse().coeffs


@pytest.mark.parametrize("p,m", [(2, 1), (2, 2), (3, 1)])
def test_batch_inverse_zero_row_is_zero_in_tiny_fields(p, m):
    f = make_field(p, m)
    inv = f.batch_inv(f.elements_array())
    assert not inv[0].any()
    for idx in range(1, f.order):
        assert tuple(int(v) for v in inv[idx]) == f.from_index(idx).inverse().coeffs


def test_batch_trace_matches_scalar():
    f = make_field(5, 3)
    traces = f.batch_trace(f.elements_array())
    expected = np.array([trace_to_prime(f.from_index(i)) for i in range(f.order)])
    assert (traces == expected).all()


# ---------- trace and embeddings ----------
def test_trace_of_prime_field_element():
    f = make_field(5, 3)
    assert trace_to_prime(f.from_int(2)) == 6 % 5


def test_trace_is_balanced():
    f = make_field(3, 2)
    counts = [0, 0, 0]
    for x in enumerate_field(f):
        counts[trace_to_prime(x)] += 1
    assert counts == [3, 3, 3]


def test_distinguished_primitive_generates():
    w = distinguished_primitive(3, 2)
    powers = {(w**e).index for e in range(8)}
    assert len(powers) == 8


def test_embedding_is_a_ring_map():
    f4, f16 = make_field(2, 2), make_field(2, 4)
    for i in range(4):
        for j in range(4):
            x, y = f4.from_index(i), f4.from_index(j)
            assert embed(x * y, f16) == embed(x, f16) * embed(y, f16)
            assert embed(x + y, f16) == embed(x, f16) + embed(y, f16)


def test_embeddings_commute_through_towers():
    f4, f16, f256 = make_field(2, 2), make_field(2, 4), make_field(2, 8)
    for i in range(4):
        x = f4.from_index(i)
        assert embed(embed(x, f16), f256) == embed(x, f256)


def test_embedding_needs_divisible_degree():
    with pytest.raises(FieldMismatchError):
        embed(make_field(3, 2).gen(), make_field(3, 3))


def test_embedding_preserves_trace_scaling():
    # Tr_{F_9}(embed x) = 2 * Tr_{F_3}(x) over F_3
    f3, f9 = make_field(3, 1), make_field(3, 2)
    for c in range(3):
        assert trace_to_prime(embed(f3.from_int(c), f9)) == (2 * c) % 3
