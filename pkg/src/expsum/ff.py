"""Finite fields F_{p^m}: deterministic construction, compatible embeddings, absolute
trace, and full-field enumeration.

Two arithmetic paths share one representation (coefficient vectors over F_p, low degree
first, modulo a fixed monic irreducible):

* scalar `FieldElt` arithmetic on sympy's dense GF(p)[x] routines, the reference path;
* numpy batch kernels over arrays of shape (n, m), the enumeration path that feeds the
  character-sum loops. Cross-tested against each other.

Moduli are the first irreducible in a fixed order (monic, tail coefficients read as a
base-p integer, smallest first). Embeddings are made compatible across whole towers by
fixing, per degree n, a primitive element omega_n whose norm-powers are conjugates of the
omega_m of every proper subfield; F_{p^m} -> F_{p^n} then sends omega_m to
omega_n^((p^n-1)/(p^m-1)), and composites of these maps agree by construction.
"""

from __future__ import annotations

import functools
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np
import sympy
from numpy.typing import NDArray
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import (
    gf_gcdex,
    gf_irreducible_p,
    gf_mul,
    gf_pow_mod,
    gf_rem,
)

from .errors import BudgetExceededError

IntArray = NDArray[np.int64]

DEFAULT_BUDGET = 10_000_000


class FieldMismatchError(ValueError):
    pass


def _to_gf(coeffs: tuple[int, ...]) -> list[int]:
    """low-first tuple -> sympy dense list (high-first, stripped)."""
    out = list(reversed(coeffs))
    while out and out[0] == 0:
        out.pop(0)
    return out


def _from_gf(poly: list[int], m: int) -> tuple[int, ...]:
    low = [int(c) for c in reversed(poly)]
    return tuple(low + [0] * (m - len(low)))


@dataclass(frozen=True)
class FiniteField:
    """F_{p^m} = F_p[x]/(modulus); `modulus` is monic, low degree first, length m+1."""

    p: int
    m: int
    modulus: tuple[int, ...]

    @property
    def order(self) -> int:
        return self.p**self.m

    @property
    def _mod_gf(self) -> list[int]:
        return list(reversed(self.modulus))

    # ---------- elements ----------
    def element(self, coeffs: tuple[int, ...] | list[int]) -> FieldElt:
        c = tuple(int(v) % self.p for v in coeffs)
        if len(c) > self.m:
            return FieldElt(self, _from_gf(gf_rem(_to_gf(c), self._mod_gf, self.p, ZZ), self.m))
        return FieldElt(self, c + (0,) * (self.m - len(c)))

    def from_int(self, c: int) -> FieldElt:
        return self.element((c,))

    def zero(self) -> FieldElt:
        return self.from_int(0)

    def one(self) -> FieldElt:
        return self.from_int(1)

    def gen(self) -> FieldElt:
        """Class of x (for the prime field, whose modulus is x, this is 0)."""
        return self.element((0, 1))

    def from_index(self, idx: int) -> FieldElt:
        """Element whose coefficient vector is the base-p expansion of idx."""
        if not 0 <= idx < self.order:
            raise ValueError(f"index {idx} outside F_{self.p}^{self.m}")
        digits = []
        for _ in range(self.m):
            idx, r = divmod(idx, self.p)
            digits.append(r)
        return FieldElt(self, tuple(digits))

    def __str__(self) -> str:
        return f"F_{self.p}^{self.m}"

    # ---------- batch (numpy) kernels ----------
    def elements_block(self, start: int, stop: int) -> IntArray:
        """Elements with index in [start, stop), shape (stop - start, m)."""
        idx = np.arange(start, min(stop, self.order), dtype=np.int64)
        cols = [(idx // self.p**i) % self.p for i in range(self.m)]
        return np.stack(cols, axis=1).astype(np.int64)

    def elements_array(self) -> IntArray:
        """All p^m elements in enumeration order, shape (p^m, m)."""
        return self.elements_block(0, self.order)

    def batch_const(self, c: FieldElt | int, n: int) -> IntArray:
        v = c.coeffs if isinstance(c, FieldElt) else self.from_int(c).coeffs
        return np.tile(np.array(v, dtype=np.int64), (n, 1))

    def batch_add(self, a: IntArray, b: IntArray) -> IntArray:
        return (a + b) % self.p

    def batch_sub(self, a: IntArray, b: IntArray) -> IntArray:
        return (a - b) % self.p

    def batch_scale(self, a: IntArray, c: int) -> IntArray:
        return (a * (c % self.p)) % self.p

    def batch_mul(self, a: IntArray, b: IntArray) -> IntArray:
        p, m = self.p, self.m
        n = a.shape[0]
        prod = np.zeros((n, 2 * m - 1), dtype=np.int64)
        for i in range(m):
            ai = a[:, i]
            for j in range(m):
                prod[:, i + j] = (prod[:, i + j] + ai * b[:, j]) % p
        # x^m = -(modulus[0] + ... + modulus[m-1] x^(m-1))
        for k in range(2 * m - 2, m - 1, -1):
            top = prod[:, k]
            for t in range(m):
                if self.modulus[t]:
                    prod[:, k - m + t] = (prod[:, k - m + t] - top * self.modulus[t]) % p
        return prod[:, :m] % p

    def batch_pow(self, a: IntArray, e: int) -> IntArray:
        result = self.batch_const(1, a.shape[0])
        base = a
        while e:
            if e & 1:
                result = self.batch_mul(result, base)
            base = self.batch_mul(base, base)
            e >>= 1
        return result

    def batch_inv(self, a: IntArray) -> IntArray:
        """x^(q-2): the inverse on nonzero rows, 0 on zero rows."""
        out = self.batch_pow(a, self.order - 2)
        out[self.batch_is_zero(a)] = 0
        return out

    def trace_form(self) -> IntArray:
        """Tr(x^i) for i < m; the absolute trace is the dot product with this vector."""
        return np.array(
            [trace_to_prime(self.element((0,) * i + (1,))) for i in range(self.m)],
            dtype=np.int64,
        )

    def batch_trace(self, a: IntArray) -> IntArray:
        return (a @ self.trace_form()) % self.p

    def batch_is_zero(self, a: IntArray) -> NDArray[np.bool_]:
        return ~a.any(axis=1)


@dataclass(frozen=True)
class FieldElt:
    field: FiniteField
    coeffs: tuple[int, ...]

    def _same(self, other: FieldElt) -> None:
        if other.field != self.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")

    def _lift(self, other: FieldElt | int) -> FieldElt:
        if isinstance(other, int):
            return self.field.from_int(other)
        self._same(other)
        return other

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    @property
    def index(self) -> int:
        return sum(c * self.field.p**i for i, c in enumerate(self.coeffs))

    @property
    def in_prime_field(self) -> bool:
        return not any(self.coeffs[1:])

    def __add__(self, other: FieldElt | int) -> FieldElt:
        o = self._lift(other)
        p = self.field.p
        pairs = zip(self.coeffs, o.coeffs, strict=True)
        return FieldElt(self.field, tuple((a + b) % p for a, b in pairs))

    __radd__ = __add__

    def __neg__(self) -> FieldElt:
        p = self.field.p
        return FieldElt(self.field, tuple((-a) % p for a in self.coeffs))

    def __sub__(self, other: FieldElt | int) -> FieldElt:
        return self + (-self._lift(other))

    def __rsub__(self, other: int) -> FieldElt:
        return self._lift(other) - self

    def __mul__(self, other: FieldElt | int) -> FieldElt:
        o = self._lift(other)
        f = self.field
        prod = gf_rem(gf_mul(_to_gf(self.coeffs), _to_gf(o.coeffs), f.p, ZZ), f._mod_gf, f.p, ZZ)
        return FieldElt(f, _from_gf(prod, f.m))

    __rmul__ = __mul__

    def inverse(self) -> FieldElt:
        if self.is_zero:
            raise ZeroDivisionError(f"0 has no inverse in {self.field}")
        f = self.field
        s, _, h = gf_gcdex(_to_gf(self.coeffs), f._mod_gf, f.p, ZZ)
        if h != [1]:
            raise ZeroDivisionError(f"{self} is not invertible in {f}")
        return FieldElt(f, _from_gf(gf_rem(s, f._mod_gf, f.p, ZZ), f.m))

    def __truediv__(self, other: FieldElt | int) -> FieldElt:
        return self * self._lift(other).inverse()

    def __pow__(self, e: int) -> FieldElt:
        f = self.field
        if e < 0:
            return self.inverse() ** (-e)
        if e == 0:
            return f.one()
        poly = gf_pow_mod(_to_gf(self.coeffs), e, f._mod_gf, f.p, ZZ)
        return FieldElt(f, _from_gf(poly, f.m))

    def frobenius(self) -> FieldElt:
        return self ** self.field.p

    def __int__(self) -> int:
        if not self.in_prime_field:
            raise ValueError(f"{self} is not in the prime field")
        return self.coeffs[0]

    def __str__(self) -> str:
        if self.field.m == 1:
            return str(self.coeffs[0])
        return "[" + ",".join(map(str, self.coeffs)) + "]"


# ---------- construction ----------
@functools.lru_cache(maxsize=128)
def make_field(p: int, m: int) -> FiniteField:
    """F_{p^m} with the first irreducible modulus in the fixed order; F_p uses x."""
    if not sympy.isprime(p):
        raise ValueError(f"{p} is not prime")
    if m < 1:
        raise ValueError(f"extension degree must be >= 1, got {m}")
    if m == 1:
        return FiniteField(p, 1, (0, 1))
    for tail in range(p**m):
        coeffs = []
        t = tail
        for _ in range(m):
            t, r = divmod(t, p)
            coeffs.append(r)
        if coeffs[0] == 0:
            continue
        modulus = tuple(coeffs) + (1,)
        if gf_irreducible_p(list(reversed(modulus)), p, ZZ):
            return FiniteField(p, m, modulus)
    raise AssertionError(f"no irreducible polynomial of degree {m} over F_{p}")


def trace_to_prime(x: FieldElt) -> int:
    """Absolute trace Tr_{F_{p^m}/F_p}(x) = sum_{i<m} x^(p^i), as an integer in [0, p)."""
    acc, y = x.field.zero(), x
    for _ in range(x.field.m):
        acc = acc + y
        y = y.frobenius()
    if not acc.in_prime_field:
        raise AssertionError(f"trace of {x} left the prime field")
    return acc.coeffs[0]


def enumerate_field(field: FiniteField, budget: int | None = None) -> Iterator[FieldElt]:
    """Every element exactly once, in index order; refuses fields beyond the budget."""
    if budget is not None and field.order > budget:
        raise BudgetExceededError(field.order, budget)
    for idx in range(field.order):
        yield field.from_index(idx)


# ---------- compatible embeddings ----------
def _poly_mul(a: list[FieldElt], b: list[FieldElt]) -> list[FieldElt]:
    f = a[0].field
    out = [f.zero() for _ in range(len(a) + len(b) - 1)]
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


@functools.lru_cache(maxsize=64)
def _min_poly(p: int, m: int) -> tuple[int, ...]:
    """Minimal polynomial over F_p (low degree first) of the distinguished omega_m."""
    w = distinguished_primitive(p, m)
    f = w.field
    poly = [f.one()]
    conj = w
    for _ in range(m):
        poly = _poly_mul(poly, [-conj, f.one()])
        conj = conj.frobenius()
    return tuple(int(c) for c in poly)


def _eval_prime_poly(coeffs: tuple[int, ...], x: FieldElt) -> FieldElt:
    acc = x.field.zero()
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


@functools.lru_cache(maxsize=64)
def distinguished_primitive(p: int, n: int) -> FieldElt:
    """omega_n: first primitive element (index order) whose norm-power into every proper
    subfield F_{p^m} is a root of the minimal polynomial of omega_m."""
    field = make_field(p, n)
    if n == 1:
        return field.from_int(int(sympy.primitive_root(p)) % p)
    q = field.order
    exps = [(q - 1) // r for r in sympy.primefactors(q - 1)]
    subs = [m for m in sympy.divisors(n) if m < n]
    for idx in range(1, q):
        w = field.from_index(idx)
        if any((w**e) == field.one() for e in exps):
            continue
        ok = True
        for m in subs:
            power = w ** ((q - 1) // (p**m - 1))
            if not _eval_prime_poly(_min_poly(p, m), power).is_zero:
                ok = False
                break
        if ok:
            return w
    raise AssertionError(f"no compatible primitive element in F_{p}^{n}")


def _discrete_log(x: FieldElt, base: FieldElt) -> int:
    acc = x.field.one()
    for e in range(x.field.order - 1):
        if acc == x:
            return e
        acc = acc * base
    raise ValueError(f"{x} is not a power of {base}")


@functools.lru_cache(maxsize=128)
def _basis_images(p: int, m: int, n: int) -> tuple[FieldElt, ...]:
    """Images of 1, x, ..., x^(m-1) of F_{p^m} inside F_{p^n}."""
    src = make_field(p, m)
    w_src = distinguished_primitive(p, m)
    w_img = distinguished_primitive(p, n) ** ((p**n - 1) // (p**m - 1))
    gen_img = w_img ** _discrete_log(src.gen(), w_src)
    images = [make_field(p, n).one()]
    for _ in range(1, m):
        images.append(images[-1] * gen_img)
    return tuple(images)


def embed(x: FieldElt, target: FiniteField) -> FieldElt:
    """Ring-homomorphic image of x in a field whose degree is a multiple of x's."""
    src = x.field
    if src.p != target.p or target.m % src.m:
        raise FieldMismatchError(f"{src} does not embed in {target}")
    if src == target:
        return x
    if x.in_prime_field:
        return target.from_int(x.coeffs[0])
    acc = target.zero()
    for c, img in zip(x.coeffs, _basis_images(src.p, src.m, target.m), strict=True):
        if c:
            acc = acc + img * c
    return acc
