"""Exact arithmetic in Q(zeta_p) and the valuation that turns L-function coefficients into
Newton-polygon heights.

Elements are stored over the power basis {1, zeta, ..., zeta^(p-2)} with every reduction
done eagerly, so two equal elements always have identical coefficient tuples. Valuations
go through the norm: Q_p(zeta_p) is totally ramified of degree p-1 over Q_p, hence
ord_p(x) = v_p(N(x)) / (p-1). No floating point anywhere.
"""

from __future__ import annotations

import functools
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Literal

import sympy
from sympy import Poly, QQ

Rational = int | Fraction

_X = sympy.Symbol("x")


class MismatchedPrimeError(ValueError):
    pass


@functools.total_ordering
@dataclass(frozen=True)
class OrdValue:
    """A valuation in ord_p units (ord_p(p) = 1); `value is None` means +infinity."""

    value: Fraction | None

    @classmethod
    def infinity(cls) -> OrdValue:
        return cls(None)

    @classmethod
    def of(cls, v: Rational) -> OrdValue:
        return cls(Fraction(v))

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, OrdValue):
            return NotImplemented
        if self.value is None:
            return False
        if other.value is None:
            return True
        return self.value < other.value

    def __add__(self, other: OrdValue) -> OrdValue:
        if self.value is None or other.value is None:
            return OrdValue(None)
        return OrdValue(self.value + other.value)

    def scaled(self, a: int) -> OrdValue:
        """ord_q = ord_p / a for q = p^a."""
        return self if self.value is None else OrdValue(self.value / a)

    def __str__(self) -> str:
        return "inf" if self.value is None else str(self.value)


def _reduce(p: int, vec: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Fold exponents mod p, then eliminate zeta^(p-1) = -(1 + ... + zeta^(p-2))."""
    folded = [Fraction(0)] * p
    for e, c in enumerate(vec):
        if c:
            folded[e % p] += c
    top = folded[p - 1]
    return tuple(c - top for c in folded[: p - 1])


@dataclass(frozen=True)
class CycloElt:
    """sum_i coeffs[i] * zeta_p^i, reduced modulo the p-th cyclotomic polynomial."""

    p: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.coeffs) != self.p - 1:
            raise ValueError(
                f"expected {self.p - 1} coefficients for p={self.p}, "
                f"got {len(self.coeffs)}"
            )

    # ---------- constructors ----------
    @classmethod
    def from_rational(cls, p: int, c: Rational) -> CycloElt:
        return cls(p, (Fraction(c),) + (Fraction(0),) * (p - 2))

    @classmethod
    def zero(cls, p: int) -> CycloElt:
        return cls.from_rational(p, 0)

    @classmethod
    def one(cls, p: int) -> CycloElt:
        return cls.from_rational(p, 1)

    @classmethod
    def zeta(cls, p: int, power: int = 1) -> CycloElt:
        vec = [Fraction(0)] * p
        vec[power % p] = Fraction(1)
        return cls(p, _reduce(p, vec))

    @classmethod
    def from_exponent_counts(cls, p: int, counts: Sequence[Rational]) -> CycloElt:
        """sum_t counts[t] * zeta^t for t = 0..len(counts)-1 (exponents taken mod p)."""
        return cls(p, _reduce(p, [Fraction(c) for c in counts]))

    @classmethod
    def from_ints(cls, p: int, coeffs: Iterable[int]) -> CycloElt:
        return cls(p, _reduce(p, [Fraction(c) for c in coeffs]))

    # ---------- predicates ----------
    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    @property
    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    @property
    def is_integral(self) -> bool:
        """Membership in Z[zeta_p]: the power basis is an integral basis."""
        return all(c.denominator == 1 for c in self.coeffs)

    @property
    def denominator(self) -> int:
        return lcm(*(c.denominator for c in self.coeffs)) if self.coeffs else 1

    def int_vector(self) -> list[int]:
        if not self.is_integral:
            raise ValueError(f"{self} is not in Z[zeta_{self.p}]")
        return [int(c) for c in self.coeffs]

    # ---------- arithmetic ----------
    def _check(self, other: CycloElt) -> None:
        if other.p != self.p:
            raise MismatchedPrimeError(f"p={self.p} vs p={other.p}")

    def __add__(self, other: CycloElt | Rational) -> CycloElt:
        if not isinstance(other, CycloElt):
            other = CycloElt.from_rational(self.p, other)
        self._check(other)
        return CycloElt(
            self.p,
            tuple(a + b for a, b in zip(self.coeffs, other.coeffs, strict=True)),
        )

    __radd__ = __add__

    def __neg__(self) -> CycloElt:
        return CycloElt(self.p, tuple(-a for a in self.coeffs))

    def __sub__(self, other: CycloElt | Rational) -> CycloElt:
        return self + (-other)

    def __rsub__(self, other: Rational) -> CycloElt:
        return (-self) + other

    def __mul__(self, other: CycloElt | Rational) -> CycloElt:
        if not isinstance(other, CycloElt):
            c = Fraction(other)
            return CycloElt(self.p, tuple(a * c for a in self.coeffs))
        self._check(other)
        p = self.p
        prod = [Fraction(0)] * p
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    prod[(i + j) % p] += a * b
        return CycloElt(p, _reduce(p, prod))

    __rmul__ = __mul__

    def __truediv__(self, c: Rational) -> CycloElt:
        c = Fraction(c)
        return CycloElt(self.p, tuple(a / c for a in self.coeffs))

    def __pow__(self, e: int) -> CycloElt:
        if e < 0:
            raise ValueError("negative powers are not supported")
        result, base = CycloElt.one(self.p), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def conjugate(self, c: int) -> CycloElt:
        """Galois action zeta -> zeta^c, for c prime to p."""
        if c % self.p == 0:
            raise ValueError(f"{c} is not prime to {self.p}")
        vec = [Fraction(0)] * self.p
        for i, a in enumerate(self.coeffs):
            vec[(i * c) % self.p] += a
        return CycloElt(self.p, _reduce(self.p, vec))

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            terms.append(str(c) if i == 0 else f"{c}*z^{i}" if i > 1 else f"{c}*z")
        return " + ".join(terms) or "0"


def cyclo_arith(x: CycloElt, y: CycloElt, op: Literal["add", "sub", "mul"]) -> CycloElt:
    if x.p != y.p:
        raise MismatchedPrimeError(f"p={x.p} vs p={y.p}")
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    raise ValueError(f"unknown op {op!r}")


@functools.lru_cache(maxsize=64)
def _cyclotomic(p: int) -> Poly:
    return Poly(sympy.cyclotomic_poly(p, _X), _X, domain=QQ)


def norm_to_Q(x: CycloElt) -> Fraction:
    """N_{Q(zeta_p)/Q}(x) = Res(Phi_p, g) where g represents x (Phi_p is monic)."""
    p = x.p
    if x.is_zero:
        return Fraction(0)
    if x.is_rational:
        return x.coeffs[0] ** (p - 1)
    g = Poly(
        [sympy.Rational(c.numerator, c.denominator) for c in reversed(x.coeffs)],
        _X,
        domain=QQ,
    )
    r = sympy.Rational(_cyclotomic(p).resultant(g))
    return Fraction(int(r.p), int(r.q))


def vp(n: Rational, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    f = Fraction(n)
    if f == 0:
        raise ValueError("v_p(0) is infinite")
    return int(sympy.multiplicity(p, abs(f.numerator))) - int(
        sympy.multiplicity(p, f.denominator)
    )


def pi_valuation(x: CycloElt) -> OrdValue:
    """ord_p(x) with ord_p(p) = 1; +inf for zero.

    Non-integral elements are scaled by their denominator D first:
    ord(x) = v_p(N(D x)) / (p-1) - v_p(D).
    """
    if x.is_zero:
        return OrdValue.infinity()
    p = x.p
    if x.is_rational:
        return OrdValue.of(vp(x.coeffs[0], p))
    den = x.denominator
    cleared = x * den
    n = norm_to_Q(cleared)
    return OrdValue.of(Fraction(vp(n, p), p - 1) - vp(den, p))
