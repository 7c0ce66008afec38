"""The rational function f in partial-fraction form, its validation, reduction at a good
prime, and evaluation over finite fields.

    f = sum_i a_{1,i} x^i + sum_{j>=2} sum_i a_{j,i} (x - P_j)^(-i)

P_1 is the point at infinity, P_2 = 0 when there are at least two poles. Infinity is a
marker, never a field element.
"""

from __future__ import annotations

import enum
import functools
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np
import sympy
from numpy.typing import NDArray
from pydantic import ValidationError

from .arith import vp
from .errors import BadPrimeError, InvalidFunctionError
from .ff import FieldElt, FiniteField, IntArray, embed, make_field
from .runtime.schemas import FunctionSpecModel


class PoleEvaluationError(ValueError):
    pass


class Marker(enum.Enum):
    INF = "inf"

    def __str__(self) -> str:
        return self.value


INF = Marker.INF

Pole = Fraction | Marker


@dataclass(frozen=True)
class RationalFunction:
    """coeffs[j][i-1] is a_{j+1,i}; poles[0] is INF."""

    pole_orders: tuple[int, ...]
    poles: tuple[Pole, ...]
    coeffs: tuple[tuple[Fraction, ...], ...]

    @property
    def ell(self) -> int:
        return len(self.pole_orders)

    @property
    def degree(self) -> int:
        return sum(self.pole_orders) + self.ell - 2

    def a(self, j: int, i: int) -> Fraction:
        """a_{j,i}, 1-based."""
        return self.coeffs[j - 1][i - 1]

    def relocated(self, poles: Sequence[Fraction | int]) -> RationalFunction:
        """Same orders and coefficient table, finite poles moved to `poles` (P_2, P_3, ...)."""
        if len(poles) != self.ell - 1:
            raise InvalidFunctionError(
                [f"{len(poles)} finite poles given, {self.ell - 1} needed"]
            )
        moved = tuple(Fraction(q) for q in poles)
        if len(set(moved)) != len(moved):
            raise InvalidFunctionError(["poles must be pairwise distinct"])
        return RationalFunction(self.pole_orders, (INF, *moved), self.coeffs)

    def evaluate_exact(self, x: Fraction | int) -> Fraction:
        x = Fraction(x)
        total = sum(
            (c * x**i for i, c in enumerate(self.coeffs[0], start=1)), Fraction(0)
        )
        for pole, row in zip(self.poles[1:], self.coeffs[1:], strict=True):
            assert isinstance(pole, Fraction)
            if x == pole:
                raise PoleEvaluationError(f"x = {x} is a pole")
            u = 1 / (x - pole)
            total += sum((c * u**i for i, c in enumerate(row, start=1)), Fraction(0))
        return total

    def __str__(self) -> str:
        terms = [f"{c}*x^{i}" for i, c in enumerate(self.coeffs[0], start=1) if c]
        for pole, row in zip(self.poles[1:], self.coeffs[1:], strict=True):
            base = "x" if pole == 0 else f"(x-{pole})"
            terms += [f"{c}*{base}^-{i}" for i, c in enumerate(row, start=1) if c]
        return " + ".join(terms)


def _parse_pole(raw: str) -> Pole:
    if raw.strip().lower() in {"inf", "infinity", "oo"}:
        return INF
    return Fraction(raw.strip())


def validate(spec: FunctionSpecModel | Mapping[str, Any]) -> RationalFunction:
    """Check the partial-fraction invariants; all violations are reported together."""
    if isinstance(spec, FunctionSpecModel):
        model = spec
    else:
        try:
            model = FunctionSpecModel.model_validate(spec)
        except ValidationError as exc:
            raise InvalidFunctionError(
                [e["msg"] for e in exc.errors(include_url=False)]
            ) from None
    ell, orders = model.ell, tuple(model.orders)
    problems: list[str] = []

    if model.poles:
        try:
            poles = tuple(_parse_pole(r) for r in model.poles)
        except (ValueError, ZeroDivisionError):
            raise InvalidFunctionError([f"unparseable pole list {model.poles}"]) from None
    else:
        # P_1 = inf, P_2 = 0, then 1, 2, ... for the remaining finite poles
        poles = (INF,) + tuple(Fraction(j) for j in range(ell - 1))
    if poles[0] is not INF:
        problems.append("P_1 must be inf")
    if any(q is INF for q in poles[1:]):
        problems.append("only P_1 may be inf")
    if ell >= 2 and poles[1] != 0:
        problems.append("P_2 must be 0")
    if len(set(poles)) != len(poles):
        problems.append("duplicate poles")

    table = [[Fraction(0)] * d for d in orders]
    seen: set[tuple[int, int]] = set()
    for c in model.coeffs:
        if (c.j, c.i) in seen:
            problems.append(f"coefficient a_{{{c.j},{c.i}}} given twice")
            continue
        seen.add((c.j, c.i))
        if c.i == 0:
            if c.value != 0:
                problems.append("nonzero constant term")
            continue
        if c.j > ell or c.i > orders[c.j - 1]:
            problems.append(f"coefficient a_{{{c.j},{c.i}}} outside the pole orders")
            continue
        table[c.j - 1][c.i - 1] = c.value
    for j, d in enumerate(orders, start=1):
        if table[j - 1][d - 1] == 0:
            problems.append(f"leading coefficient a_{{{j},{d}}} is zero")
    if ell == 1 and orders[0] < 2:
        problems.append("a polynomial f needs degree d_1 >= 2")
    if problems:
        raise InvalidFunctionError(problems)
    return RationalFunction(orders, poles, tuple(tuple(row) for row in table))


def make_function(
    orders: Sequence[int],
    coeffs: Mapping[tuple[int, int], Fraction | int | str],
    poles: Sequence[str] | None = None,
) -> RationalFunction:
    """validate() from Python values: coeffs maps (j, i) to a_{j,i}."""
    return validate(
        {
            "ell": len(orders),
            "orders": list(orders),
            "poles": list(poles or []),
            "coeffs": [{"j": j, "i": i, "value": v} for (j, i), v in coeffs.items()],
        }
    )


@dataclass(frozen=True)
class ReducedFunction:
    """f mod p over F_{p^a}: finite poles and coefficients as elements of `field`."""

    source: RationalFunction
    field: FiniteField
    poles: tuple[FieldElt, ...]  # P_2, ..., P_ell
    coeffs: tuple[tuple[FieldElt, ...], ...]

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def a(self) -> int:
        return self.field.m

    @property
    def q(self) -> int:
        return self.field.order

    @property
    def ell(self) -> int:
        return self.source.ell

    @property
    def orders(self) -> tuple[int, ...]:
        return self.source.pole_orders

    @property
    def degree(self) -> int:
        return self.source.degree

    def pushed(self, target: FiniteField) -> ReducedFunction:
        """The same function with poles and coefficients embedded into `target`."""
        return _pushed(self, target)

    def twisted(self, c: int) -> ReducedFunction:
        """c * f for c in F_p^x."""
        if c % self.p == 0:
            raise ValueError(f"twist {c} is not a unit mod {self.p}")
        return ReducedFunction(
            self.source,
            self.field,
            self.poles,
            tuple(tuple(x * c for x in row) for row in self.coeffs),
        )


def _reduce_rational(r: Fraction, field: FiniteField) -> FieldElt:
    return field.from_int(r.numerator * pow(r.denominator, -1, field.p))


def reduce_mod_p(f: RationalFunction, p: int, a: int = 1) -> ReducedFunction:
    """Reduction into F_{p^a}; BadPrimeError names the first failed good-prime condition."""
    if not sympy.isprime(p):
        raise BadPrimeError(p, "not prime")
    if a < 1:
        raise ValueError(f"residue degree must be >= 1, got {a}")
    for j, d in enumerate(f.pole_orders, start=1):
        if d % p == 0:
            raise BadPrimeError(p, f"p divides the pole order d_{j} = {d}")
    for j, row in enumerate(f.coeffs, start=1):
        for i, c in enumerate(row, start=1):
            if c and c.denominator % p == 0:
                raise BadPrimeError(p, f"a_{{{j},{i}}} = {c} is not p-integral")
        if vp(row[-1], p) != 0:
            raise BadPrimeError(p, f"leading coefficient a_{{{j},{len(row)}}} is not a p-unit")
    finite = [q for q in f.poles[1:] if isinstance(q, Fraction)]
    if any(q.denominator % p == 0 for q in finite):
        raise BadPrimeError(p, "a pole is not p-integral")
    residues = [q.numerator * pow(q.denominator, -1, p) % p for q in finite]
    if len(set(residues)) != len(residues):
        raise BadPrimeError(p, "poles collide mod p")
    if any(q != 0 and q.numerator % p == 0 for q in finite):
        raise BadPrimeError(p, "a nonzero pole is not a p-unit")

    field = make_field(p, a)
    return ReducedFunction(
        f,
        field,
        tuple(_reduce_rational(q, field) for q in finite),
        tuple(tuple(_reduce_rational(c, field) for c in row) for row in f.coeffs),
    )


@functools.lru_cache(maxsize=256)
def _pushed(fbar: ReducedFunction, target: FiniteField) -> ReducedFunction:
    if target == fbar.field:
        return fbar
    return ReducedFunction(
        fbar.source,
        target,
        tuple(embed(q, target) for q in fbar.poles),
        tuple(tuple(embed(c, target) for c in row) for row in fbar.coeffs),
    )


def evaluate(fbar: ReducedFunction, x: FieldElt) -> FieldElt:
    """f(x) in x's field (the function is pushed up when x lives in an extension)."""
    g = fbar.pushed(x.field)
    acc = x.field.zero()
    for c in reversed(g.coeffs[0]):
        acc = (acc + c) * x
    for pole, row in zip(g.poles, g.coeffs[1:], strict=True):
        u = x - pole
        if u.is_zero:
            raise PoleEvaluationError(f"x = {x} is a pole")
        inv = u.inverse()
        part = x.field.zero()
        for c in reversed(row):
            part = (part + c) * inv
        acc = acc + part
    return acc


def evaluate_array(
    fbar: ReducedFunction, field: FiniteField, xs: IntArray
) -> tuple[IntArray, NDArray[np.bool_]]:
    """Batch f(x) over rows of xs in `field`; the mask is False at poles (value 0 there)."""
    g = fbar.pushed(field)
    n = xs.shape[0]
    acc = field.batch_const(0, n)
    for c in reversed(g.coeffs[0]):
        acc = field.batch_mul(field.batch_add(acc, field.batch_const(c, n)), xs)
    mask = np.ones(n, dtype=bool)
    for pole, row in zip(g.poles, g.coeffs[1:], strict=True):
        u = field.batch_sub(xs, field.batch_const(pole, n))
        mask &= ~field.batch_is_zero(u)
        inv = field.batch_inv(u)
        part = field.batch_const(0, n)
        for c in reversed(row):
            part = field.batch_mul(field.batch_add(part, field.batch_const(c, n)), inv)
        acc = field.batch_add(acc, part)
    return acc, mask
