"""Symbolic layer of the Frobenius matrix: weight-graded F-polynomials, formal expansions
of the H and C entries with truncation bounds, the r-matrix and sigma_0, and vertex data.

No p-adic value is computed here. A coefficient is a formal product

    gamma^g * rational * prod lambda_m * prod (opaque factors)

with an exact valuation when every factor is known (lambda_m = gamma^m / m! for m < p is
folded into gamma^g and the rational) and only a lower bound otherwise. Poles follow the
normal form of the function: P_1 = inf, P_2 = 0 (so every positive power of P_2-hat
vanishes); other poles and all pole differences are p-adic units.
"""

from __future__ import annotations

import functools
import itertools
import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Literal

import numpy as np
import sympy
from scipy.optimize import linear_sum_assignment

from .arith import vp
from .errors import BudgetExceededError, InvariantViolationError
from .polygon import hodge_polygon
from .runtime.obs import bind_logger

_log = bind_logger(component="dworksym")

EXHAUSTIVE_SIGMA_MAX = 6
AUDIT_MAX_K = 4
AUDIT_MAX_ORDER = 4
PRIME_SEARCH_LIMIT = 2000

TruncationKind = Literal["p", "t", "w"]
Exponents = tuple[tuple[tuple[int, int], int], ...]


class IndexRangeError(ValueError):
    pass


class NotAVertexError(ValueError):
    pass


def _ceil(a: int, b: int) -> int:
    return -(-a // b)


def _lo_add(x: Fraction | None, y: Fraction | None) -> Fraction | None:
    """Sum of lower bounds; None is +inf."""
    return None if x is None or y is None else x + y


def _lo_min(*xs: Fraction | None) -> Fraction | None:
    finite = [x for x in xs if x is not None]
    return min(finite) if finite else None


@dataclass(frozen=True)
class SymContext:
    p: int
    orders: tuple[int, ...]

    def __post_init__(self) -> None:
        if not sympy.isprime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if not self.orders or any(d < 1 for d in self.orders):
            raise ValueError(f"pole orders must be positive, got {self.orders}")
        if any(d % self.p == 0 for d in self.orders):
            raise ValueError(f"p={self.p} divides a pole order in {self.orders}")

    @property
    def ell(self) -> int:
        return len(self.orders)

    @property
    def degree(self) -> int:
        return sum(self.orders) + self.ell - 2

    def d(self, j: int) -> int:
        return self.orders[j - 1]

    def per_step(self, v: Fraction | int) -> Fraction:
        """v / (p-1): ord_p of gamma^v."""
        return Fraction(v) / (self.p - 1)


# ---------- scalars ----------
@dataclass(frozen=True, order=True)
class Opaque:
    """A factor known only through its valuation: pole powers, pole gaps, C^{n,m}."""

    name: str
    bound: Fraction = Fraction(0)
    exact: bool = True


@dataclass(frozen=True)
class Scalar:
    p: int
    gamma: int = 0
    rational: Fraction = Fraction(1)
    lambdas: tuple[int, ...] = ()
    opaque: tuple[Opaque, ...] = ()

    @property
    def bound(self) -> Fraction:
        b = Fraction(self.gamma + sum(self.lambdas), self.p - 1) + vp(self.rational, self.p)
        return b + sum((o.bound for o in self.opaque), Fraction(0))

    @property
    def exact(self) -> bool:
        return not self.lambdas and all(o.exact for o in self.opaque)

    def __mul__(self, other: Scalar) -> Scalar:
        return Scalar(
            self.p,
            self.gamma + other.gamma,
            self.rational * other.rational,
            tuple(sorted(self.lambdas + other.lambdas)),
            tuple(sorted(self.opaque + other.opaque)),
        )

    def scaled(self, c: Fraction | int) -> Scalar:
        return replace(self, rational=self.rational * c)

    def __str__(self) -> str:
        parts = [str(self.rational)] if self.rational != 1 else []
        if self.gamma:
            parts.append(f"g^{self.gamma}")
        parts += [f"L{m}" for m in self.lambdas] + [o.name for o in self.opaque]
        return "*".join(parts) or "1"


def lambda_descriptor(m: int, p: int) -> Scalar:
    """lambda_m: gamma^m / m! exactly for m < p, opaque with ord >= m/(p-1) beyond."""
    if m < 0:
        raise IndexRangeError(f"lambda index {m} < 0")
    if m == 0:
        return Scalar(p)
    if m <= p - 1:
        return Scalar(p, gamma=m, rational=Fraction(1, math.factorial(m)))
    return Scalar(p, lambdas=(m,))


# ---------- graded polynomials ----------
def _merge_exps(a: Exponents, b: Exponents) -> Exponents:
    acc = dict(a)
    for key, k in b:
        acc[key] = acc.get(key, 0) + k
    return tuple(sorted(acc.items()))


@dataclass(frozen=True)
class GradedMonomial:
    """prod A_{j,i}^k with a formal sum of scalar descriptors."""

    exps: Exponents
    scalars: tuple[Scalar, ...]
    weight: int = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "weight", sum(i * k for (_, i), k in self.exps))

    @property
    def bound(self) -> Fraction:
        return min(s.bound for s in self.scalars)

    def lex_key(self, orders: Sequence[int]) -> tuple[int, ...]:
        """Exponents ordered pole by pole, A_{j,d_j} first down to A_{j,1}."""
        e = dict(self.exps)
        return tuple(
            e.get((j, i), 0) for j, d in enumerate(orders, start=1) for i in range(d, 0, -1)
        )


@dataclass(frozen=True)
class GradedPoly:
    """A formal sum of graded monomials times gamma^offset (offset in ord_p units).

    `tail_bound` bounds the valuation of everything a truncation dropped, offset included;
    None means nothing was dropped.
    """

    ctx: SymContext
    monomials: tuple[GradedMonomial, ...] = ()
    offset: Fraction = Fraction(0)
    tail_bound: Fraction | None = None

    @classmethod
    def from_terms(
        cls,
        ctx: SymContext,
        terms: Iterable[tuple[Exponents, Scalar]],
        offset: Fraction = Fraction(0),
        tail_bound: Fraction | None = None,
    ) -> GradedPoly:
        merged: dict[Exponents, list[Scalar]] = {}
        for exps, s in terms:
            merged.setdefault(exps, []).append(s)
        mons = tuple(GradedMonomial(e, tuple(v)) for e, v in sorted(merged.items()))
        return cls(ctx, mons, offset, tail_bound)

    @classmethod
    def zero(cls, ctx: SymContext) -> GradedPoly:
        return cls(ctx)

    @classmethod
    def constant(cls, ctx: SymContext, s: Scalar) -> GradedPoly:
        return cls.from_terms(ctx, [((), s)])

    def terms(self) -> Iterator[tuple[Exponents, Scalar]]:
        for m in self.monomials:
            for s in m.scalars:
                yield m.exps, s

    @property
    def is_zero(self) -> bool:
        return not self.monomials

    @property
    def valuation_bound(self) -> Fraction | None:
        if self.is_zero:
            return None
        return self.offset + min(m.bound for m in self.monomials)

    @property
    def full_bound(self) -> Fraction | None:
        """Lower bound for the untruncated value."""
        return _lo_min(self.valuation_bound, self.tail_bound)

    @property
    def min_weight(self) -> int | None:
        return min((m.weight for m in self.monomials), default=None)

    def minimal_weight_part(self) -> GradedPoly:
        w = self.min_weight
        return replace(
            self,
            monomials=tuple(m for m in self.monomials if m.weight == w),
            tail_bound=None,
        )

    def __add__(self, other: GradedPoly) -> GradedPoly:
        if self.is_zero and self.tail_bound is None:
            return other
        if other.is_zero and other.tail_bound is None:
            return self
        if self.offset != other.offset:
            raise ValueError(f"gamma offsets differ: {self.offset} vs {other.offset}")
        return GradedPoly.from_terms(
            self.ctx,
            itertools.chain(self.terms(), other.terms()),
            self.offset,
            _lo_min(self.tail_bound, other.tail_bound),
        )

    def __mul__(self, other: GradedPoly) -> GradedPoly:
        terms = [
            (_merge_exps(a.exps, b.exps), x * y)
            for a in self.monomials
            for b in other.monomials
            for x in a.scalars
            for y in b.scalars
        ]
        tail = _lo_min(
            _lo_add(self.tail_bound, other.full_bound),
            _lo_add(other.tail_bound, self.valuation_bound),
        )
        return GradedPoly.from_terms(self.ctx, terms, self.offset + other.offset, tail)

    def scaled(self, s: Scalar) -> GradedPoly:
        return GradedPoly.from_terms(
            self.ctx,
            ((e, x * s) for e, x in self.terms()),
            self.offset,
            _lo_add(self.tail_bound, s.bound),
        )

    def shifted(self, offset: Fraction) -> GradedPoly:
        return replace(
            self, offset=self.offset + offset, tail_bound=_lo_add(self.tail_bound, offset)
        )


# ---------- F_{j,n} ----------
def _weighted_compositions(n: int, d: int) -> Iterator[tuple[int, ...]]:
    """All (m_1, ..., m_d) >= 0 with sum k m_k = n."""
    if d == 0:
        if n == 0:
            yield ()
        return
    for top in range(n // d + 1):
        for rest in _weighted_compositions(n - d * top, d - 1):
            yield rest + (top,)


def _check_pole(ctx: SymContext, j: int) -> None:
    if not 1 <= j <= ctx.ell:
        raise IndexRangeError(f"pole index {j} outside 1..{ctx.ell}")


@functools.lru_cache(maxsize=4096)
def f_poly(ctx: SymContext, j: int, n: int) -> GradedPoly:
    """F_{j,n} = sum lambda_{m_1} ... lambda_{m_d} A_{j,1}^{m_1} ... A_{j,d}^{m_d}."""
    _check_pole(ctx, j)
    if n < 0:
        return GradedPoly.zero(ctx)
    terms = []
    for ms in _weighted_compositions(n, ctx.d(j)):
        s = Scalar(ctx.p)
        exps = []
        for k, m in enumerate(ms, start=1):
            if m:
                s = s * lambda_descriptor(m, ctx.p)
                exps.append(((j, k), m))
        terms.append((tuple(exps), s))
    return GradedPoly.from_terms(ctx, terms)


def f_valuation_bound(ctx: SymContext, j: int, n: int) -> Fraction:
    if n < 0:
        raise IndexRangeError(f"F_{{{j},{n}}} has no valuation bound (n < 0)")
    bound = ctx.per_step(_ceil(n, ctx.d(j)))
    lowest = f_poly(ctx, j, n).valuation_bound
    if lowest is not None and lowest < bound:
        raise InvariantViolationError(f"F_{{{j},{n}}} has a monomial of ord {lowest} < {bound}")
    return bound


# ---------- H expansions ----------
def _binom(a: int, b: int) -> int:
    if a == -1 and b == -1:
        return 1  # the m = 0 term of an expansion with no shift
    if b < 0 or a < 0 or b > a:
        return 0
    return math.comb(a, b)


def _pole_power(ctx: SymContext, j: int, e: int) -> Scalar | None:
    """P_j-hat^e; None when it vanishes."""
    if e == 0:
        return Scalar(ctx.p)
    if j == 2:
        return None
    return Scalar(ctx.p, opaque=(Opaque(f"P{j}^{e}"),))


def _pole_gap(ctx: SymContext, j: int, J1: int, e: int) -> Scalar:
    if e == 0:
        return Scalar(ctx.p)
    return Scalar(ctx.p, opaque=(Opaque(f"(P{j}-P{J1})^-{e}"),))


def _weighted_sum(
    ctx: SymContext, j: int, items: Iterable[tuple[int, int, Scalar | None]]
) -> GradedPoly:
    total = GradedPoly.zero(ctx)
    for m, c, extra in items:
        if c and extra is not None:
            total = total + f_poly(ctx, j, m).scaled(extra.scaled(c))
    return total


def _infinity_factor(ctx: SymContext, j: int, nj: int, shift: int) -> GradedPoly:
    """Coefficient of X^-(nj+shift) in F_j(X_j) X_j^shift expanded at infinity."""
    return _weighted_sum(
        ctx,
        j,
        (
            (m, _binom(nj + shift - 1, m + shift - 1), _pole_power(ctx, j, nj - m))
            for m in range(nj + 1)
        ),
    )


def _gap_factor(
    ctx: SymContext, j: int, J1: int, nj: int, shift: int, w: int
) -> GradedPoly:
    """Coefficient of X_J1^-nj in F_j(X_j) X_j^shift expanded at P_J1; m cut at w."""
    return _weighted_sum(
        ctx,
        j,
        (
            (
                m,
                (-1) ** (m + shift) * _binom(nj + m + shift - 1, m + shift - 1),
                _pole_gap(ctx, j, J1, nj + m + shift),
            )
            for m in range(w + 1)
        ),
    )


def _polynomial_part_factor(
    ctx: SymContext, J1: int, n1: int, shift: int, w: int
) -> GradedPoly:
    """Coefficient of X_J1^-n1 in F_1(X) X^shift expanded at P_J1; w terms past the first."""
    lo = max(0, n1 - shift)
    return _weighted_sum(
        ctx,
        1,
        (
            (m, _binom(m + shift, n1), _pole_power(ctx, J1, m + shift - n1))
            for m in range(lo, lo + w + 1)
        ),
    )


def _h_factor(
    ctx: SymContext, J1: int, J: int, j: int, nj: int, i: int, w: int
) -> GradedPoly:
    if J1 == 1:
        return _infinity_factor(ctx, j, nj, i if j == J else 0)
    if j == 1:
        return _polynomial_part_factor(ctx, J1, nj, i if J == 1 else 0, w)
    return _gap_factor(ctx, j, J1, nj, i if j == J else 0, w)


def _h_base(J1: int, J: int, n: int, i: int) -> int:
    """n_{J1} when every free index is 0."""
    if J1 == 1:
        return n - i if J == 1 else n + i
    return n - i if J == J1 else n


def _h_tail(ctx: SymContext, J1: int, J: int, n: int, i: int, w: int) -> Fraction | None:
    if ctx.ell == 1:
        return None
    base = _h_base(J1, J, n, i)
    spill = _ceil(max(0, base + w + 1), ctx.d(J1))
    if J1 == 1:
        return ctx.per_step(spill)
    dmin = min(ctx.d(j) for j in range(1, ctx.ell + 1) if j != J1)
    cut = _ceil(w + 1, dmin) + _ceil(max(0, base), ctx.d(J1))
    return ctx.per_step(min(spill, cut))


def _check_h_indices(ctx: SymContext, J1: int, J: int, n: int, i: int, w: int) -> None:
    problems = []
    for name, j in (("J1", J1), ("J", J)):
        if not 1 <= j <= ctx.ell:
            problems.append(f"{name}={j} outside 1..{ctx.ell}")
    if n < 0:
        problems.append(f"n={n} < 0")
    if i < (0 if J == 1 else 1):
        problems.append(f"i={i} out of range for J={J}")
    if w < 0:
        problems.append(f"window {w} < 0")
    if problems:
        raise IndexRangeError("; ".join(problems))


@functools.lru_cache(maxsize=8192)
def h_expansion(ctx: SymContext, J1: int, J: int, n: int, i: int, w: int) -> GradedPoly:
    """H_{J1,J}^{n,i}: free indices n_j (j != J1) in [0, w], n_{J1} fixed by the constraint."""
    _check_h_indices(ctx, J1, J, n, i, w)
    others = [j for j in range(1, ctx.ell + 1) if j != J1]
    base = _h_base(J1, J, n, i)
    total = GradedPoly.zero(ctx)
    for free in itertools.product(range(w + 1), repeat=len(others)):
        top = base + sum(free)
        if top < 0:
            continue
        term = f_poly(ctx, J1, top)
        for j, nj in zip(others, free, strict=True):
            term = term * _h_factor(ctx, J1, J, j, nj, i, w)
            if term.is_zero:
                break
        total = total + term
    return replace(total, tail_bound=_h_tail(ctx, J1, J, n, i, w))


# ---------- C entries ----------
def _c_coefficient(ctx: SymContext, n: int, m: int) -> Scalar:
    name = f"C^{{{n},{m}}}"
    edge = (n - 1) * ctx.p
    if m <= edge:
        return Scalar(ctx.p, opaque=(Opaque(name, Fraction(1), exact=False),))
    if m == edge + 1:
        return Scalar(ctx.p, opaque=(Opaque(name),))
    return Scalar(ctx.p, opaque=(Opaque(name, Fraction(0), exact=False),))


def _check_c_indices(
    ctx: SymContext, J1: int, J: int, n: int, i: int, t: int | None
) -> None:
    problems = []
    for name, j in (("J1", J1), ("J", J)):
        if not 1 <= j <= ctx.ell:
            problems.append(f"{name}={j} outside 1..{ctx.ell}")
    if n < (0 if J1 == 1 else 1):
        problems.append(f"n={n} out of range for J1={J1}")
    if i < (0 if J == 1 else 1):
        problems.append(f"i={i} out of range for J={J}")
    if t is not None and not 1 <= t <= ctx.p:
        problems.append(f"truncation t={t} outside 1..{ctx.p}")
    if problems:
        raise IndexRangeError("; ".join(problems))


def entry_offset(ctx: SymContext, J1: int, J: int, n: int, i: int) -> Fraction:
    """ord_p of the gamma^(i/d_J - n/d_J1) prefix."""
    return ctx.per_step(Fraction(i, ctx.d(J)) - Fraction(n, ctx.d(J1)))


@functools.lru_cache(maxsize=4096)
def c_entry(
    ctx: SymContext, J1: int, J: int, n: int, i: int, t: int | None = None, w: int = 0
) -> GradedPoly:
    """C_{J1,J}^{n,i}; for J1 >= 3, t keeps m in [(n-1)p+1, (n-1)p+t] (None: all m)."""
    _check_c_indices(ctx, J1, J, n, i, t)
    offset = entry_offset(ctx, J1, J, n, i)
    p = ctx.p
    if J1 <= 2:
        return h_expansion(ctx, J1, J, n * p, i, w).shifted(offset)
    lo, hi = (n, n * p) if t is None else ((n - 1) * p + 1, (n - 1) * p + t)
    total = GradedPoly.zero(ctx)
    for m in range(lo, hi + 1):
        power = _pole_power(ctx, J1, n * p - m)
        assert power is not None  # J1 >= 3: a unit pole
        total = total + h_expansion(ctx, J1, J, m, i, w).scaled(
            _c_coefficient(ctx, n, m) * power
        )
    return total.shifted(offset)


# ---------- truncation bounds ----------
@dataclass(frozen=True)
class TruncationBound:
    kind: str
    bound: Fraction | None  # None: nothing is dropped
    threshold: Fraction
    min_prime: int | None

    @property
    def clears(self) -> bool:
        return self.bound is None or self.bound > self.threshold


def _threshold(ctx: SymContext, J1: int, n: int) -> Fraction:
    return Fraction(n - 1, ctx.d(J1)) + ctx.per_step(ctx.degree)


def _dropped_bound(
    ctx: SymContext,
    kind: TruncationKind,
    J1: int,
    J: int,
    n: int,
    i: int,
    t: int | None,
    w: int,
) -> Fraction | None:
    p, dJ1 = ctx.p, ctx.d(J1)
    offset = entry_offset(ctx, J1, J, n, i)
    if kind == "p":
        # m in [n, (n-1)p]: C^{n,m} has ord >= 1, H^{m,i} has ord >= (m-i)/(d (p-1))
        if J1 <= 2 or (n - 1) * p < n:
            return None
        return offset + 1 + max(Fraction(0), ctx.per_step(Fraction(n - i, dJ1)))
    if kind == "t":
        tt = p if t is None else t
        if J1 <= 2 or tt >= p:
            return None
        m = (n - 1) * p + tt + 1
        return offset + max(Fraction(0), ctx.per_step(Fraction(m - i, dJ1)))
    # window tails grow with the H superscript, so the first kept m is the worst
    m = n * p if J1 <= 2 else (n - 1) * p + 1
    return _lo_add(offset, _h_tail(ctx, J1, J, m, i, w))


def _clears(
    ctx: SymContext,
    kind: TruncationKind,
    J1: int,
    J: int,
    n: int,
    i: int,
    t: int | None,
    w: int,
) -> bool:
    b = _dropped_bound(ctx, kind, J1, J, n, i, t, w)
    return b is None or b > _threshold(ctx, J1, n)


def _min_prime(
    orders: tuple[int, ...],
    kind: TruncationKind,
    J1: int,
    J: int,
    n: int,
    i: int,
    t: int | None,
    w: int,
) -> int | None:
    """Smallest good prime from which the bound clears the threshold up to the search limit."""
    primes = [q for q in sympy.primerange(2, PRIME_SEARCH_LIMIT) if all(d % q for d in orders)]
    last_fail = None
    for q in primes:
        if kind == "t" and t is not None and t > q:
            last_fail = q
            continue
        if not _clears(SymContext(q, orders), kind, J1, J, n, i, t, w):
            last_fail = q
    if last_fail is None:
        return primes[0]
    if last_fail == primes[-1]:
        return None
    return primes[primes.index(last_fail) + 1]


def truncation_error_bound(
    ctx: SymContext,
    kind: TruncationKind,
    J1: int,
    J: int,
    n: int,
    i: int,
    *,
    t: int | None = None,
    w: int = 0,
) -> TruncationBound:
    """Certified ord of what a truncation drops from C_{J1,J}^{n,i}.

    "p": ^pC against C. "t": ^tC against ^pC. "w": windowed H inside ^tC (t = p when
    not given) against ^tC itself.
    """
    if kind not in ("p", "t", "w"):
        raise ValueError(f"unknown truncation kind {kind!r}")
    _check_c_indices(ctx, J1, J, n, i, t)
    if n > ctx.d(J1) or i > ctx.d(J):
        raise IndexRangeError(f"(n, i) = ({n}, {i}) exceeds the pole orders")
    if kind == "t" and t is None:
        raise IndexRangeError("kind 't' needs a truncation length t")
    if w < 0:
        raise IndexRangeError(f"window {w} < 0")
    return TruncationBound(
        kind,
        _dropped_bound(ctx, kind, J1, J, n, i, t, w),
        _threshold(ctx, J1, n),
        _min_prime(ctx.orders, kind, J1, J, n, i, t, w),
    )


def smallest_truncation(
    ctx: SymContext, kind: Literal["t", "w"], J1: int, J: int, n: int, i: int, cap: int = 64
) -> int | None:
    """Least t (resp. w) whose dropped terms clear the threshold at this prime."""
    _check_c_indices(ctx, J1, J, n, i, None)
    sizes = range(1, ctx.p + 1) if kind == "t" else range(cap + 1)
    for size in sizes:
        t, w = (size, 0) if kind == "t" else (None, size)
        if _clears(ctx, kind, J1, J, n, i, t, w):
            return size
    return None


# ---------- r-matrix and sigma_0 ----------
def r_matrix(d: int, p: int, n: int) -> tuple[tuple[int, ...], ...]:
    """r_{ij} = least non-negative residue of -(ip - j) mod d, 1 <= i, j <= n."""
    if math.gcd(p, d) != 1:
        raise ValueError(f"gcd(p={p}, d={d}) != 1")
    if n < 1:
        raise ValueError(f"size {n} < 1")
    r = p % d
    rows = []
    for i in range(1, n + 1):
        row = []
        for j in range(1, n + 1):
            v = (-(i * p - j)) % d
            if v != d * _ceil(r * i - j, d) - (r * i - j):
                raise InvariantViolationError(f"r_{{{i},{j}}} conventions disagree")
            row.append(v)
        rows.append(tuple(row))
    return tuple(rows)


def _lex_key(d: int, p: int, sigma: Sequence[int]) -> tuple[int, ...] | None:
    """Exponents (A_d, ..., A_1) of prod_i top(F_{ip - sigma(i)}); None if one vanishes."""
    top = 0
    counts = [0] * d
    for i, j in enumerate(sigma, start=1):
        m = i * p - j
        if m < 0:
            return None
        top += m // d
        counts[m % d] += 1
    return (top, *(counts[t] for t in range(d - 1, 0, -1)))


def _sigma0_exhaustive(d: int, p: int, n: int) -> tuple[int, ...]:
    best: tuple[int, ...] | None = None
    best_key: tuple[int, ...] | None = None
    tie = False
    for sigma in itertools.permutations(range(1, n + 1)):
        key = _lex_key(d, p, sigma)
        if key is None:
            continue
        if best_key is None or key > best_key:
            best, best_key, tie = sigma, key, False
        elif key == best_key:
            tie = True
    if best is None or tie:
        raise InvariantViolationError(f"no unique lex-maximal permutation (d={d}, p={p}, n={n})")
    return best


def _sigma0_assignment(d: int, p: int, n: int) -> tuple[int, ...]:
    """Forced zero matching, then a max-weight assignment on lexicographic weights."""
    rm = r_matrix(d, p, n)
    forced = {i: k for i in range(n) for k in range(n) if rm[i][k] == 0}
    rows = [i for i in range(n) if i not in forced]
    cols = [k for k in range(n) if k not in set(forced.values())]
    sigma = dict(forced)
    if rows:
        base = n + 1
        weights = np.zeros((len(rows), len(cols)))
        for a, i in enumerate(rows):
            for b, k in enumerate(cols):
                m = (i + 1) * p - (k + 1)
                rho = m % d
                weights[a, b] = (m // d) * base ** (d - 1) + (base ** (rho - 1) if rho else 0)
        if float(np.abs(weights).max()) * n >= 2.0**53:
            raise ValueError(f"assignment weights exceed float precision (d={d}, n={n})")
        ri, ci = linear_sum_assignment(weights, maximize=True)
        for a, b in zip(ri, ci, strict=True):
            sigma[rows[a]] = cols[b]
    return tuple(sigma[i] + 1 for i in range(n))


def sigma0(d: int, p: int, n: int) -> tuple[int, ...]:
    """sigma_0 as images of 1..n; both constructions are run and compared when n is small."""
    r_matrix(d, p, n)
    built = _sigma0_assignment(d, p, n) if p >= n else None
    if n <= EXHAUSTIVE_SIGMA_MAX:
        found = _sigma0_exhaustive(d, p, n)
        if built is not None and built != found:
            raise InvariantViolationError(
                f"sigma_0 constructions disagree: {built} vs {found} (d={d}, p={p}, n={n})"
            )
        return found
    if built is None:
        raise ValueError(f"p={p} < n={n}: no assignment construction")
    return built


@dataclass(frozen=True)
class PermData:
    d: int
    p: int
    n: int
    r_matrix: tuple[tuple[int, ...], ...]
    sigma0: tuple[int, ...]

    @property
    def r(self) -> int:
        return self.p % self.d

    @property
    def zero_condition_holds(self) -> bool:
        """sigma_0(i) = k whenever r_{ik} = 0."""
        return all(
            self.sigma0[i] == k + 1
            for i, row in enumerate(self.r_matrix)
            for k, v in enumerate(row)
            if v == 0
        )

    @property
    def r_sum(self) -> int:
        return sum(self.r_matrix[i][self.sigma0[i] - 1] for i in range(self.n))


def perm_data(d: int, p: int, n: int) -> PermData:
    return PermData(d, p, n, r_matrix(d, p, n), sigma0(d, p, n))


# ---------- basis order and vertex data ----------
@dataclass(frozen=True, order=True)
class BasisElt:
    phi: Fraction
    pole: int
    exponent: int


def phi_value(pole: int, exponent: int, orders: Sequence[int]) -> Fraction:
    d = orders[pole - 1]
    return Fraction(exponent, d) if pole <= 2 else Fraction(exponent - 1, d)


def phi_basis(orders: Sequence[int], count: int) -> tuple[BasisElt, ...]:
    """First `count` basis elements by phi, ties broken by pole index then exponent.

    With two or more poles the constant (pole 1, exponent 0) leads the list.
    """
    elts = [BasisElt(Fraction(0), 1, 0)] if len(orders) >= 2 else []
    for j in range(1, len(orders) + 1):
        elts += [BasisElt(phi_value(j, e, orders), j, e) for e in range(1, count + 1)]
    return tuple(sorted(elts)[:count])


def gamma_offsets_cancel(ctx: SymContext, size: int) -> bool:
    """Over every principal minor of the first `size` basis elements, each permutation's
    gamma prefixes multiply to gamma^0."""
    basis = [e for e in phi_basis(ctx.orders, size + 1) if not (e.pole == 1 and e.exponent == 0)]
    basis = basis[:size]
    for r in range(1, size + 1):
        for subset in itertools.combinations(basis, r):
            for perm in itertools.permutations(subset):
                total = sum(
                    (
                        entry_offset(ctx, row.pole, col.pole, row.exponent, col.exponent)
                        for row, col in zip(subset, perm, strict=True)
                    ),
                    Fraction(0),
                )
                if total != 0:
                    return False
    return True


def slope_below_one_width(ell: int, orders: Sequence[int]) -> int:
    return ell - 1 + sum(d - 1 for d in orders)


@dataclass(frozen=True)
class VertexData:
    k: int
    p: int
    decomposition: tuple[int, ...]
    c0: Fraction
    s_values: tuple[Fraction, ...]
    s0: Fraction

    @property
    def upper(self) -> Fraction:
        """s_0 / (p-1), the height generic f reaches at this vertex."""
        return self.s0 / (self.p - 1)

    @property
    def gap(self) -> Fraction:
        return self.upper - self.c0


def _s_value(d: int, p: int, kj: int, pole: int) -> Fraction:
    n, sign = (kj, 1) if pole <= 2 else (kj - 1, -1)
    base = Fraction((p - 1) * kj * (kj + sign), 2 * d)
    if n <= 0:
        return base
    return base + Fraction(perm_data(d, p, n).r_sum, d)


def vertex_data(ell: int, orders: Sequence[int], k: int, p: int) -> VertexData:
    orders = tuple(orders)
    if len(orders) != ell:
        raise ValueError(f"{len(orders)} pole orders for ell = {ell}")
    SymContext(p, orders)
    hp = hodge_polygon(ell, orders)
    xs = {x for x, _ in hp.vertices}
    if not 1 <= k <= slope_below_one_width(ell, orders) or Fraction(k) not in xs:
        raise NotAVertexError(f"k={k} is not a vertex of the slope < 1 part of HP")
    basis = phi_basis(orders, k)
    decomposition = tuple(
        sum(1 for e in basis if e.pole == j and e.exponent >= 1) for j in range(1, ell + 1)
    )
    c0 = sum((e.phi for e in basis), Fraction(0))
    if c0 != hp.height_at(k):
        raise InvariantViolationError(f"c_0 = {c0} but HP({k}) = {hp.height_at(k)}")
    s_values = tuple(
        _s_value(d, p, kj, j)
        for j, (d, kj) in enumerate(zip(orders, decomposition, strict=True), start=1)
    )
    s0 = sum(s_values, Fraction(0))
    excess = s0 - c0 * (p - 1)
    if not 0 <= excess < k:
        raise InvariantViolationError(f"s_0 - c_0 (p-1) = {excess} outside [0, {k})")
    _log.info("dworksym.vertex_data", p=p, k=k, c0=str(c0), s0=str(s0))
    return VertexData(k, p, decomposition, c0, s_values, s0)


# ---------- minimal weight audit ----------
def _perm_sign(perm: Sequence[int]) -> int:
    sign, seen = 1, [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length, j = 0, start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _formal_det(ctx: SymContext, rows: Sequence[Sequence[GradedPoly]]) -> GradedPoly:
    n = len(rows)
    total = GradedPoly.constant(ctx, Scalar(ctx.p)) if n == 0 else GradedPoly.zero(ctx)
    for perm in itertools.permutations(range(n)):
        prod = GradedPoly.constant(ctx, Scalar(ctx.p, rational=Fraction(_perm_sign(perm))))
        for r in range(n):
            prod = prod * rows[r][perm[r]]
            if prod.is_zero:
                break
        if not prod.is_zero:
            total = total + prod
    return total


def local_determinant(ctx: SymContext, pole: int, size: int) -> GradedPoly:
    """Formal expansion of det(F_{pole, ip - j}) for 1 <= i, j <= size."""
    _check_pole(ctx, pole)
    rows = [
        [f_poly(ctx, pole, i * ctx.p - j) for j in range(1, size + 1)]
        for i in range(1, size + 1)
    ]
    return _formal_det(ctx, rows)


@dataclass(frozen=True)
class MinimalWeightReport:
    ell: int
    orders: tuple[int, ...]
    p: int
    k: int
    min_weight: int
    diagonal_only: bool
    local_match: bool
    lex_unique: bool
    lex_top: Exponents
    lex_bound: Fraction
    bound_minimal: bool
    vertex_upper: Fraction

    @property
    def passes(self) -> bool:
        return (
            self.diagonal_only
            and self.local_match
            and self.lex_unique
            and self.bound_minimal
            and self.lex_bound == self.vertex_upper
        )


def minimal_weight_audit(
    ell: int, orders: Sequence[int], p: int, k: int, w: int = 1
) -> MinimalWeightReport:
    """Expand det(^pM^{[k]}) formally and check where its minimal-weight terms come from."""
    orders = tuple(orders)
    if k > AUDIT_MAX_K or max(orders) > AUDIT_MAX_ORDER:
        raise BudgetExceededError(max(k, *orders), AUDIT_MAX_K, what="symbolic expansion")
    vd = vertex_data(ell, orders, k, p)
    ctx = SymContext(p, orders)
    basis = phi_basis(orders, k)
    entries = [
        [
            c_entry(ctx, r.pole, c.pole, r.exponent, c.exponent, p, w).minimal_weight_part()
            for c in basis
        ]
        for r in basis
    ]

    weighted: list[tuple[tuple[int, ...], int]] = []
    for perm in itertools.permutations(range(k)):
        factors = [entries[r][perm[r]] for r in range(k)]
        if any(f.is_zero for f in factors):
            continue
        weighted.append((perm, sum(f.min_weight or 0 for f in factors)))
    min_weight = min(wt for _, wt in weighted)
    winners = [perm for perm, wt in weighted if wt == min_weight]
    diagonal_only = all(
        basis[r].pole == basis[perm[r]].pole for perm in winners for r in range(k)
    )

    det_min = GradedPoly.zero(ctx)
    for perm in winners:
        prod = GradedPoly.constant(ctx, Scalar(p, rational=Fraction(_perm_sign(perm))))
        for r in range(k):
            prod = prod * entries[r][perm[r]]
        det_min = det_min + prod

    local = GradedPoly.constant(ctx, Scalar(p))
    for j, kj in enumerate(vd.decomposition, start=1):
        size = kj if j <= 2 else kj - 1
        if size > 0:
            local = local * local_determinant(ctx, j, size)
    local_match = {m.exps for m in det_min.monomials} == {m.exps for m in local.monomials}

    top_key = max(m.lex_key(orders) for m in det_min.monomials)
    tops = [m for m in det_min.monomials if m.lex_key(orders) == top_key]
    lex_unique = len(tops) == 1 and len(tops[0].scalars) == 1
    lex_bound = det_min.offset + tops[0].bound
    bound_minimal = lex_bound == det_min.valuation_bound

    report = MinimalWeightReport(
        ell=ell,
        orders=orders,
        p=p,
        k=k,
        min_weight=min_weight,
        diagonal_only=diagonal_only,
        local_match=local_match,
        lex_unique=lex_unique,
        lex_top=tops[0].exps,
        lex_bound=lex_bound,
        bound_minimal=bound_minimal,
        vertex_upper=vd.upper,
    )
    _log.info(
        "dworksym.minimal_weight_audit",
        p=p,
        k=k,
        orders=str(orders),
        passes=report.passes,
    )
    return report
