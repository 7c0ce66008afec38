"""Exponential sums, L-functions over Z[zeta_p], Artin-Schreier point counts, zeta
numerators, and their Newton polygons.

Everything is driven by one enumeration per extension degree k: the trace histogram
h[t] = #{x in F_{q^k}, not a pole : Tr(f(x)) = t}. From it,

    S_k(c f) = sum_t h[t] zeta^(c t)      N_k = p h[0] + ell

so all twists and the point count share a single pass over the field. Histograms are
cached per (function, k).
"""

from __future__ import annotations

import functools
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import CycloElt, OrdValue, pi_valuation, vp
from .errors import BadPrimeError, BudgetExceededError, InvariantViolationError
from .ff import DEFAULT_BUDGET, enumerate_field, make_field, trace_to_prime
from .polygon import (
    Polygon,
    hodge_polygon,
    hull_of_heights,
    is_symmetric,
    lies_above,
    max_gap,
    slope_run_length,
)
from .ratfun import (
    PoleEvaluationError,
    RationalFunction,
    ReducedFunction,
    evaluate,
    evaluate_array,
    reduce_mod_p,
)
from .runtime.obs import bind_logger, enumeration_span

_log = bind_logger(component="lfun")

_BLOCK = 1 << 16


@dataclass(frozen=True)
class LPolynomial:
    p: int
    a: int
    coeffs: tuple[CycloElt, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def q(self) -> int:
        return self.p**self.a

    def ords(self) -> list[OrdValue]:
        """ord_q of each coefficient."""
        return [pi_valuation(c).scaled(self.a) for c in self.coeffs]

    def int_vectors(self) -> list[list[int]]:
        return [c.int_vector() for c in self.coeffs]

    def conjugate(self, c: int) -> LPolynomial:
        return LPolynomial(self.p, self.a, tuple(x.conjugate(c) for x in self.coeffs))


@dataclass(frozen=True)
class ZetaNumerator:
    """P(T) with Z(T) = P(T) / ((1-T)(1-qT)); integer coefficients, P(0) = 1."""

    p: int
    a: int
    coeffs: tuple[int, ...]
    counts: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def q(self) -> int:
        return self.p**self.a


# ---------- enumeration ----------
@functools.lru_cache(maxsize=512)
def trace_histogram(
    fbar: ReducedFunction, k: int, budget: int = DEFAULT_BUDGET
) -> tuple[int, ...]:
    """h[t] for t in F_p, over all non-pole x in F_{q^k}."""
    ext = make_field(fbar.p, fbar.a * k)
    if ext.order > budget:
        _log.warning("lfun.budget_exceeded", size=ext.order, budget=budget, k=k)
        raise BudgetExceededError(ext.order, budget)
    hist = np.zeros(fbar.p, dtype=np.int64)
    with enumeration_span(ext.order, k, p=fbar.p):
        for start in range(0, ext.order, _BLOCK):
            xs = ext.elements_block(start, start + _BLOCK)
            values, mask = evaluate_array(fbar, ext, xs)
            hist += np.bincount(ext.batch_trace(values)[mask], minlength=fbar.p)
    return tuple(int(v) for v in hist)


def trace_histogram_reference(
    fbar: ReducedFunction, k: int, budget: int = DEFAULT_BUDGET
) -> tuple[int, ...]:
    """Same histogram through scalar field arithmetic, one element at a time."""
    ext = make_field(fbar.p, fbar.a * k)
    hist = [0] * fbar.p
    for x in enumerate_field(ext, budget):
        try:
            hist[trace_to_prime(evaluate(fbar, x))] += 1
        except PoleEvaluationError:
            continue
    return tuple(hist)


def _sum_from_histogram(p: int, hist: Sequence[int], c: int = 1) -> CycloElt:
    counts = [0] * p
    for t, h in enumerate(hist):
        counts[(c * t) % p] += h
    return CycloElt.from_exponent_counts(p, counts)


def exp_sum(
    fbar: ReducedFunction, k: int, c: int = 1, budget: int = DEFAULT_BUDGET
) -> CycloElt:
    """S_k(c f) = sum over non-pole x in F_{q^k} of zeta^Tr(c f(x))."""
    return _sum_from_histogram(fbar.p, trace_histogram(fbar, k, budget), c)


def count_points(fbar: ReducedFunction, k: int, budget: int = DEFAULT_BUDGET) -> int:
    """#C(F_{q^k}) for y^p - y = f: p points over each x with Tr f(x) = 0, one per pole."""
    return fbar.p * trace_histogram(fbar, k, budget)[0] + fbar.ell


# ---------- L-function ----------
def _newton_identities(sums: Sequence[CycloElt], p: int) -> list[CycloElt]:
    """Coefficients of exp(sum_k S_k T^k / k) from S_1..S_n."""
    coeffs = [CycloElt.one(p)]
    for m in range(1, len(sums) + 1):
        acc = CycloElt.zero(p)
        for k in range(1, m + 1):
            acc = acc + sums[k - 1] * coeffs[m - k]
        coeffs.append(acc / m)
    return coeffs


def l_function(
    fbar: ReducedFunction, c: int = 1, budget: int = DEFAULT_BUDGET
) -> LPolynomial:
    """L(c f, T) of degree d; S_{d+1} is computed to confirm the top coefficient vanishes."""
    d, p = fbar.degree, fbar.p
    sums = [exp_sum(fbar, k, c, budget) for k in range(1, d + 2)]
    coeffs = _newton_identities(sums, p)
    if not coeffs[d + 1].is_zero:
        raise InvariantViolationError(
            f"coefficient of T^{d + 1} is {coeffs[d + 1]}, expected 0 (p={p})"
        )
    for m, cm in enumerate(coeffs[: d + 1]):
        if not cm.is_integral:
            raise InvariantViolationError(f"c_{m} = {cm} is not in Z[zeta_{p}]")
    _log.info("lfun.l_function", p=p, a=fbar.a, degree=d, twist=c)
    return LPolynomial(p, fbar.a, tuple(coeffs[: d + 1]))


def np_of_l(lpoly: LPolynomial) -> Polygon:
    return hull_of_heights([o.value for o in lpoly.ords()])


# ---------- zeta function of the Artin-Schreier curve ----------
def zeta_numerator(
    fbar: ReducedFunction, full_counts: bool = False, budget: int = DEFAULT_BUDGET
) -> ZetaNumerator:
    """P(T) of degree 2g = (p-1)d from point counts.

    By default only N_1..N_g are counted and P is completed by the functional equation
    c_{2g-i} = q^(g-i) c_i; `full_counts` counts N_1..N_2g and checks that equation.
    """
    p, q = fbar.p, fbar.q
    two_g = (p - 1) * fbar.degree
    g = two_g // 2
    upto = two_g if full_counts else g
    counts = [count_points(fbar, k, budget) for k in range(1, upto + 1)]

    coeffs = [Fraction(1)]
    for m in range(1, upto + 1):
        acc = Fraction(0)
        for k in range(1, m + 1):
            acc += (counts[k - 1] - 1 - q**k) * coeffs[m - k]
        coeffs.append(acc / m)
    if any(c.denominator != 1 for c in coeffs):
        raise InvariantViolationError(f"non-integral zeta numerator {coeffs}")
    ints = [int(c) for c in coeffs]
    if full_counts:
        for i in range(g):
            if ints[two_g - i] != q ** (g - i) * ints[i]:
                raise InvariantViolationError(
                    f"functional equation fails at T^{two_g - i} (p={p})"
                )
    else:
        ints += [q ** (g - i) * ints[i] for i in range(g - 1, -1, -1)]
    _log.info("lfun.zeta_numerator", p=p, a=fbar.a, degree=two_g, counted=upto)
    return ZetaNumerator(p, fbar.a, tuple(ints), tuple(counts))


def scaled_np(z: ZetaNumerator) -> Polygon:
    """NP of P(T) in ord_q units, both axes shrunk by 1/(p-1)."""
    heights = [
        None if c == 0 else Fraction(vp(c, z.p), z.a) for c in z.coeffs
    ]
    return hull_of_heights(heights).shrink(z.p - 1)


@dataclass(frozen=True)
class TwistProductReport:
    product: tuple[Fraction, ...]
    numerator: tuple[int, ...]
    conjugates_agree: bool

    @property
    def holds(self) -> bool:
        return self.conjugates_agree and self.product == tuple(
            Fraction(c) for c in self.numerator
        )


def _poly_mul(x: Sequence[CycloElt], y: Sequence[CycloElt], p: int) -> list[CycloElt]:
    out = [CycloElt.zero(p) for _ in range(len(x) + len(y) - 1)]
    for i, a in enumerate(x):
        for j, b in enumerate(y):
            out[i + j] = out[i + j] + a * b
    return out


def character_twist_product(
    fbar: ReducedFunction, budget: int = DEFAULT_BUDGET
) -> TwistProductReport:
    """prod_{c in F_p^x} L(c f, T) against the zeta numerator, as exact polynomials.

    Also checks L(c f) = sigma_c L(f) for the Galois action zeta -> zeta^c.
    """
    p = fbar.p
    base = l_function(fbar, 1, budget)
    prod: list[CycloElt] = [CycloElt.one(p)]
    agree = True
    for c in range(1, p):
        twist = l_function(fbar, c, budget)
        agree &= twist == base.conjugate(c)
        prod = _poly_mul(prod, twist.coeffs, p)
    if not all(x.is_rational for x in prod):
        raise InvariantViolationError("twist product is not rational")
    numerator = zeta_numerator(fbar, budget=budget)
    return TwistProductReport(
        tuple(x.coeffs[0] for x in prod), numerator.coeffs, agree
    )


# ---------- summaries ----------
@dataclass(frozen=True)
class NewtonSummary:
    p: int
    a: int
    np: Polygon
    hp: Polygon
    ds0: Fraction
    ds1: Fraction
    max_gap: Fraction
    lies_above: bool
    symmetric: bool

    @property
    def coincide(self) -> bool:
        return self.np == self.hp


def newton_summary(fbar: ReducedFunction, budget: int = DEFAULT_BUDGET) -> NewtonSummary:
    np_ = np_of_l(l_function(fbar, budget=budget))
    hp = hodge_polygon(fbar.ell, fbar.orders)
    return NewtonSummary(
        p=fbar.p,
        a=fbar.a,
        np=np_,
        hp=hp,
        ds0=slope_run_length(np_, 0),
        ds1=slope_run_length(np_, 1),
        max_gap=max_gap(np_, hp),
        lies_above=lies_above(np_, hp),
        symmetric=is_symmetric(np_),
    )


@dataclass(frozen=True)
class PoleIndependenceReport:
    p: int
    polygons: tuple[tuple[tuple[Fraction, ...], Polygon], ...]
    skipped: tuple[tuple[tuple[Fraction, ...], str], ...]

    @property
    def independent(self) -> bool:
        return len({poly for _, poly in self.polygons}) <= 1


def pole_independence(
    f: RationalFunction,
    p: int,
    placements: Sequence[Sequence[Fraction | int]],
    a: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> PoleIndependenceReport:
    """NP of f with its finite poles moved to each placement; bad placements are skipped."""
    polys, skipped = [], []
    for placement in placements:
        key = tuple(Fraction(q) for q in placement)
        try:
            fbar = reduce_mod_p(f.relocated(key), p, a)
        except BadPrimeError as exc:
            _log.info("lfun.placement_skipped", p=p, poles=str(key), reason=exc.condition)
            skipped.append((key, exc.condition))
            continue
        polys.append((key, np_of_l(l_function(fbar, budget=budget))))
    return PoleIndependenceReport(p, tuple(polys), tuple(skipped))
