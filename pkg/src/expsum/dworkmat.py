"""Numeric Frobenius matrices: truncated Dwork operators over Z_p[zeta_p], their Fredholm
determinants with per-coefficient precision certificates, the trace-formula check against
the directly computed L-function, the block-matrix determinant identity, and the
matrix-level Newton-polygon bounds over cyclotomic entries.

The ell = 1 matrix acts on X^1, X^2, ... by U_p o F(X), F(X) = prod_k E(gamma A_k X^k):

    M[n][i] = F_{np - i}                 (coefficient of X^(np-i) in F)

and det(1 - T M) = L(f, T) (1 - pT) det(1 - pT M). Entry valuations obey
ord F_{np-i} >= ceil((np - i)/d) / (p-1), which makes row n divisible by p^(n/d) after the
gamma^(i/d - n/d) rescaling; the truncation certificates below rest on that decay.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Protocol, TypeVar

import numpy as np
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .arith import CycloElt, OrdValue, pi_valuation
from .dworksym import GradedPoly
from .errors import BudgetExceededError, InvariantViolationError
from .ff import DEFAULT_BUDGET
from .lfun import l_function
from .padic import PadicCyclo, lambda_coeffs, solve_gamma, teichmuller
from .polygon import Polygon, lower_hull
from .ratfun import ReducedFunction
from .runtime.obs import bind_logger, matrix_span

_log = bind_logger(component="dworkmat")

DEFAULT_SIZE = 12
DEFAULT_PRECISION = 8
MAX_NPMA_SIZE = 6
_TAIL_ROUNDS = 16


class _Ring(Protocol):
    def __add__(self, other: _R, /) -> _R: ...
    def __sub__(self, other: _R, /) -> _R: ...
    def __mul__(self, other: _R, /) -> _R: ...


_R = TypeVar("_R", bound=_Ring)
Matrix = list[list[_R]]


class DimensionMismatchError(ValueError):
    pass


# ---------- characteristic polynomials ----------
def _dot(xs: Sequence[_R], ys: Sequence[_R], zero: _R) -> _R:
    acc = zero
    for x, y in zip(xs, ys, strict=True):
        acc = acc + x * y
    return acc


def berkowitz(matrix: Sequence[Sequence[_R]], one: _R) -> list[_R]:
    """[1, c_1, ..., c_n] with det(1 - A T) = sum c_k T^k; division-free."""
    n = len(matrix)
    zero = one - one
    vec = [one]
    for k in range(n):
        row = [matrix[k][j] for j in range(k)]
        col = [matrix[i][k] for i in range(k)]
        toeplitz = [one, zero - matrix[k][k]]
        v = col
        for _ in range(k):
            toeplitz.append(zero - _dot(row, v, zero))
            v = [_dot(matrix[i][:k], v, zero) for i in range(k)]
        new = []
        for i in range(k + 2):
            acc = zero
            for j in range(min(i, k) + 1):
                acc = acc + toeplitz[i - j] * vec[j]
            new.append(acc)
        vec = new
    return vec


def _rational_coefficients(matrix: Sequence[Sequence[Fraction | int]]) -> list[Fraction]:
    n = len(matrix)
    if n == 0:
        return [Fraction(1)]
    rows = [
        [QQ(Fraction(x).numerator, Fraction(x).denominator) for x in row] for row in matrix
    ]
    return [
        Fraction(int(c.numerator), int(c.denominator))
        for c in DomainMatrix(rows, (n, n), QQ).charpoly()
    ]


def fredholm_coefficients(matrix: Sequence[Sequence[_R]], one: _R | None = None) -> list[_R]:
    """Coefficients of det(1 - A T). Rational matrices go through sympy when `one` is None."""
    if any(len(row) != len(matrix) for row in matrix):
        raise DimensionMismatchError(f"matrix is not square ({len(matrix)} rows)")
    if one is None:
        return _rational_coefficients(matrix)  # type: ignore[arg-type,return-value]
    return berkowitz(matrix, one)


def matmul(x: Sequence[Sequence[_R]], y: Sequence[Sequence[_R]], zero: _R) -> Matrix:
    if len(x[0]) != len(y):
        raise DimensionMismatchError(f"{len(x[0])} columns against {len(y)} rows")
    cols = list(zip(*y, strict=True))
    return [[_dot(row, col, zero) for col in cols] for row in x]


# ---------- the ell = 1 Frobenius matrix ----------
@dataclass(frozen=True)
class FrobMatrix:
    """M[n-1][i-1] = F_{np-i} for 1 <= n, i <= K, entries known mod p^N."""

    p: int
    d: int
    K: int
    N: int
    entries: tuple[tuple[PadicCyclo, ...], ...]

    @property
    def row_bounds(self) -> tuple[Fraction, ...]:
        """h_n = n/d: the rescaled row n is divisible by p^(h_n)."""
        return tuple(Fraction(n, self.d) for n in range(1, self.K + 1))

    def entry_bound(self, n: int, i: int) -> Fraction:
        return Fraction(-(-(n * self.p - i) // self.d), self.p - 1)

    def row_infima(self) -> tuple[Fraction, ...]:
        """inf_i of ord of the rescaled entries gamma^(i/d - n/d) F_{np-i}, per row."""
        out = []
        for n, row in enumerate(self.entries, start=1):
            vals = []
            for i, e in enumerate(row, start=1):
                c = e.cert()
                vals.append(c.v + Fraction(i - n, self.d * (self.p - 1)))
            out.append(min(vals))
        return tuple(out)

    def row_decay_holds(self) -> bool:
        return all(v >= h for v, h in zip(self.row_infima(), self.row_bounds, strict=True))

    def certify(self) -> None:
        for n, row in enumerate(self.entries, start=1):
            for i, e in enumerate(row, start=1):
                c = e.cert()
                if c.exact and c.v < self.entry_bound(n, i):
                    raise InvariantViolationError(
                        f"ord M[{n}][{i}] = {c.v} < {self.entry_bound(n, i)} (p={self.p})"
                    )


def _series_mul(
    x: Sequence[PadicCyclo], y: Mapping[int, PadicCyclo], top: int
) -> list[PadicCyclo]:
    """x * y truncated at degree `top`, y sparse."""
    out = [x[0] - x[0]] * (top + 1)
    for e, c in y.items():
        for m in range(top + 1 - e):
            out[m + e] = out[m + e] + x[m] * c
    return out


def build_frobenius(
    fbar: ReducedFunction,
    K: int = DEFAULT_SIZE,
    N: int = DEFAULT_PRECISION,
    branch: int = 1,
    max_size: int | None = None,
) -> FrobMatrix:
    problems = []
    if fbar.ell != 1:
        problems.append(f"numeric Frobenius matrices need ell = 1, got {fbar.ell}")
    if fbar.a != 1:
        problems.append(f"numeric Frobenius matrices need a = 1, got {fbar.a}")
    if K < 1:
        problems.append(f"size {K} < 1")
    if problems:
        raise ValueError("; ".join(problems))
    if max_size is not None and K > max_size:
        raise BudgetExceededError(K, max_size, what="Frobenius matrix")
    p, d = fbar.p, fbar.orders[0]
    top = K * p - 1
    with matrix_span(p, K, N, d=d):
        lams = lambda_coeffs(p, top, N, branch)
        one = PadicCyclo.one(p, N)
        series = [one] + [one - one] * top
        for k, coeff in enumerate(fbar.coeffs[0], start=1):
            if coeff.is_zero:
                continue
            lift = teichmuller(int(coeff), p, N)
            factor = {k * m: lams[m] * lift**m for m in range(top // k + 1)}
            series = _series_mul(series, factor, top)
        zero = one - one
        entries = tuple(
            tuple(series[n * p - i] if n * p >= i else zero for i in range(1, K + 1))
            for n in range(1, K + 1)
        )
    frob = FrobMatrix(p, d, K, N, entries)
    frob.certify()
    _log.info("dworkmat.build_frobenius", p=p, d=d, size=K, precision=N)
    return frob


# ---------- Fredholm determinant ----------
@dataclass(frozen=True)
class FredholmSeries:
    """C_0..C_kmax of det(1 - T M) from the truncated matrix; C_k is correct mod p^(certs[k])."""

    p: int
    d: int
    K: int
    N: int
    coeffs: tuple[PadicCyclo, ...]
    certs: tuple[Fraction, ...]

    @property
    def k_max(self) -> int:
        return len(self.coeffs) - 1

    def heights(self) -> list[tuple[Fraction, bool]]:
        """(ord, certified) per coefficient; uncertified entries carry a lower bound."""
        out = []
        for k, (c, cert) in enumerate(zip(self.coeffs, self.certs, strict=True)):
            pc = c.cert()
            if pc.exact and pc.v < cert:
                out.append((pc.v, True))
            else:
                out.append((max(cert, Fraction(k * (k + 1), 2 * self.d)), False))
        return out


def truncation_certificate(k: int, K: int, d: int, N: int) -> Fraction:
    """min(N, ord of the minors a K x K truncation drops from C_k)."""
    if k == 0:
        return Fraction(N)
    return min(Fraction(N), Fraction(k * (k - 1) // 2 + K + 1, d))


def fredholm(M: FrobMatrix, k_max: int | None = None) -> FredholmSeries:
    k_max = M.K if k_max is None else k_max
    if not 0 <= k_max <= M.K:
        raise ValueError(f"k_max = {k_max} outside 0..{M.K}")
    with matrix_span(M.p, M.K, M.N, stage="fredholm"):
        coeffs = berkowitz(M.entries, PadicCyclo.one(M.p, M.N))[: k_max + 1]
    certs = tuple(truncation_certificate(k, M.K, M.d, M.N) for k in range(k_max + 1))
    _log.info("dworkmat.fredholm", p=M.p, size=M.K, k_max=k_max)
    return FredholmSeries(M.p, M.d, M.K, M.N, tuple(coeffs), certs)


@dataclass(frozen=True)
class CertifiedPolygon:
    polygon: Polygon
    certified: tuple[bool, ...]  # per vertex of `polygon`

    @property
    def certified_vertices(self) -> list[tuple[Fraction, Fraction]]:
        return [v for v, ok in zip(self.polygon.vertices, self.certified, strict=True) if ok]

    def matches(self, other: Polygon) -> bool:
        """Every certified vertex inside `other`'s range lies on `other`."""
        return all(
            other.height_at(x) == y for x, y in self.certified_vertices if x <= other.width
        )


def _right_slope(hull: Polygon, upto: int) -> Fraction | None:
    verts = hull.vertices
    last = max(idx for idx, (x, _) in enumerate(verts) if x <= upto)
    if last == len(verts) - 1:
        return None
    (x0, y0), (x1, y1) = verts[last], verts[last + 1]
    return (y1 - y0) / (x1 - x0)


def np_from_fredholm(series: FredholmSeries, upto: int | None = None) -> CertifiedPolygon:
    """Lower convex hull of the certified heights, padded with the row-decay bound
    j(j+1)/(2d) past k_max until those points cannot reach below the hull at x <= upto.
    """
    upto = series.k_max if upto is None else upto
    if not 0 <= upto <= series.k_max:
        raise ValueError(f"upto = {upto} outside 0..{series.k_max}")
    heights = series.heights()
    known = [(Fraction(k), h) for k, (h, _) in enumerate(heights)]
    end = series.k_max
    for _ in range(_TAIL_ROUNDS):
        tail = [
            (Fraction(j), Fraction(j * (j + 1), 2 * series.d))
            for j in range(series.k_max + 1, end + 1)
        ]
        hull = lower_hull(known + tail)
        right = _right_slope(hull, upto)
        if right is None or Fraction(end + 1, series.d) >= right:
            break
        end = max(end + 1, math.ceil(right * series.d))
    else:
        raise InvariantViolationError("row-decay padding did not settle")

    verts = [v for v in hull.vertices if v[0] <= upto]
    if verts[-1][0] < upto:
        verts.append((Fraction(upto), hull.height_at(upto)))
    certified = tuple(
        x == int(x)
        and x <= series.k_max
        and heights[int(x)][1]
        and heights[int(x)][0] == y
        and (x, y) in hull.vertices
        for x, y in verts
    )
    return CertifiedPolygon(Polygon(tuple(verts)), certified)


# ---------- trace formula ----------
@dataclass(frozen=True)
class TraceFormulaRow:
    degree: int
    certificate: Fraction
    holds: bool
    weak: bool  # less than one p-adic digit certified: reported, not failed


@dataclass(frozen=True)
class TraceFormulaReport:
    p: int
    rows: tuple[TraceFormulaRow, ...]

    @property
    def holds(self) -> bool:
        return all(r.holds for r in self.rows)


def trace_formula_check(
    fbar: ReducedFunction,
    K: int = DEFAULT_SIZE,
    N: int = DEFAULT_PRECISION,
    k_max: int | None = None,
    budget: int = DEFAULT_BUDGET,
    branch: int = 1,
) -> TraceFormulaReport:
    """Compare det(1 - TM) with L(f, T) (1 - pT) det(1 - pTM) coefficient by coefficient."""
    M = build_frobenius(fbar, K, N, branch)
    k_max = min(K, fbar.orders[0] + 2) if k_max is None else k_max
    series = fredholm(M, k_max)
    p = fbar.p
    lpoly = l_function(fbar, c=branch, budget=budget)
    zero = PadicCyclo.zero(p, N)
    lhat = [PadicCyclo.from_cyclo(c, N) for c in lpoly.coeffs]

    def _l(m: int) -> PadicCyclo:
        return lhat[m] if 0 <= m < len(lhat) else zero

    with_euler = [_l(m) - _l(m - 1) * p for m in range(k_max + 1)]
    rows = []
    for m in range(k_max + 1):
        rhs = zero
        for j in range(m + 1):
            rhs = rhs + with_euler[m - j] * series.coeffs[j] * p**j
        joint = min([series.certs[m]] + [series.certs[j] + j for j in range(m + 1)])
        cert = (series.coeffs[m] - rhs).cert()
        holds = not cert.exact or cert.v >= joint
        rows.append(TraceFormulaRow(m, joint, holds, weak=joint < 1))
    report = TraceFormulaReport(p, tuple(rows))
    _log.info("dworkmat.trace_formula", p=p, size=K, precision=N, holds=report.holds)
    return report


def specialize(
    poly: GradedPoly,
    lifts: Mapping[tuple[int, int], PadicCyclo],
    N: int,
    branch: int = 1,
) -> PadicCyclo:
    """Evaluate a symbolic polynomial with opaque-free scalars at the given lifts A_{j,i}."""
    if poly.offset != 0:
        raise ValueError(f"gamma^{poly.offset} prefix is not integral in the power basis")
    p = poly.ctx.p
    terms = list(poly.terms())
    for _, s in terms:
        if s.opaque:
            raise ValueError(f"cannot specialize opaque factor {s.opaque[0].name}")
    gamma = solve_gamma(p, N, branch)
    top = max((m for _, s in terms for m in s.lambdas), default=1)
    lams = lambda_coeffs(p, top, N, branch)
    total = PadicCyclo.zero(p, N)
    for exps, s in terms:
        v = gamma**s.gamma * s.rational
        for m in s.lambdas:
            v = v * lams[m]
        for key, k in exps:
            v = v * lifts[key] ** k
        total = total + v
    return total


# ---------- block matrices ----------
def block_matrix(mats: Sequence[Sequence[Sequence[_R]]]) -> Matrix:
    """a x a block matrix with M_{a-1} in the top-right block and M_{r-1} at (r, r-1)."""
    if not mats:
        raise ValueError("need at least one matrix")
    s = len(mats[0])
    if s == 0 or any(len(m) != s or any(len(row) != s for row in m) for m in mats):
        raise DimensionMismatchError("block matrices must share one non-empty square size")
    a = len(mats)
    if a == 1:
        return [list(row) for row in mats[0]]
    zero = mats[0][0][0] - mats[0][0][0]
    out: Matrix = [[zero] * (a * s) for _ in range(a * s)]

    def _place(br: int, bc: int, m: Sequence[Sequence[_R]]) -> None:
        for i in range(s):
            for j in range(s):
                out[br * s + i][bc * s + j] = m[i][j]

    _place(0, a - 1, mats[a - 1])
    for r in range(1, a):
        _place(r, r - 1, mats[r - 1])
    return out


def block_identity_check(
    mats: Sequence[Sequence[Sequence[_R]]], one: _R | None = None
) -> bool:
    """det(1 - (M_{a-1}...M_0) T^a) == det(1 - B T) for the block matrix B."""
    a = len(mats)
    zero = mats[0][0][0] - mats[0][0][0]
    prod = [list(row) for row in mats[0]]
    for r in range(1, a):
        prod = matmul(mats[r], prod, zero)
    base = fredholm_coefficients(prod, one)
    lhs = [zero] * (a * (len(base) - 1) + 1)
    for k, c in enumerate(base):
        lhs[a * k] = c
    rhs = fredholm_coefficients(block_matrix(mats), one)
    return lhs == rhs


def random_block_case(
    rng: np.random.Generator, max_size: int = 4, max_a: int = 4
) -> list[list[list[Fraction]]]:
    size = int(rng.integers(1, max_size + 1))
    a = int(rng.integers(1, max_a + 1))
    mats = []
    for _ in range(a):
        if rng.random() < 0.1:
            mats.append([[Fraction(0)] * size for _ in range(size)])
            continue
        nums = rng.integers(-5, 6, size=(size, size))
        dens = rng.integers(1, 4, size=(size, size))
        mats.append(
            [
                [Fraction(int(nums[i, j]), int(dens[i, j])) for j in range(size)]
                for i in range(size)
            ]
        )
    return mats


# ---------- Newton polygons of matrices over Z[zeta_p] ----------
def _half(x: OrdValue) -> OrdValue:
    return x if x.value is None else OrdValue(x.value / 2)


def _ord_det(sub: Sequence[Sequence[CycloElt]], p: int) -> OrdValue:
    return pi_valuation(berkowitz(sub, CycloElt.one(p))[-1])


@dataclass(frozen=True)
class NpmaReport:
    k: int
    a: int
    t_a: OrdValue
    t_b: OrdValue
    ord_det: OrdValue
    ord_q_ck: OrdValue
    prop_i: bool
    prop_ii: bool
    prop_iii: bool
    bound: Fraction | None = None  # None: the row-bound criterion does not apply
    thm_i: bool | None = None
    thm_ii: bool | None = None
    h_bound_ok: bool | None = None

    @property
    def consistent(self) -> bool:
        ok = self.prop_i == self.prop_ii and (not self.prop_i or self.prop_iii)
        if self.bound is not None:
            ok = (
                ok
                and self.thm_i == self.thm_ii
                and (not self.thm_i or self.prop_iii)
                and bool(self.h_bound_ok)
            )
        return ok


def galois_conjugates(
    M: Sequence[Sequence[CycloElt]], c: int, a: int
) -> list[list[list[CycloElt]]]:
    """[M, M^sigma, ..., M^(sigma^(a-1))] for sigma: zeta -> zeta^c."""
    p = M[0][0].p
    return [[[x.conjugate(pow(c, s, p)) for x in row] for row in M] for s in range(a)]


def _row_bounds(
    M: Sequence[Sequence[CycloElt]], h: Sequence[Fraction] | None
) -> list[OrdValue]:
    infima = [min(pi_valuation(x) for x in row) for row in M]
    if h is None:
        out, running = [], OrdValue.infinity()
        for v in reversed(infima):
            running = min(running, v)
            out.append(running)
        return out[::-1]
    if len(h) != len(M):
        raise ValueError(f"{len(h)} row bounds for {len(M)} rows")
    hs = [OrdValue.of(x) for x in h]
    if any(y < x for x, y in itertools.pairwise(hs)):
        raise ValueError("row bounds must be non-decreasing")
    if any(inf < x for x, inf in zip(hs, infima, strict=True)):
        raise ValueError("row bounds exceed the row infima")
    return hs


def npma_check(
    M: Sequence[Sequence[CycloElt]],
    conjugates: Sequence[Sequence[Sequence[CycloElt]]],
    k: int,
    h: Sequence[Fraction] | None = None,
) -> NpmaReport:
    """Test both matrix-level criteria for NP(det(1 - A_a T)) to have a vertex at k.

    A_a = conjugates[a-1] ... conjugates[0] with conjugates[0] = M; ord_q = ord_p / a.
    """
    n = len(M)
    if n > MAX_NPMA_SIZE:
        raise BudgetExceededError(n, MAX_NPMA_SIZE, what="minor enumeration")
    if not 1 <= k <= n:
        raise ValueError(f"k = {k} outside 1..{n}")
    if not conjugates or [list(r) for r in conjugates[0]] != [list(r) for r in M]:
        raise ValueError("the first conjugate must be M itself")
    p, a = M[0][0].p, len(conjugates)

    t_a, t_b = OrdValue.infinity(), OrdValue.infinity()
    lead = tuple(range(k))
    for rows in itertools.combinations(range(n), k):
        for cols in itertools.combinations(range(n), k):
            v = _ord_det([[M[r][c] for c in cols] for r in rows], p)
            if rows == lead:
                t_a = min(t_a, v)
            else:
                t_b = min(t_b, v)
    ord_det = _ord_det([row[:k] for row in M[:k]], p)

    zero = CycloElt.zero(p)
    prod = [list(row) for row in conjugates[0]]
    for conj in conjugates[1:]:
        prod = matmul(conj, prod, zero)
    ord_q_ck = pi_valuation(berkowitz(prod, CycloElt.one(p))[k]).scaled(a)

    total = t_a + t_b
    report = NpmaReport(
        k=k,
        a=a,
        t_a=t_a,
        t_b=t_b,
        ord_det=ord_det,
        ord_q_ck=ord_q_ck,
        prop_i=ord_det + ord_det < total,
        prop_ii=ord_q_ck + ord_q_ck < total and t_a < t_b,
        prop_iii=ord_q_ck == ord_det,
    )
    hs = _row_bounds(M, h)
    if k < n and all(not x.is_infinite for x in hs[: k + 1]):
        vals = [x.value for x in hs[: k + 1]]
        assert all(v is not None for v in vals)
        bound = sum(vals[:k], Fraction(0)) + (vals[k] - vals[k - 1]) / 2  # type: ignore[operator]
        b = OrdValue.of(bound)
        report = replace(
            report,
            bound=bound,
            thm_i=ord_det < b,
            thm_ii=ord_q_ck < b,
            h_bound_ok=not (min(_half(total), t_b) < b),
        )
    _log.info("dworkmat.npma_check", p=p, size=n, k=k, a=a, consistent=report.consistent)
    return report


def random_valuation_matrix(
    rng: np.random.Generator, n: int, p: int, structured: bool = True
) -> list[list[CycloElt]]:
    """Random n x n matrix over Z[zeta_p].

    Structured matrices have strictly increasing row valuations h_i carried by unit
    multiples of p^(h_i) on the diagonal, with off-diagonal entries one power of p deeper.
    """

    def _small() -> CycloElt:
        return CycloElt.from_ints(p, (int(c) for c in rng.integers(-2, 3, size=p - 1)))

    if structured:
        h = np.cumsum(rng.integers(1, 3, size=n)) + int(rng.integers(0, 2))
        return [
            [
                CycloElt.zeta(p, int(rng.integers(0, p))) * p ** int(h[i])
                if i == j
                else _small() * p ** (int(h[i]) + 1)
                for j in range(n)
            ]
            for i in range(n)
        ]
    return [[_small() * p ** int(rng.integers(0, 3)) for _ in range(n)] for _ in range(n)]
