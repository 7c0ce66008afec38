"""Precision-capped arithmetic in Z_p[zeta_p] and the numeric constants of the Dwork
engine: gamma, the Artin-Hasse coefficients lambda_m, and Teichmuller lifts.

An element is a coefficient vector over the power basis of zeta_p, every coefficient
reduced mod p^N. Precision is absolute and in ord_p units: `N` means "known modulo
p^N Z_p[zeta_p]". Valuations are read off the pi-adic digits (pi = zeta - 1):
zeta^j = sum_i C(j, i) pi^i, and the terms b_i pi^i have pairwise distinct fractional
valuations, so ord(x) = min_i v_p(b_i) + i/(p-1).
"""

from __future__ import annotations

import functools
import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from .arith import CycloElt, vp
from .errors import InsufficientPrecisionError, InvariantViolationError
from .runtime.obs import bind_logger
from .runtime.reliability import escalate_precision

_log = bind_logger(component="padic")

DEFAULT_MARGIN = 4
DEFAULT_MAX_PRECISION = 64


@dataclass(frozen=True)
class PrecisionCert:
    """N: absolute precision; v: valuation lower bound (exact when `exact`), v <= N."""

    N: int
    v: Fraction
    exact: bool

    def __post_init__(self) -> None:
        if self.v > self.N:
            raise ValueError(f"valuation bound {self.v} exceeds precision {self.N}")


def _fold(p: int, vec: Sequence[int], mod: int) -> tuple[int, ...]:
    folded = [0] * p
    for e, c in enumerate(vec):
        folded[e % p] += c
    top = folded[p - 1]
    return tuple((c - top) % mod for c in folded[: p - 1])


@dataclass(frozen=True)
class PadicCyclo:
    p: int
    N: int
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.coeffs) != self.p - 1:
            raise ValueError(f"expected {self.p - 1} coefficients, got {len(self.coeffs)}")
        if self.N < 0:
            raise ValueError(f"negative precision {self.N}")

    # ---------- constructors ----------
    @classmethod
    def of_ints(cls, p: int, N: int, vec: Sequence[int]) -> PadicCyclo:
        """Reduce an integer vector over zeta^0, zeta^1, ... (any length)."""
        return cls(p, N, _fold(p, vec, p**N))

    @classmethod
    def from_rational(cls, p: int, N: int, r: Fraction | int) -> PadicCyclo:
        r = Fraction(r)
        if r.denominator % p == 0:
            raise ValueError(f"{r} is not p-integral")
        mod = p**N
        c = r.numerator * pow(r.denominator, -1, mod) % mod if N else 0
        return cls(p, N, (c,) + (0,) * (p - 2))

    @classmethod
    def from_cyclo(cls, x: CycloElt, N: int) -> PadicCyclo:
        if any(c.denominator % x.p == 0 for c in x.coeffs):
            raise ValueError(f"{x} is not p-integral")
        mod = x.p**N
        return cls(
            x.p,
            N,
            tuple(c.numerator * pow(c.denominator, -1, mod) % mod for c in x.coeffs),
        )

    @classmethod
    def zero(cls, p: int, N: int) -> PadicCyclo:
        return cls(p, N, (0,) * (p - 1))

    @classmethod
    def one(cls, p: int, N: int) -> PadicCyclo:
        return cls.from_rational(p, N, 1)

    @classmethod
    def zeta(cls, p: int, N: int, power: int = 1) -> PadicCyclo:
        vec = [0] * p
        vec[power % p] = 1
        return cls.of_ints(p, N, vec)

    @classmethod
    def pi(cls, p: int, N: int) -> PadicCyclo:
        return cls.zeta(p, N) - cls.one(p, N)

    # ---------- precision ----------
    @property
    def modulus(self) -> int:
        return self.p**self.N

    def with_precision(self, n: int) -> PadicCyclo:
        """Forget digits beyond p^n (n <= N)."""
        if n > self.N:
            raise InsufficientPrecisionError(f"cannot raise precision {self.N} -> {n}")
        mod = self.p**n
        return PadicCyclo(self.p, n, tuple(c % mod for c in self.coeffs))

    def lifted(self, n: int) -> PadicCyclo:
        """Treat the current representative as exact at precision n."""
        mod = self.p**n
        return PadicCyclo(self.p, n, tuple(c % mod for c in self.coeffs))

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def agrees(self, other: PadicCyclo, n: int) -> bool:
        """Congruent mod p^n (n must not exceed either precision)."""
        if n > min(self.N, other.N):
            raise InsufficientPrecisionError(f"compare at {n} > {min(self.N, other.N)}")
        mod = self.p**n
        return all((a - b) % mod == 0 for a, b in zip(self.coeffs, other.coeffs, strict=True))

    def pi_digits(self) -> list[int]:
        """b_i with x = sum b_i pi^i (mod p^N)."""
        p, mod = self.p, self.modulus
        return [
            sum(c * math.comb(j, i) for j, c in enumerate(self.coeffs)) % mod
            for i in range(p - 1)
        ]

    def cert(self) -> PrecisionCert:
        best: Fraction | None = None
        for i, b in enumerate(self.pi_digits()):
            if b:
                v = vp(b, self.p) + Fraction(i, self.p - 1)
                best = v if best is None or v < best else best
        if best is None:
            return PrecisionCert(self.N, Fraction(self.N), exact=False)
        return PrecisionCert(self.N, best, exact=True)

    # ---------- arithmetic ----------
    def _check(self, other: PadicCyclo) -> None:
        if other.p != self.p:
            raise ValueError(f"p={self.p} vs p={other.p}")

    def __add__(self, other: PadicCyclo) -> PadicCyclo:
        self._check(other)
        n = min(self.N, other.N)
        mod = self.p**n
        pairs = zip(self.coeffs, other.coeffs, strict=True)
        return PadicCyclo(self.p, n, tuple((a + b) % mod for a, b in pairs))

    def __neg__(self) -> PadicCyclo:
        mod = self.modulus
        return PadicCyclo(self.p, self.N, tuple((-a) % mod for a in self.coeffs))

    def __sub__(self, other: PadicCyclo) -> PadicCyclo:
        return self + (-other)

    def __mul__(self, other: PadicCyclo | Fraction | int) -> PadicCyclo:
        if not isinstance(other, PadicCyclo):
            return self * PadicCyclo.from_rational(self.p, self.N, other)
        self._check(other)
        n = min(self.N, other.N)
        prod = [0] * (2 * self.p - 3)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    prod[i + j] += a * b
        return PadicCyclo(self.p, n, _fold(self.p, prod, self.p**n))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> PadicCyclo:
        result, base = PadicCyclo.one(self.p, self.N), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def divide_by_p(self, k: int) -> PadicCyclo:
        if k > self.N:
            raise InsufficientPrecisionError(f"divide by p^{k} at precision {self.N}")
        step = self.p**k
        if any(c % step for c in self.coeffs):
            raise InvariantViolationError(f"{self} is not divisible by p^{k}")
        return PadicCyclo(self.p, self.N - k, tuple(c // step for c in self.coeffs))

    def inverse(self) -> PadicCyclo:
        """Inverse of a unit by Newton iteration y <- y (2 - x y)."""
        residue = sum(self.coeffs) % self.p  # zeta = 1 mod pi
        if residue == 0:
            raise ZeroDivisionError(f"{self} is not a unit")
        one = PadicCyclo.one(self.p, self.N)
        y = PadicCyclo.from_rational(self.p, self.N, pow(residue, -1, self.p))
        for _ in range(2 * self.N.bit_length() + 2 * self.p.bit_length() + 4):
            if (self * y) == one:
                return y
            y = y * (one + one - self * y)
        raise InvariantViolationError(f"unit inverse failed to converge for {self}")

    def __truediv__(self, other: PadicCyclo) -> PadicCyclo:
        return self * other.inverse()

    def __str__(self) -> str:
        return f"({','.join(map(str, self.coeffs))}) mod {self.p}^{self.N}"


def teichmuller(xbar: int, p: int, N: int) -> PadicCyclo:
    """The root-of-unity (or zero) lift of xbar in F_p, to precision N."""
    return PadicCyclo.from_rational(p, N, teichmuller_int(xbar % p, p, N))


@functools.lru_cache(maxsize=4096)
def teichmuller_int(xbar: int, p: int, N: int) -> int:
    mod = p**N
    t = xbar % p
    for _ in range(N + 1):
        nxt = pow(t, p, mod)
        if nxt == t:
            return t
        t = nxt
    raise InvariantViolationError(f"Teichmuller iteration for {xbar} mod {p} did not settle")


# ---------- gamma ----------
def log_series_terms(p: int, N: int) -> int:
    """Largest index I kept in sum_{i<=I} x^(p^i)/p^i: every later term has ord > N."""
    i = 1
    while Fraction(p**i, p - 1) - i <= N:
        i += 1
    return i - 1


def _log_artin_hasse(x: PadicCyclo, terms: int) -> tuple[PadicCyclo, PadicCyclo]:
    """(g(x), g'(x)) for g(x) = sum_{i<=terms} x^(p^i)/p^i."""
    p, W = x.p, x.N
    g, deriv = x, PadicCyclo.one(p, W)
    for i in range(1, terms + 1):
        g = g + (x ** (p**i)).divide_by_p(i)
        deriv = deriv + x ** (p**i - 1)
    return g, deriv


def _solve_gamma_at(p: int, N: int, branch: int, work: int) -> PadicCyclo:
    terms = log_series_terms(p, N)
    if work - terms < N:
        raise InsufficientPrecisionError(
            f"working precision {work} leaves {work - terms} digits, need {N}"
        )
    x = PadicCyclo.pi(p, work) * branch
    rounds = (work * (p - 1)).bit_length() + 3
    for _ in range(rounds):
        g, deriv = _log_artin_hasse(x, terms)
        x = (x.with_precision(g.N) - g / deriv.with_precision(g.N)).lifted(work)
    residual, _ = _log_artin_hasse(x, terms)
    cert = residual.cert()
    if cert.v < N:
        raise InsufficientPrecisionError(f"gamma residual only certified to {cert.v}")
    return x.with_precision(N)


@functools.lru_cache(maxsize=64)
def solve_gamma(
    p: int,
    N: int,
    branch: int = 1,
    margin: int = DEFAULT_MARGIN,
    max_precision: int = DEFAULT_MAX_PRECISION,
) -> PadicCyclo:
    """gamma with ord 1/(p-1) and E(gamma) = zeta^branch, to precision N.

    Newton iteration on the truncated logarithm of the Artin-Hasse series, started at
    branch * (zeta - 1); the root found there is the one with gamma = branch*pi mod pi^2.
    """
    if N < 2:
        raise ValueError(f"precision must be >= 2, got {N}")
    if branch % p == 0:
        raise ValueError(f"branch {branch} must be prime to {p}")
    gamma = escalate_precision(
        lambda work: _solve_gamma_at(p, N, branch % p, work),
        start=N + margin,
        step=max(margin, 1),
        cap=max(max_precision, N + margin),
    )
    _log.info("padic.solve_gamma", p=p, precision=N, branch=branch % p)
    return gamma


@functools.lru_cache(maxsize=64)
def artin_hasse_coefficients(p: int, M: int) -> tuple[Fraction, ...]:
    """e_0..e_M with E(X) = sum e_m X^m; m e_m = sum_{p^i <= m} e_{m - p^i}."""
    e = [Fraction(1)]
    for m in range(1, M + 1):
        acc, pk = Fraction(0), 1
        while pk <= m:
            acc += e[m - pk]
            pk *= p
        e.append(acc / m)
    return tuple(e)


@functools.lru_cache(maxsize=64)
def lambda_coeffs(p: int, M: int, N: int, branch: int = 1) -> tuple[PadicCyclo, ...]:
    """lambda_0..lambda_M with E(gamma X) = sum lambda_m X^m, to precision N."""
    gamma = solve_gamma(p, N, branch)
    out, power = [], PadicCyclo.one(p, N)
    for m, e in enumerate(artin_hasse_coefficients(p, M)):
        lam = power * e
        cert = lam.cert()
        if cert.exact and cert.v < Fraction(m, p - 1):
            raise InvariantViolationError(f"ord lambda_{m} = {cert.v} < {m}/{p - 1}")
        out.append(lam)
        power = power * gamma
    return tuple(out)


def artin_hasse_at_gamma(p: int, N: int, branch: int = 1) -> PadicCyclo:
    """E(gamma) = sum_m lambda_m, with enough terms for the tail to vanish mod p^N."""
    lams = lambda_coeffs(p, N * (p - 1), N, branch)
    acc = PadicCyclo.zero(p, N)
    for lam in lams:
        acc = acc + lam
    return acc
