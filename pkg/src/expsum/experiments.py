"""Seeded desk-scale experiments: vertex-bound convergence tables and the non-generic
probe. Both write CSV + Markdown into a results directory.

"Generic" is operational here: coefficients are random rationals of bounded height,
redrawn while the prime is bad for them, and a sample that overshoots the generic vertex
height s_0/(p-1) is flagged non-generic and counted rather than failed.
"""

from __future__ import annotations

import functools
import json
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np
import sympy
import yaml
from pydantic import ValidationError

from .dworksym import slope_below_one_width, vertex_data
from .errors import (
    BadPrimeError,
    BudgetExceededError,
    InvariantViolationError,
    SpecFileError,
)
from .ff import DEFAULT_BUDGET
from .lfun import l_function, np_of_l
from .polygon import Polygon, hodge_polygon
from .ratfun import RationalFunction, ReducedFunction, make_function, reduce_mod_p
from .report import fraction_pair, render_markdown, rows_csv, write_text
from .runtime.obs import bind_logger, sweep_span
from .runtime.parallel import run_parallel
from .runtime.schemas import ExperimentSpecModel

_log = bind_logger(component="experiments")

MAX_REDRAWS = 32

CONVERGENCE_HEADER = (
    "p",
    "sample",
    "k",
    "np_k_num",
    "np_k_den",
    "c0_num",
    "c0_den",
    "upper_num",
    "upper_den",
    "gap_num",
    "gap_den",
    "attained",
    "generic",
)
PROBE_HEADER = ("p", "probe_np", "mode_np", "differs", "probe_is_hp")


def load_experiment(path: str | Path) -> ExperimentSpecModel:
    """YAML or JSON, by suffix."""
    p = Path(path)
    if not p.is_file():
        raise SpecFileError(f"experiment file not found: {p}")
    text = p.read_text()
    try:
        raw = json.loads(text) if p.suffix == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise SpecFileError(f"{p}: {exc}") from None
    try:
        return ExperimentSpecModel.model_validate(raw or {})
    except ValidationError as exc:
        msgs = "; ".join(e["msg"] for e in exc.errors(include_url=False))
        raise SpecFileError(f"{p}: {msgs}") from None


# ---------- sampling ----------
def _random_rational(rng: np.random.Generator, height: int, nonzero: bool) -> Fraction:
    while True:
        num = int(rng.integers(-height, height + 1))
        den = int(rng.integers(1, height + 1))
        if num or not nonzero:
            return Fraction(num, den)


def _draw(
    rng: np.random.Generator, orders: Sequence[int], height: int
) -> RationalFunction:
    coeffs = {
        (j, i): _random_rational(rng, height, nonzero=i == d)
        for j, d in enumerate(orders, start=1)
        for i in range(1, d + 1)
    }
    return make_function(orders, coeffs)


def sample_function(
    spec: ExperimentSpecModel, p: int, index: int
) -> tuple[RationalFunction, ReducedFunction]:
    """Sample `index` of the family, good at p.

    The stream is seeded by (seed, index) only, so the first draw is the same f at every
    prime; redraws happen only where that f is bad.
    """
    rng = np.random.default_rng([spec.seed, index])
    last: BadPrimeError | None = None
    for _ in range(MAX_REDRAWS):
        f = _draw(rng, spec.orders, spec.height)
        try:
            return f, reduce_mod_p(f, p, spec.a)
        except BadPrimeError as exc:
            last = exc
    assert last is not None
    raise last


def probe_function(orders: Sequence[int]) -> RationalFunction:
    """x^{d_1} + sum_{j >= 2} (x - P_j)^{-d_j} with the default pole placement."""
    return make_function(orders, {(j, d): 1 for j, d in enumerate(orders, start=1)})


def _usable_primes(
    spec: ExperimentSpecModel,
) -> tuple[list[int], list[tuple[int, str]]]:
    usable, skipped = [], []
    for p in sorted(set(spec.primes)):
        if not sympy.isprime(p):
            skipped.append((p, "not prime"))
        elif any(d % p == 0 for d in spec.orders):
            skipped.append((p, "p divides a pole order"))
        else:
            usable.append(p)
    for p, why in skipped:
        _log.info("experiments.prime_skipped", p=p, reason=why)
    return usable, skipped


def _collect(
    primes: Sequence[int], results: Sequence[Any], skipped: list[tuple[int, str]]
) -> list[Any]:
    kept = []
    for p, res in zip(primes, results, strict=True):
        if isinstance(res, (BudgetExceededError, BadPrimeError)):
            _log.warning("experiments.prime_skipped", p=p, reason=str(res))
            skipped.append((p, str(res)))
        elif isinstance(res, BaseException):
            raise res
        else:
            kept.append(res)
    skipped.sort()
    return kept


# ---------- convergence ----------
@dataclass(frozen=True)
class ConvergenceRow:
    p: int
    sample: int
    k: int
    np_k: Fraction
    c0: Fraction
    upper: Fraction

    @property
    def gap(self) -> Fraction:
        return self.np_k - self.c0

    @property
    def attained(self) -> bool:
        return self.np_k == self.upper

    @property
    def generic(self) -> bool:
        return self.np_k <= self.upper


@dataclass(frozen=True)
class ConvergenceTable:
    spec: ExperimentSpecModel
    vertices: tuple[int, ...]
    rows: tuple[ConvergenceRow, ...]
    skipped: tuple[tuple[int, str], ...]

    @property
    def nongeneric(self) -> int:
        """Number of (p, sample) pairs with some vertex above s_0/(p-1)."""
        return len({(r.p, r.sample) for r in self.rows if not r.generic})

    @property
    def attained(self) -> int:
        return sum(r.attained for r in self.rows)

    def to_csv(self) -> str:
        return rows_csv(
            CONVERGENCE_HEADER,
            (
                [r.p, r.sample, r.k]
                + fraction_pair(r.np_k)
                + fraction_pair(r.c0)
                + fraction_pair(r.upper)
                + fraction_pair(r.gap)
                + [int(r.attained), int(r.generic)]
                for r in self.rows
            ),
        )

    def to_markdown(self) -> str:
        return render_markdown(
            "convergence.md.j2",
            ell=self.spec.ell,
            orders=self.spec.orders,
            seed=self.spec.seed,
            samples=self.spec.samples,
            height=self.spec.height,
            vertices=self.vertices,
            rows=self.rows,
            nongeneric=self.nongeneric,
            attained=self.attained,
            skipped=self.skipped,
        )


def tracked_vertices(spec: ExperimentSpecModel) -> tuple[int, ...]:
    """Integer HP vertices in [1, d - ell + 1], or the requested subset of them."""
    hp = hodge_polygon(spec.ell, spec.orders)
    top = slope_below_one_width(spec.ell, spec.orders)
    available = [int(x) for x, _ in hp.vertices if 1 <= x <= top and x == int(x)]
    if not spec.vertices:
        return tuple(available)
    missing = sorted(set(spec.vertices) - set(available))
    if missing:
        raise ValueError(f"not slope < 1 HP vertices: {missing}; available {available}")
    return tuple(sorted(set(spec.vertices)))


def _convergence_at(
    spec: ExperimentSpecModel, p: int, vertices: Sequence[int], budget: int
) -> list[ConvergenceRow]:
    data = {k: vertex_data(spec.ell, spec.orders, k, p) for k in vertices}
    rows = []
    for index in range(spec.samples):
        _, fbar = sample_function(spec, p, index)
        np_ = np_of_l(l_function(fbar, budget=budget))
        for k in vertices:
            vd = data[k]
            np_k = np_.height_at(k)
            if np_k < vd.c0:
                raise InvariantViolationError(
                    f"NP_{k} = {np_k} below HP height {vd.c0} (p={p}, sample {index})"
                )
            row = ConvergenceRow(p, index, k, np_k, vd.c0, vd.upper)
            if not row.generic:
                _log.warning(
                    "experiments.nongeneric_sample",
                    p=p,
                    sample=index,
                    k=k,
                    np_k=str(np_k),
                    upper=str(vd.upper),
                )
            rows.append(row)
    return rows


def run_convergence(
    spec: ExperimentSpecModel,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
    processes: bool = False,
) -> ConvergenceTable:
    if spec.a != 1:
        raise ValueError(f"vertex bounds are stated over F_p; got a = {spec.a}")
    vertices = tracked_vertices(spec)
    primes, skipped = _usable_primes(spec)
    with sweep_span(primes=",".join(map(str, primes)), experiment="convergence"):
        results = run_parallel(
            [
                functools.partial(_convergence_at, spec, p, vertices, budget)
                for p in primes
            ],
            workers,
            processes=processes,
        )
    per_prime: list[list[ConvergenceRow]] = _collect(primes, results, skipped)
    rows = tuple(r for batch in per_prime for r in batch)
    table = ConvergenceTable(spec, vertices, rows, tuple(skipped))
    _log.info(
        "experiments.convergence",
        rows=len(rows),
        nongeneric=table.nongeneric,
        attained=table.attained,
    )
    return table


# ---------- non-generic probe ----------
@dataclass(frozen=True)
class ProbeRow:
    p: int
    probe_np: Polygon
    mode_np: Polygon
    hp: Polygon

    @property
    def differs(self) -> bool:
        return self.probe_np != self.mode_np

    @property
    def probe_is_hp(self) -> bool:
        return self.probe_np == self.hp


@dataclass(frozen=True)
class ProbeReport:
    spec: ExperimentSpecModel
    comparable: bool
    rows: tuple[ProbeRow, ...]
    skipped: tuple[tuple[int, str], ...]

    def to_csv(self) -> str:
        return rows_csv(
            PROBE_HEADER,
            (
                [
                    r.p,
                    str(r.probe_np),
                    str(r.mode_np),
                    int(r.differs),
                    int(r.probe_is_hp),
                ]
                for r in self.rows
            ),
        )

    def to_markdown(self) -> str:
        return render_markdown(
            "probe.md.j2",
            ell=self.spec.ell,
            orders=self.spec.orders,
            comparable=self.comparable,
            rows=self.rows,
        )


def _probe_at(spec: ExperimentSpecModel, p: int, budget: int) -> ProbeRow:
    probe = reduce_mod_p(probe_function(spec.orders), p, spec.a)
    probe_np = np_of_l(l_function(probe, budget=budget))
    seen: Counter[Polygon] = Counter()
    for index in range(spec.samples):
        _, fbar = sample_function(spec, p, index)
        seen[np_of_l(l_function(fbar, budget=budget))] += 1
    mode = seen.most_common(1)[0][0]
    return ProbeRow(p, probe_np, mode, hodge_polygon(spec.ell, spec.orders))


def run_nongeneric_probe(
    spec: ExperimentSpecModel,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
    processes: bool = False,
) -> ProbeReport:
    """NP of the explicit point against the NP mode of random samples, per prime.

    Informational: membership in the generic locus is not decided here.
    """
    if sum(d - 1 for d in spec.orders) == 0:
        _log.info("experiments.probe_skipped", reason="d - ell = 0")
        return ProbeReport(spec, False, (), ())
    primes, skipped = _usable_primes(spec)
    with sweep_span(primes=",".join(map(str, primes)), experiment="probe"):
        results = run_parallel(
            [functools.partial(_probe_at, spec, p, budget) for p in primes],
            workers,
            processes=processes,
        )
    rows: tuple[ProbeRow, ...] = tuple(_collect(primes, results, skipped))
    report = ProbeReport(spec, True, rows, tuple(skipped))
    _log.info(
        "experiments.probe",
        primes=len(rows),
        differs=sum(r.differs for r in report.rows),
    )
    return report


def write_reports(
    result: ConvergenceTable | ProbeReport, directory: str | Path
) -> list[Path]:
    stem = "convergence" if isinstance(result, ConvergenceTable) else "probe"
    return [
        write_text(directory, f"{stem}.csv", result.to_csv()),
        write_text(directory, f"{stem}.md", result.to_markdown()),
    ]
