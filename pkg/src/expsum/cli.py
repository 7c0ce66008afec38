"""expsum command line.

  expsum hodge --ell 1 --orders 3
  expsum lfun  --spec f.txt --prime 5 [--a 2]
  expsum zeta  --spec f.txt --prime 5
  expsum sweep --spec f.txt --primes 5..37 --format csv --out sweep.csv
  expsum dwork --spec f.txt --prime 5 --size 12 --precision 8
  expsum verify block-lemma
  expsum selftest
  expsum experiment convergence.yaml --kind convergence --out results/

Exit codes: 0 success, 2 bad input or unwritable output, 3 bad prime, 4 budget exceeded,
5 internal error (including a payload that fails its schema).
"""

from __future__ import annotations

import argparse
import functools
import sys
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import jsonschema
import sympy

from .config import Settings
from .dworkmat import build_frobenius, fredholm, np_from_fredholm, trace_formula_check
from .errors import (
    BadPrimeError,
    BudgetExceededError,
    ExpsumError,
    InvariantViolationError,
)
from .experiments import (
    load_experiment,
    run_convergence,
    run_nongeneric_probe,
    write_reports,
)
from .ff import DEFAULT_BUDGET
from .lfun import l_function, newton_summary, np_of_l, scaled_np, zeta_numerator
from .polygon import Polygon, hodge_polygon
from .ratfun import RationalFunction, reduce_mod_p
from .report import (
    dumps,
    dwork_payload,
    hodge_payload,
    lfun_payload,
    sweep_csv,
    sweep_json,
    sweep_svg,
    validate_payload,
    zeta_payload,
)
from .runtime.obs import bind_logger, configure_logging, sweep_span
from .runtime.parallel import run_parallel
from .specfile import load_function
from .verify import SELFTEST, SUITES, run_suites

_log = bind_logger(component="cli")


@dataclass(frozen=True)
class SweepRow:
    p: int
    a: int
    gaps: tuple[Fraction, ...]  # NP - HP at each interior HP vertex
    max_gap: Fraction
    np: Polygon
    coincide: bool
    ds0: Fraction
    ds1: Fraction
    seconds: float

    def __post_init__(self) -> None:
        if any(g < 0 for g in self.gaps):
            raise InvariantViolationError(f"NP below HP at p={self.p}: {self.gaps}")
        if self.coincide and self.max_gap != 0:
            raise InvariantViolationError(f"NP = HP but max_gap = {self.max_gap}")


def sweep_row(
    f: RationalFunction, p: int, a: int = 1, budget: int = DEFAULT_BUDGET
) -> SweepRow:
    start = time.perf_counter()
    summary = newton_summary(reduce_mod_p(f, p, a), budget)
    inner = summary.hp.vertices[1:-1]
    return SweepRow(
        p=p,
        a=a,
        gaps=tuple(summary.np.height_at(x) - y for x, y in inner),
        max_gap=summary.max_gap,
        np=summary.np,
        coincide=summary.coincide,
        ds0=summary.ds0,
        ds1=summary.ds1,
        seconds=time.perf_counter() - start,
    )


def run_sweep(
    f: RationalFunction,
    primes: Sequence[int],
    a: int = 1,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
    processes: bool = False,
) -> tuple[list[SweepRow], list[tuple[int, str]]]:
    """Rows sorted by p; bad primes and over-budget fields are skipped with a reason."""
    primes = sorted(set(primes))
    with sweep_span(primes=",".join(map(str, primes))):
        results = run_parallel(
            [functools.partial(sweep_row, f, p, a, budget) for p in primes],
            workers,
            processes=processes,
        )
    rows, skipped = [], []
    for p, res in zip(primes, results, strict=True):
        if isinstance(res, (BadPrimeError, BudgetExceededError)):
            _log.info("sweep.prime_skipped", p=p, reason=str(res))
            skipped.append((p, str(res)))
        elif isinstance(res, BaseException):
            raise res
        else:
            rows.append(res)
    _log.info("sweep.done", rows=len(rows), skipped=len(skipped))
    return rows, skipped


# ---------- argument parsing ----------
def parse_primes(text: str) -> list[int]:
    """`lo..hi` (primes in the closed range) or a comma list."""
    if ".." in text:
        lo, _, hi = text.partition("..")
        try:
            return list(sympy.primerange(int(lo), int(hi) + 1))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad prime range {text!r}") from None
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad prime list {text!r}") from None


def parse_orders(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad pole orders {text!r}") from None


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    _log.info("cli.wrote", path=str(path))


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise ValueError(f"{args.command} needs {' '.join(missing)}")


# ---------- subcommands ----------
def cmd_hodge(args: argparse.Namespace, settings: Settings) -> int:
    _require(args, "ell", "orders")
    hp = hodge_polygon(args.ell, args.orders)
    payload = hodge_payload(args.ell, args.orders, hp)
    validate_payload(payload, "hodge")
    _emit(dumps(payload), args.out)
    return 0


def cmd_lfun(args: argparse.Namespace, settings: Settings) -> int:
    _require(args, "spec", "prime")
    fbar = reduce_mod_p(load_function(args.spec), args.prime, args.a)
    lpoly = l_function(fbar, budget=settings.enumeration_budget)
    payload = lfun_payload(lpoly, np_of_l(lpoly))
    validate_payload(payload, "lfun")
    _emit(dumps(payload), args.out)
    return 0


def cmd_zeta(args: argparse.Namespace, settings: Settings) -> int:
    _require(args, "spec", "prime")
    fbar = reduce_mod_p(load_function(args.spec), args.prime, args.a)
    budget = settings.enumeration_budget
    z = zeta_numerator(fbar, budget=budget)
    payload = zeta_payload(z, scaled_np(z), newton_summary(fbar, budget))
    validate_payload(payload, "zeta")
    _emit(dumps(payload), args.out)
    return 0


def cmd_sweep(args: argparse.Namespace, settings: Settings) -> int:
    _require(args, "spec", "primes")
    f = load_function(args.spec)
    rows, skipped = run_sweep(
        f,
        args.primes,
        args.a,
        settings.enumeration_budget,
        settings.workers,
        settings.processes,
    )
    for p, why in skipped:
        print(f"skipped p={p}: {why}", file=sys.stderr)
    if args.format == "svg":
        _emit(sweep_svg(rows, hodge_polygon(f.ell, f.pole_orders)), args.out)
    elif args.format == "json":
        _emit(dumps(sweep_json(rows)), args.out)
    else:
        _emit(sweep_csv(rows), args.out)
    return 0


def cmd_dwork(args: argparse.Namespace, settings: Settings) -> int:
    _require(args, "spec", "prime")
    size = args.size or settings.dwork_size
    precision = args.precision or settings.precision
    fbar = reduce_mod_p(load_function(args.spec), args.prime, args.a)
    M = build_frobenius(fbar, size, precision, max_size=settings.dwork_max_size)
    k_max = min(size, fbar.degree + 2)
    series = fredholm(M, k_max)
    poly = np_from_fredholm(series, upto=min(k_max, fbar.degree))
    trace = trace_formula_check(
        fbar, size, precision, k_max, budget=settings.enumeration_budget
    )
    payload = dwork_payload(series, poly, trace)
    validate_payload(payload, "dwork")
    _emit(dumps(payload), args.out)
    return 0


def _report(names: list[str]) -> int:
    checks = run_suites(names)
    for c in checks:
        print(c)
    failed = sum(not c.passed for c in checks)
    verdict = "PASSED" if not failed else "FAILED"
    print(f"\nverify {verdict} ({failed} of {len(checks)} failed)")
    return 0 if not failed else 5


def cmd_verify(args: argparse.Namespace, settings: Settings) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    return _report(names)


def cmd_selftest(args: argparse.Namespace, settings: Settings) -> int:
    return _report(list(SELFTEST))


def cmd_experiment(args: argparse.Namespace, settings: Settings) -> int:
    spec = load_experiment(args.file)
    out = args.out or settings.reports_dir
    budget, workers = settings.enumeration_budget, settings.workers
    result = (
        run_convergence(spec, budget, workers, settings.processes)
        if args.kind == "convergence"
        else run_nongeneric_probe(spec, budget, workers, settings.processes)
    )
    for path in write_reports(result, out):
        print(path)
    return 0


COMMANDS: dict[str, Callable[[argparse.Namespace, Settings], int]] = {
    "hodge": cmd_hodge,
    "lfun": cmd_lfun,
    "zeta": cmd_zeta,
    "sweep": cmd_sweep,
    "dwork": cmd_dwork,
    "verify": cmd_verify,
    "selftest": cmd_selftest,
    "experiment": cmd_experiment,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="expsum",
        description="Newton polygons of L-functions of one-variable exponential sums",
    )
    ap.add_argument("--config", default=None, help="path to an expsum.yaml")
    sub = ap.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ell", type=int)
    common.add_argument("--orders", type=parse_orders)
    common.add_argument("--spec", help="function spec file (see docs/spec-file.md)")
    common.add_argument("--prime", type=int)
    common.add_argument("--primes", type=parse_primes, help="lo..hi or p1,p2,...")
    common.add_argument("--a", type=int, default=1, help="residue degree: q = p^a")
    common.add_argument("--precision", type=int)
    common.add_argument("--size", type=int)
    common.add_argument("--out", default=None)
    common.add_argument("--format", choices=["json", "csv", "svg"], default=None)

    for name in ("hodge", "lfun", "zeta", "sweep", "dwork", "selftest"):
        sub.add_parser(name, parents=[common])
    verify = sub.add_parser("verify", parents=[common])
    verify.add_argument("suite", choices=[*SUITES, "all"])
    experiment = sub.add_parser("experiment", parents=[common])
    experiment.add_argument("file", help="experiment spec (YAML or JSON)")
    experiment.add_argument(
        "--kind", choices=["convergence", "probe"], default="convergence"
    )
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = Settings.load(args.config)
        configure_logging(settings.log_level)
        return COMMANDS[args.command](args, settings)
    except ExpsumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        # domain-local validation errors (pole orders, widths, fields, ...)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except jsonschema.ValidationError as exc:
        # an emitted payload drifted from its schema
        print(f"error: output failed schema check: {exc.message}", file=sys.stderr)
        return InvariantViolationError.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
