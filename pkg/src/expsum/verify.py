"""Named verification suites behind `expsum verify`.

Each suite returns a list of Check records; a suite passes when every check does. All
randomness is seeded, so a suite either always passes or always fails.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy

from .arith import CycloElt, OrdValue, norm_to_Q, pi_valuation
from .dworkmat import (
    block_identity_check,
    build_frobenius,
    fredholm,
    galois_conjugates,
    np_from_fredholm,
    npma_check,
    random_block_case,
    random_valuation_matrix,
    trace_formula_check,
)
from .dworksym import minimal_weight_audit
from .experiments import run_convergence
from .ff import embed, make_field, trace_to_prime
from .lfun import (
    character_twist_product,
    l_function,
    newton_summary,
    np_of_l,
    scaled_np,
    trace_histogram,
    trace_histogram_reference,
    zeta_numerator,
)
from .polygon import (
    hodge_polygon,
    hull_of_heights,
    is_symmetric,
    lies_above,
    lower_hull,
)
from .ratfun import make_function, reduce_mod_p
from .report import (
    SWEEP_HEADER,
    dumps,
    hodge_payload,
    lfun_payload,
    validate_payload,
    zeta_payload,
)
from .runtime.obs import bind_logger, suite_span
from .runtime.schemas import ExperimentSpecModel

_log = bind_logger(component="verify")

SEED = 20240229
BLOCK_CASES = 200
NPMA_CASES = 100
NPMA_MIN_PROP_I = 10
SYMBOLIC_CASES: tuple[tuple[int, tuple[int, ...], int, int], ...] = (
    (1, (2,), 5, 1),
    (1, (3,), 5, 1),
    (1, (3,), 7, 1),
    (1, (3,), 5, 2),
    (1, (3,), 7, 2),
    (2, (2, 2), 5, 3),
)


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    detail: str = ""

    def __str__(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        tail = f": {self.detail}" if self.detail else ""
        return f"[{tag}] {self.suite}/{self.name}{tail}"


def _rng(tag: int) -> np.random.Generator:
    return np.random.default_rng([SEED, tag])


def _random_cyclo(rng: np.random.Generator, p: int) -> CycloElt:
    x = CycloElt.from_ints(p, (int(c) for c in rng.integers(-3, 4, size=p - 1)))
    pi = CycloElt.zeta(p) - 1
    return x * pi ** int(rng.integers(0, 3))


# ---------- suites ----------
def suite_arith() -> list[Check]:
    rng = _rng(1)
    out = []
    for p in (3, 5, 7):
        additive = multiplicative = True
        for _ in range(20):
            x, y = _random_cyclo(rng, p), _random_cyclo(rng, p)
            additive &= pi_valuation(x * y) == pi_valuation(x) + pi_valuation(y)
            multiplicative &= norm_to_Q(x * y) == norm_to_Q(x) * norm_to_Q(y)
        out.append(Check("arith", f"valuation-additive-p{p}", additive))
        out.append(Check("arith", f"norm-multiplicative-p{p}", multiplicative))
        pi_ord = pi_valuation(CycloElt.zeta(p) - 1)
        out.append(
            Check(
                "arith",
                f"ord-pi-p{p}",
                pi_ord == OrdValue.of(Fraction(1, p - 1)),
                str(pi_ord),
            )
        )
    return out


def suite_polygon() -> list[Check]:
    rng = _rng(2)
    idempotent = above = True
    for _ in range(30):
        n = int(rng.integers(2, 8))
        nums = rng.integers(0, 9, n)
        heights = [Fraction(int(v), int(rng.integers(1, 4))) for v in nums]
        hull = hull_of_heights(heights)
        idempotent &= lower_hull(list(hull.vertices)) == hull
    for ell, orders in ((1, (3,)), (2, (2, 1)), (3, (1, 2, 3))):
        hp = hodge_polygon(ell, orders)
        width = int(hp.width)
        bumps = [0] + [int(v) for v in rng.integers(0, 3, width - 1)] + [0]
        bumped = hull_of_heights([hp.height_at(x) + b for x, b in enumerate(bumps)])
        above &= lies_above(bumped, hp) and lies_above(hp, hp)
    symmetric = all(
        is_symmetric(hodge_polygon(ell, orders))
        for ell, orders in ((2, (2, 2)), (2, (1, 1)), (3, (1, 2, 3)))
    )
    hp = hodge_polygon(2, (2, 1))
    return [
        Check("polygon", "hull-idempotent", idempotent),
        Check("polygon", "partial-order", above),
        Check("polygon", "hodge-symmetric", symmetric),
        Check("polygon", "hodge-endpoint", hp.end == (3, Fraction(3, 2)), str(hp)),
    ]


def suite_ff() -> list[Check]:
    rng = _rng(3)
    out = []
    for p, m in ((5, 2), (3, 3), (2, 4)):
        field = make_field(p, m)
        linear = True
        for _ in range(25):
            x = field.from_index(int(rng.integers(0, field.order)))
            y = field.from_index(int(rng.integers(0, field.order)))
            c = int(rng.integers(0, p))
            tx, ty = trace_to_prime(x), trace_to_prime(y)
            linear &= trace_to_prime(x + y) == (tx + ty) % p
            linear &= trace_to_prime(x * c) == c * tx % p
        out.append(Check("ff", f"trace-linear-{p}^{m}", linear))

    f4, f16, f256 = make_field(2, 2), make_field(2, 4), make_field(2, 8)
    tower = all(
        embed(embed(x, f16), f256) == embed(x, f256)
        for x in (f4.from_index(i) for i in range(f4.order))
    )
    out.append(Check("ff", "embedding-tower", tower))
    f9, f81 = make_field(3, 2), make_field(3, 4)
    hom = all(
        embed(f9.from_index(i) * f9.from_index(j), f81)
        == embed(f9.from_index(i), f81) * embed(f9.from_index(j), f81)
        for i in range(f9.order)
        for j in range(f9.order)
    )
    out.append(Check("ff", "embedding-multiplicative", hom))
    return out


def suite_lfun() -> list[Check]:
    square = reduce_mod_p(make_function([2], {(1, 2): 1}), 3)
    lpoly = l_function(square)
    cubic = reduce_mod_p(make_function([3], {(1, 1): 1, (1, 3): 1}), 5)
    z = zeta_numerator(square)
    twist = character_twist_product(cubic)
    two_pole = reduce_mod_p(make_function([2, 2], {(1, 2): 1, (2, 1): 1, (2, 2): 3}), 5)
    return [
        Check(
            "lfun",
            "x^2-p3",
            lpoly.int_vectors() == [[1, 0], [1, 2]]
            and np_of_l(lpoly) == hodge_polygon(1, [2]),
            str(lpoly.int_vectors()),
        ),
        Check(
            "lfun",
            "zeta-x^2-p3",
            z.coeffs == (1, 0, 3) and scaled_np(z) == hodge_polygon(1, [2]),
            str(z.coeffs),
        ),
        Check(
            "lfun",
            "functional-equation",
            zeta_numerator(square, full_counts=True).coeffs == z.coeffs,
        ),
        Check("lfun", "twist-product-x^3+x-p5", twist.holds),
        Check(
            "lfun",
            "batch-matches-scalar",
            all(
                trace_histogram(f, k) == trace_histogram_reference(f, k)
                for f in (cubic, two_pole)
                for k in (1, 2)
            ),
        ),
    ]


def suite_block_lemma() -> list[Check]:
    rng = _rng(4)
    passed = sum(
        block_identity_check(random_block_case(rng)) for _ in range(BLOCK_CASES)
    )
    return [
        Check(
            "block-lemma",
            "randomized",
            passed == BLOCK_CASES,
            f"{passed}/{BLOCK_CASES} pass",
        )
    ]


def suite_npma() -> list[Check]:
    rng = _rng(5)
    consistent = prop_i = 0
    for case in range(NPMA_CASES):
        p = (3, 5)[case % 2]
        n = int(rng.integers(2, 5))
        M = random_valuation_matrix(rng, n, p, structured=case % 4 < 3)
        a = int(rng.integers(1, 4))
        conj = galois_conjugates(M, int(sympy.primitive_root(p)), a)
        report = npma_check(M, conj, int(rng.integers(1, n + 1)))
        consistent += report.consistent
        prop_i += report.prop_i
    return [
        Check(
            "npma",
            "implications",
            consistent == NPMA_CASES,
            f"{consistent}/{NPMA_CASES} consistent",
        ),
        Check(
            "npma",
            "coverage",
            prop_i >= NPMA_MIN_PROP_I,
            f"{prop_i} cases with a vertex",
        ),
    ]


def suite_dwork_cross(size: int = 12, precision: int = 8) -> list[Check]:
    fbar = reduce_mod_p(make_function([3], {(1, 1): 1, (1, 3): 1}), 5)
    report = trace_formula_check(fbar, size, precision)
    M = build_frobenius(fbar, size, precision)
    series = fredholm(M, min(size, fbar.degree + 2))
    cpoly = np_from_fredholm(series, upto=fbar.degree)
    direct = np_of_l(l_function(fbar))
    weak = [r.degree for r in report.rows if r.weak]
    return [
        Check(
            "dwork-cross",
            "trace-formula",
            report.holds,
            f"weak rows {weak}" if weak else "",
        ),
        Check(
            "dwork-cross",
            "newton-polygon",
            bool(cpoly.certified_vertices) and cpoly.matches(direct),
            f"fredholm {cpoly.polygon} direct {direct}",
        ),
    ]


def suite_symbolic() -> list[Check]:
    out = []
    for ell, orders, p, k in SYMBOLIC_CASES:
        r = minimal_weight_audit(ell, orders, p, k)
        out.append(
            Check(
                "symbolic",
                f"{ell}-{','.join(map(str, orders))}-p{p}-k{k}",
                r.passes,
                f"bound {r.lex_bound} vertex {r.vertex_upper}",
            )
        )
    return out


def suite_reproducibility() -> list[Check]:
    spec = ExperimentSpecModel(ell=1, orders=[3], primes=[5, 7], samples=2, seed=7)
    first, second = run_convergence(spec), run_convergence(spec)
    return [
        Check("reproducibility", "convergence-csv", first.to_csv() == second.to_csv()),
        Check(
            "reproducibility",
            "convergence-markdown",
            first.to_markdown() == second.to_markdown(),
        ),
    ]


def suite_cli_golden() -> list[Check]:
    hodge = hodge_payload(1, [3], hodge_polygon(1, [3]))
    square = reduce_mod_p(make_function([2], {(1, 2): 1}), 3)
    lpoly = l_function(square)
    z = zeta_numerator(square)
    payloads = {
        "hodge": hodge,
        "lfun": lfun_payload(lpoly, np_of_l(lpoly)),
        "zeta": zeta_payload(z, scaled_np(z), newton_summary(square)),
    }
    out = []
    for name, payload in payloads.items():
        try:
            validate_payload(payload, name)
            out.append(Check("cli-golden", f"{name}-schema", True))
        except Exception as exc:
            out.append(Check("cli-golden", f"{name}-schema", False, str(exc)))
    out.append(
        Check(
            "cli-golden",
            "hodge-vertices",
            hodge["polygon"]["vertices"] == [[0, 1, 0, 1], [1, 1, 1, 3], [2, 1, 1, 1]],
            dumps(hodge).strip(),
        )
    )
    out.append(
        Check(
            "cli-golden",
            "sweep-header",
            ",".join(SWEEP_HEADER)
            == "p,a,coincide,max_gap_num,max_gap_den,ds0_len,np_vertices,seconds",
        )
    )
    return out


SUITES: dict[str, Callable[[], list[Check]]] = {
    "arith": suite_arith,
    "polygon": suite_polygon,
    "ff": suite_ff,
    "lfun": suite_lfun,
    "block-lemma": suite_block_lemma,
    "npma": suite_npma,
    "dwork-cross": suite_dwork_cross,
    "symbolic": suite_symbolic,
    "reproducibility": suite_reproducibility,
    "cli-golden": suite_cli_golden,
}
SELFTEST = ("arith", "polygon", "lfun", "cli-golden")


def run_suites(names: list[str]) -> list[Check]:
    """Run suites in order; a suite that raises is recorded as one failed check."""
    checks: list[Check] = []
    for name in names:
        with suite_span(name):
            try:
                got = SUITES[name]()
            except Exception as exc:
                _log.error("verify.suite_error", suite=name, error=repr(exc))
                got = [Check(name, "run", False, repr(exc))]
        _log.info(
            "verify.suite",
            suite=name,
            checks=len(got),
            failed=sum(not c.passed for c in got),
        )
        checks.extend(got)
    return checks
