"""Output emission: JSON payloads (checked against schemas/), CSV, Markdown, SVG.

Rationals leave as [num, den] integer pairs. SVG coordinates are the only floats.
"""

from __future__ import annotations

import csv
import io
import json
from collections.abc import Iterable, Sequence
from fractions import Fraction
from pathlib import Path
from typing import Any, Protocol

import jsonschema
from jinja2 import Environment, FileSystemLoader

from .arith import OrdValue
from .dworkmat import CertifiedPolygon, FredholmSeries, TraceFormulaReport
from .lfun import LPolynomial, NewtonSummary, ZetaNumerator
from .polygon import Polygon

TEMPLATE_DIR = Path(__file__).resolve().parent / "templates"
SCHEMA_DIR = Path(__file__).resolve().parent / "schemas"

SWEEP_HEADER = (
    "p",
    "a",
    "coincide",
    "max_gap_num",
    "max_gap_den",
    "ds0_len",
    "np_vertices",
    "seconds",
)


class SweepRecord(Protocol):
    p: int
    a: int
    coincide: bool
    max_gap: Fraction
    gaps: tuple[Fraction, ...]
    ds0: Fraction
    ds1: Fraction
    np: Polygon
    seconds: float


def fraction_pair(x: Fraction | int) -> list[int]:
    f = Fraction(x)
    return [f.numerator, f.denominator]


def ord_pair(v: OrdValue) -> list[int] | None:
    return None if v.value is None else fraction_pair(v.value)


def build_env(template_dir: Path = TEMPLATE_DIR) -> Environment:
    env = Environment(
        loader=FileSystemLoader(str(template_dir)),
        trim_blocks=True,
        lstrip_blocks=True,
        keep_trailing_newline=True,
    )
    env.filters["frac"] = lambda x: str(Fraction(x))
    return env


# ---------- JSON payloads ----------
def hodge_payload(ell: int, orders: Sequence[int], hp: Polygon) -> dict[str, Any]:
    return {"ell": ell, "orders": list(orders), "polygon": hp.to_json()}


def lfun_payload(lpoly: LPolynomial, np_: Polygon) -> dict[str, Any]:
    return {
        "p": lpoly.p,
        "a": lpoly.a,
        "degree": lpoly.degree,
        "coefficients": lpoly.int_vectors(),
        "ords": [ord_pair(o) for o in lpoly.ords()],
        "newton_polygon": np_.to_json(),
    }


def zeta_payload(
    z: ZetaNumerator, scaled: Polygon, summary: NewtonSummary
) -> dict[str, Any]:
    return {
        "p": z.p,
        "a": z.a,
        "point_counts": list(z.counts),
        "numerator": list(z.coeffs),
        "scaled_newton_polygon": scaled.to_json(),
        "hodge_polygon": summary.hp.to_json(),
        "comparison": {
            "lies_above": summary.lies_above,
            "coincide": scaled == summary.hp,
            "max_gap": fraction_pair(summary.max_gap),
            "ds0_len": fraction_pair(summary.ds0),
            "ds1_len": fraction_pair(summary.ds1),
        },
    }


def load_schema(name: str) -> dict[str, Any]:
    with open(SCHEMA_DIR / f"{name}.schema.json") as f:
        data: dict[str, Any] = json.load(f)
    return data


def validate_payload(payload: dict[str, Any], name: str) -> None:
    """Raises jsonschema.ValidationError if the payload drifts from its schema."""
    jsonschema.validate(payload, load_schema(name))


def dumps(payload: dict[str, Any]) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


# ---------- sweeps ----------
def _np_cell(np_: Polygon) -> str:
    return " ".join(f"{x}:{y}" for x, y in np_.vertices)


def sweep_csv(rows: Iterable[SweepRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for r in rows:
        w.writerow(
            [
                r.p,
                r.a,
                int(r.coincide),
                r.max_gap.numerator,
                r.max_gap.denominator,
                str(r.ds0),
                _np_cell(r.np),
                f"{r.seconds:.3f}",
            ]
        )
    return buf.getvalue()


def sweep_json(rows: Iterable[SweepRecord]) -> dict[str, Any]:
    return {
        "rows": [
            {
                "p": r.p,
                "a": r.a,
                "coincide": r.coincide,
                "max_gap": fraction_pair(r.max_gap),
                "gaps": [fraction_pair(g) for g in r.gaps],
                "ds0_len": fraction_pair(r.ds0),
                "ds1_len": fraction_pair(r.ds1),
                "newton_polygon": r.np.to_json(),
                "seconds": round(r.seconds, 3),
            }
            for r in rows
        ]
    }


def sweep_svg(
    rows: Sequence[SweepRecord], hp: Polygon, width: int = 640, height: int = 400
) -> str:
    """NP of every prime overlaid on HP, in one coordinate frame."""
    xmax = float(hp.width) or 1.0
    ymax = max([float(hp.end[1])] + [float(r.np.end[1]) for r in rows]) or 1.0
    margin = 40

    def _pts(poly: Polygon) -> str:
        return " ".join(
            f"{margin + float(x) / xmax * (width - 2 * margin):.2f},"
            f"{height - margin - float(y) / ymax * (height - 2 * margin):.2f}"
            for x, y in poly.vertices
        )

    return build_env().get_template("sweep.svg.j2").render(
        width=width,
        height=height,
        hp=_pts(hp),
        curves=[
            {"p": r.p, "points": _pts(r.np), "coincide": r.coincide} for r in rows
        ],
    )


# ---------- experiment reports ----------
def rows_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def render_markdown(template: str, **context: Any) -> str:
    return build_env().get_template(template).render(**context)


def write_text(directory: str | Path, name: str, text: str) -> Path:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text)
    return path


def dwork_payload(
    series: FredholmSeries, poly: CertifiedPolygon, trace: TraceFormulaReport
) -> dict[str, Any]:
    return {
        "p": series.p,
        "d": series.d,
        "size": series.K,
        "precision": series.N,
        "coefficients": [
            {
                "degree": k,
                "ord": fraction_pair(h),
                "certified": ok,
                "certificate": fraction_pair(cert),
            }
            for k, ((h, ok), cert) in enumerate(
                zip(series.heights(), series.certs, strict=True)
            )
        ],
        "newton_polygon": poly.polygon.to_json(),
        "certified_vertices": list(poly.certified),
        "trace_formula": {
            "holds": trace.holds,
            "rows": [
                {
                    "degree": r.degree,
                    "certificate": fraction_pair(r.certificate),
                    "holds": r.holds,
                    "weak": r.weak,
                }
                for r in trace.rows
            ],
        },
    }
