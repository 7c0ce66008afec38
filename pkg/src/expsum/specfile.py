"""Flat key-value function spec files (grammar in docs/spec-file.md).

    # y^p - y = x^3 + x
    ell = 1
    orders = 3
    coeff 1 1 = 1
    coeff 1 3 = 1

`poles` is optional (default: inf, 0, 1, 2, ...). Coefficients not listed are zero.
"""

from __future__ import annotations

import re
from pathlib import Path

from pydantic import ValidationError

from .errors import InvalidFunctionError, SpecFileError
from .ratfun import INF, RationalFunction, validate
from .runtime.schemas import FunctionSpecModel

_COEFF_KEY = re.compile(r"^coeff\s+(\d+)\s+(\d+)$")
_SCALAR_KEYS = ("ell", "orders", "poles")


def _int_list(raw: str, lineno: int) -> list[int]:
    try:
        return [int(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError:
        raise SpecFileError(
            f"line {lineno}: expected comma-separated integers, got {raw!r}"
        ) from None


def parse_spec(text: str) -> FunctionSpecModel:
    fields: dict[str, object] = {}
    coeffs: list[dict[str, object]] = []
    seen_coeffs: set[tuple[int, int]] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecFileError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = " ".join(key.split())
        if m := _COEFF_KEY.match(key):
            j, i = int(m.group(1)), int(m.group(2))
            if (j, i) in seen_coeffs:
                raise SpecFileError(f"line {lineno}: coefficient {j} {i} given twice")
            seen_coeffs.add((j, i))
            coeffs.append({"j": j, "i": i, "value": value})
            continue
        if key not in _SCALAR_KEYS:
            raise SpecFileError(f"line {lineno}: unknown key {key!r}")
        if key in fields:
            raise SpecFileError(f"line {lineno}: key {key!r} given twice")
        if key == "ell":
            try:
                fields["ell"] = int(value)
            except ValueError:
                raise SpecFileError(f"line {lineno}: ell must be an integer") from None
        elif key == "orders":
            fields["orders"] = _int_list(value, lineno)
        else:
            fields["poles"] = [tok.strip() for tok in value.split(",") if tok.strip()]
    for required in ("ell", "orders"):
        if required not in fields:
            raise SpecFileError(f"missing key {required!r}")
    try:
        return FunctionSpecModel.model_validate({**fields, "coeffs": coeffs})
    except ValidationError as exc:
        raise InvalidFunctionError([e["msg"] for e in exc.errors(include_url=False)]) from None


def load_function(path: str | Path) -> RationalFunction:
    p = Path(path)
    if not p.is_file():
        raise SpecFileError(f"spec file not found: {p}")
    return validate(parse_spec(p.read_text()))


def write_spec(f: RationalFunction) -> str:
    lines = [
        f"ell = {f.ell}",
        "orders = " + ", ".join(str(d) for d in f.pole_orders),
        "poles = " + ", ".join("inf" if q is INF else str(q) for q in f.poles),
    ]
    for j, row in enumerate(f.coeffs, start=1):
        lines += [f"coeff {j} {i} = {c}" for i, c in enumerate(row, start=1) if c]
    return "\n".join(lines) + "\n"
