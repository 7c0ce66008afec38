"""Pydantic v2 boundary models. Validate function specs, settings files and experiment
specs at the edge so malformed input never reaches the exact-arithmetic engines."""

from __future__ import annotations

from fractions import Fraction
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", str_strip_whitespace=True)


def _as_fraction(v: Any) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool) or isinstance(v, float):
        raise ValueError(f"exact rational expected, got {v!r}")
    try:
        return Fraction(str(v).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational: {v!r}") from exc


class CoefficientModel(_Strict):
    """One partial-fraction coefficient a_{j,i}: pole index j (1-based), power i."""

    model_config = ConfigDict(
        extra="forbid", str_strip_whitespace=True, arbitrary_types_allowed=True
    )

    j: int = Field(ge=1)
    i: int = Field(ge=0)
    value: Fraction

    @field_validator("value", mode="before")
    @classmethod
    def _exact(cls, v: Any) -> Fraction:
        return _as_fraction(v)


class FunctionSpecModel(_Strict):
    """The raw content of a function spec file (`ell`, `orders`, `poles`, `coeff j i`)."""

    ell: int = Field(ge=1)
    orders: list[int] = Field(min_length=1)
    poles: list[str] = Field(default_factory=list)
    coeffs: list[CoefficientModel] = Field(default_factory=list)

    @model_validator(mode="after")
    def _shape(self) -> FunctionSpecModel:
        if len(self.orders) != self.ell:
            raise ValueError(f"orders has {len(self.orders)} entries, ell = {self.ell}")
        if any(d < 1 for d in self.orders):
            raise ValueError("pole orders must be positive")
        if self.poles and len(self.poles) != self.ell:
            raise ValueError(f"poles has {len(self.poles)} entries, ell = {self.ell}")
        return self


class ExperimentSpecModel(_Strict):
    """A convergence / non-generic-probe experiment, as loaded from YAML or JSON."""

    ell: int = Field(ge=1)
    orders: list[int] = Field(min_length=1)
    primes: list[int] = Field(min_length=1)
    samples: int = Field(default=5, ge=1)
    height: int = Field(default=20, ge=1)
    seed: int = 0
    a: int = Field(default=1, ge=1)
    vertices: list[int] = Field(default_factory=list)

    @model_validator(mode="after")
    def _shape(self) -> ExperimentSpecModel:
        if len(self.orders) != self.ell:
            raise ValueError(f"orders has {len(self.orders)} entries, ell = {self.ell}")
        return self


class EnumerationSettings(_Strict):
    budget: int = Field(default=10_000_000, ge=1)


class PadicSettings(_Strict):
    precision: int = Field(default=8, ge=2)
    margin: int = Field(default=4, ge=0)
    max_precision: int = Field(default=64, ge=2)


class DworkSettings(_Strict):
    default_size: int = Field(default=12, ge=1)
    max_size: int = Field(default=24, ge=1)


class SamplingSettings(_Strict):
    height: int = Field(default=20, ge=1)
    seed: int = 20240229
    samples: int = Field(default=5, ge=1)


class SweepSettings(_Strict):
    workers: int = Field(default=4, ge=1)
    processes: bool = True


class ReportSettings(_Strict):
    directory: str = "results"


class LoggingSettings(_Strict):
    level: str = "INFO"


class SettingsModel(_Strict):
    enumeration: EnumerationSettings = Field(default_factory=EnumerationSettings)
    padic: PadicSettings = Field(default_factory=PadicSettings)
    dwork: DworkSettings = Field(default_factory=DworkSettings)
    sampling: SamplingSettings = Field(default_factory=SamplingSettings)
    sweep: SweepSettings = Field(default_factory=SweepSettings)
    reports: ReportSettings = Field(default_factory=ReportSettings)
    logging: LoggingSettings = Field(default_factory=LoggingSettings)
