"""Load run settings from YAML. Budgets, precisions, seeds and output locations are
external to code; the packaged defaults live in config/expsum.yaml."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import yaml

from .runtime.schemas import SettingsModel

DEFAULT_CONFIG = Path(__file__).resolve().parents[2] / "config" / "expsum.yaml"


@dataclass(frozen=True)
class Settings:
    model: SettingsModel

    @classmethod
    def load(cls, path: str | None = None) -> Settings:
        p = path or os.environ.get("EXPSUM_CONFIG", str(DEFAULT_CONFIG))
        if not Path(p).is_file():
            # installed wheel without the repo's config dir: code defaults
            return cls(model=SettingsModel())
        with open(p) as f:
            raw = yaml.safe_load(f) or {}
        return cls(model=SettingsModel.model_validate(raw))

    @classmethod
    def defaults(cls) -> Settings:
        return cls(model=SettingsModel())

    @property
    def enumeration_budget(self) -> int:
        return self.model.enumeration.budget

    @property
    def precision(self) -> int:
        return self.model.padic.precision

    @property
    def precision_margin(self) -> int:
        return self.model.padic.margin

    @property
    def max_precision(self) -> int:
        return self.model.padic.max_precision

    @property
    def dwork_size(self) -> int:
        return self.model.dwork.default_size

    @property
    def dwork_max_size(self) -> int:
        return self.model.dwork.max_size

    @property
    def sample_height(self) -> int:
        return self.model.sampling.height

    @property
    def seed(self) -> int:
        return self.model.sampling.seed

    @property
    def samples(self) -> int:
        return self.model.sampling.samples

    @property
    def workers(self) -> int:
        return self.model.sweep.workers

    @property
    def processes(self) -> bool:
        return self.model.sweep.processes

    @property
    def reports_dir(self) -> str:
        return self.model.reports.directory

    @property
    def log_level(self) -> str:
        return self.model.logging.level
