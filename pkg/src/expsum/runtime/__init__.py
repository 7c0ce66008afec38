"""Shared runtime: the cross-cutting concerns every engine uses.

Observability: structlog structured logging + OpenTelemetry spans (enumeration / matrix /
sweep / suite).
Reliability: tenacity-driven precision escalation for the p-adic engine.
Concurrency: asyncio fan-out of independent sweep jobs with positional results.
Typing: Pydantic v2 boundary models (see runtime.schemas).
"""

from .obs import (
    bind_logger,
    configure_logging,
    enumeration_span,
    matrix_span,
    suite_span,
    sweep_span,
)
from .parallel import run_parallel
from .reliability import escalate_precision

__all__ = [
    "bind_logger",
    "configure_logging",
    "enumeration_span",
    "matrix_span",
    "suite_span",
    "sweep_span",
    "run_parallel",
    "escalate_precision",
]
