"""Observability: structured logging and tracing spans for the long-running engines."""

from __future__ import annotations

import contextlib
import logging
import sys
from collections.abc import Iterator, MutableMapping
from contextlib import AbstractContextManager
from typing import Any, cast

import structlog
from opentelemetry import trace

_CONFIGURED = False
_THRESHOLD = logging.INFO


def _level_of(name: str) -> int:
    return logging.getLevelNamesMapping().get(name.upper(), logging.INFO)


def _drop_below_threshold(
    _logger: Any, method_name: str, event_dict: MutableMapping[str, Any]
) -> MutableMapping[str, Any]:
    if _level_of(method_name) < _THRESHOLD:
        raise structlog.DropEvent
    return event_dict


def configure_logging(level: str | None = None) -> None:
    """JSON lines on stderr. Later calls only move the level threshold, so loggers bound
    at import time follow the configured level."""
    global _CONFIGURED, _THRESHOLD
    if level is not None:
        _THRESHOLD = _level_of(level)
    if _CONFIGURED:
        return
    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            _drop_below_threshold,
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.JSONRenderer(),
        ],
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=True,
    )
    _CONFIGURED = True


def bind_logger(*, component: str = "", **extra: Any) -> structlog.BoundLogger:
    """Return a logger with the component and any run context bound in."""
    configure_logging()
    return cast(
        structlog.BoundLogger,
        structlog.get_logger().bind(component=component, **extra),
    )


_tracer = trace.get_tracer("expsum")


@contextlib.contextmanager
def _span(name: str, **attrs: Any) -> Iterator[Any]:
    with _tracer.start_as_current_span(name) as span:
        for k, v in attrs.items():
            if v is not None:
                span.set_attribute(k, v)
        yield span


def enumeration_span(
    size: int, k: int | None = None, **attrs: Any
) -> AbstractContextManager[Any]:
    """Span around one full-field enumeration (S_k / N_k)."""
    return _span("field.enumerate", **{"field.size": size, "field.k": k, **attrs})


def matrix_span(
    p: int, size: int, precision: int, **attrs: Any
) -> AbstractContextManager[Any]:
    """Span around building or expanding a truncated Frobenius matrix."""
    return _span(
        "dwork.matrix",
        **{"dwork.p": p, "dwork.size": size, "dwork.precision": precision, **attrs},
    )


def sweep_span(primes: str = "", **attrs: Any) -> AbstractContextManager[Any]:
    return _span("sweep.run", **{"sweep.primes": primes, **attrs})


def suite_span(suite: str = "", **attrs: Any) -> AbstractContextManager[Any]:
    """Span around one `verify` suite."""
    return _span("verify.suite", **{"verify.suite": suite, **attrs})
