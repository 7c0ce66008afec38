"""Reliability: bounded retry with precision escalation for the p-adic engine."""

from __future__ import annotations

from collections.abc import Callable
from typing import TypeVar

from tenacity import (
    RetryCallState,
    retry,
    retry_if_exception_type,
    stop_after_attempt,
)

from ..errors import InsufficientPrecisionError
from .obs import bind_logger

T = TypeVar("T")

_log = bind_logger(component="reliability")


def escalate_precision(
    fn: Callable[[int], T], start: int, step: int, cap: int, attempts: int = 4
) -> T:
    """Call `fn(N)` with N = start, start+step, ... until it stops raising
    InsufficientPrecisionError. Deterministic: no waits, no jitter; N never exceeds `cap`.
    """
    state = {"n": start}

    def _bump(rs: RetryCallState) -> None:
        state["n"] = min(cap, state["n"] + step)
        _log.info(
            "reliability.precision_escalated",
            attempt=rs.attempt_number,
            precision=state["n"],
        )

    @retry(
        stop=stop_after_attempt(attempts),
        retry=retry_if_exception_type(InsufficientPrecisionError),
        before_sleep=_bump,
        reraise=True,
    )
    def _attempt() -> T:
        return fn(state["n"])

    return _attempt()

