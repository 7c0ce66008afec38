"""Runtime helpers: parallel fan-out, precision escalation, logging, spans."""

import functools
import pickle

import pytest
import structlog
from opentelemetry import trace
from opentelemetry.sdk.trace import TracerProvider
from opentelemetry.sdk.trace.export import SimpleSpanProcessor
from opentelemetry.sdk.trace.export.in_memory_span_exporter import InMemorySpanExporter
from structlog.testing import capture_logs

from expsum.errors import (
    BadPrimeError,
    BudgetExceededError,
    InsufficientPrecisionError,
    InvalidFunctionError,
)
from expsum.ratfun import make_function, reduce_mod_p
from expsum.runtime import (
    bind_logger,
    configure_logging,
    escalate_precision,
    obs,
    run_parallel,
    sweep_span,
)

_EXPORTER = InMemorySpanExporter()


@pytest.fixture(scope="module")
def spans():
    provider = TracerProvider()
    provider.add_span_processor(SimpleSpanProcessor(_EXPORTER))
    trace.set_tracer_provider(provider)
    yield _EXPORTER


# ---------- run_parallel ----------
def _boom():
    raise ValueError("boom")


@pytest.mark.parametrize("workers", [1, 3])
def test_results_keep_input_order_with_exceptions_in_place(workers):
    jobs = [lambda: 1, _boom, lambda: 3]
    out = run_parallel(jobs, workers)
    assert out[0] == 1 and out[2] == 3
    assert isinstance(out[1], ValueError)


def test_no_jobs():
    assert run_parallel([], 4) == []
    assert run_parallel([], 4, processes=True) == []


def test_process_pool_keeps_order_and_domain_errors():
    cubic = make_function([3], {(1, 3): 1})
    jobs = [
        functools.partial(pow, 2, 10),
        functools.partial(reduce_mod_p, cubic, 3),
        functools.partial(int, "x"),
        functools.partial(pow, 3, 4),
    ]
    out = run_parallel(jobs, 2, processes=True)
    assert out[0] == 1024 and out[3] == 81
    assert isinstance(out[1], BadPrimeError)
    assert (out[1].p, out[1].condition) == (3, "p divides the pole order d_1 = 3")
    assert isinstance(out[2], ValueError)


def test_domain_errors_survive_pickling():
    for exc in (
        BadPrimeError(7, "poles collide mod p"),
        BudgetExceededError(100, 10, what="symbolic expansion"),
        InvalidFunctionError(["a", "b"]),
    ):
        back = pickle.loads(pickle.dumps(exc))
        assert type(back) is type(exc)
        assert str(back) == str(exc)
        assert back.__dict__ == exc.__dict__


# ---------- escalate_precision ----------
def test_escalation_steps_until_success():
    seen = []

    def attempt(n):
        seen.append(n)
        if n < 14:
            raise InsufficientPrecisionError(f"need more than {n}")
        return n

    assert escalate_precision(attempt, start=10, step=2, cap=20) == 14
    assert seen == [10, 12, 14]


def test_escalation_is_capped_and_reraises():
    seen = []

    def attempt(n):
        seen.append(n)
        raise InsufficientPrecisionError("never enough")

    with pytest.raises(InsufficientPrecisionError):
        escalate_precision(attempt, start=10, step=4, cap=15, attempts=4)
    assert seen == [10, 14, 15, 15]


def test_other_errors_are_not_retried():
    calls = []

    def attempt(n):
        calls.append(n)
        raise ValueError("bad input")

    with pytest.raises(ValueError):
        escalate_precision(attempt, start=8, step=4, cap=64)
    assert calls == [8]


# ---------- logging ----------
def test_bound_context_reaches_the_event():
    with capture_logs() as logs:
        bind_logger(component="test").info("test.event", value=3)
    assert logs == [
        {"component": "test", "value": 3, "event": "test.event", "log_level": "info"}
    ]


def test_threshold_drops_lower_levels():
    configure_logging("WARNING")
    try:
        with pytest.raises(structlog.DropEvent):
            obs._drop_below_threshold(None, "info", {})
        assert obs._drop_below_threshold(None, "error", {"a": 1}) == {"a": 1}
    finally:
        configure_logging("INFO")
    assert obs._drop_below_threshold(None, "info", {}) == {}


# ---------- spans ----------
def test_sweep_span_records_attributes(spans):
    spans.clear()
    with sweep_span(primes="5,7", experiment="probe"):
        pass
    (span,) = spans.get_finished_spans()
    assert span.name == "sweep.run"
    assert span.attributes["sweep.primes"] == "5,7"
    assert span.attributes["experiment"] == "probe"
