"""Prometheus metrics collection (optional)."""

import time
from contextlib import contextmanager
from typing import Any, Iterator, Optional

try:
    from prometheus_client import CollectorRegistry, Counter, Histogram, generate_latest
    from prometheus_client import write_to_textfile
    PROMETHEUS_AVAILABLE = True
except ImportError:
    PROMETHEUS_AVAILABLE = False


_registry: Optional[Any] = None
_replica_counter: Optional[Any] = None
_step_counter: Optional[Any] = None
_command_counter: Optional[Any] = None
_command_duration: Optional[Any] = None


def initialize_metrics() -> bool:
    """Create the metric set in a private registry. Returns False without prometheus."""
    global _registry, _replica_counter, _step_counter, _command_counter, _command_duration

    if not PROMETHEUS_AVAILABLE:
        return False
    if _registry is not None:
        return True

    _registry = CollectorRegistry()
    _replica_counter = Counter(
        'arcutoff_replicas_total',
        'Replicas simulated',
        ['operation'],  # forward, stationary, sphere, coupling
        registry=_registry,
    )
    _step_counter = Counter(
        'arcutoff_chain_steps_total',
        'Chain or walk steps executed',
        ['operation'],
        registry=_registry,
    )
    _command_counter = Counter(
        'arcutoff_commands_total',
        'CLI commands run',
        ['command', 'status'],  # ok, failed, error
        registry=_registry,
    )
    _command_duration = Histogram(
        'arcutoff_command_duration_seconds',
        'Wall time per CLI command',
        ['command'],
        registry=_registry,
    )
    return True


def reset_metrics() -> None:
    """Drop the registry (tests start from zero)."""
    global _registry, _replica_counter, _step_counter, _command_counter, _command_duration
    _registry = _replica_counter = _step_counter = _command_counter = _command_duration = None


def record_replicas(operation: str, count: int, steps: int = 0) -> None:
    if _replica_counter:
        _replica_counter.labels(operation=operation).inc(count)
    if _step_counter and steps:
        _step_counter.labels(operation=operation).inc(count * steps)


def record_command(command: str, status: str, duration: float) -> None:
    if _command_counter:
        _command_counter.labels(command=command, status=status).inc()
    if _command_duration:
        _command_duration.labels(command=command).observe(duration)


@contextmanager
def timed_command(command: str) -> Iterator[dict]:
    """Time a command; the caller sets ``state['status']``."""
    state = {"status": "ok"}
    start = time.perf_counter()
    try:
        yield state
    except Exception:
        state["status"] = "error"
        raise
    finally:
        record_command(command, state["status"], time.perf_counter() - start)


def get_metrics() -> bytes:
    """Metrics in text exposition format."""
    if not PROMETHEUS_AVAILABLE or _registry is None:
        return b"# Prometheus client not available\n"
    return generate_latest(_registry)


def write_metrics(path: str) -> bool:
    """Write the registry as a textfile-collector file. Returns False when disabled."""
    if not PROMETHEUS_AVAILABLE or _registry is None:
        return False
    write_to_textfile(path, _registry)
    return True
