"""Shared error types and the thread-pool helper."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


class ConfigError(ValueError):
    """Invalid configuration or arguments (CLI exit code 2)."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to meet its own requirements (CLI exit code 3)."""


THREADS_ENV = "HEATBC_THREADS"


def worker_count() -> int:
    """Thread count for embarrassingly parallel evaluation loops.

    Controlled by the HEATBC_THREADS environment variable; defaults to the
    machine's CPU count.
    """
    raw = os.environ.get(THREADS_ENV, "")
    if raw.strip():
        try:
            count = int(raw)
        except ValueError as exc:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
        if count < 1:
            raise ConfigError(f"{THREADS_ENV} must be >= 1, got {count}")
        return count
    return os.cpu_count() or 1


def parallel_map(fn, items):
    """Map fn over items, preserving order.

    Uses a thread pool sized by worker_count(); falls back to a plain loop for
    a single worker. fn must be pure so the result is independent of the
    execution schedule.
    """
    items = list(items)
    workers = worker_count()
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))
