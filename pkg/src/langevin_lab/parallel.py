"""Thread budgeting for embarrassingly parallel sweeps.

Work items here are independent by construction (per-replica noise
streams, per-point planner searches), so threads only affect wall time,
never results.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

ENV_THREADS = "LANGEVIN_LAB_THREADS"

T = TypeVar("T")
R = TypeVar("R")

__all__ = ["ENV_THREADS", "thread_cap", "parallel_map"]


def thread_cap() -> int:
    """Worker count: LANGEVIN_LAB_THREADS if set, else the CPU count."""
    raw = os.environ.get(ENV_THREADS)
    if raw is None:
        return max(1, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{ENV_THREADS} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"{ENV_THREADS} must be a positive integer, got {raw!r}")
    return n


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Map fn over items with at most thread_cap() workers, preserving order."""
    seq: Sequence[T] = list(items)
    workers = min(thread_cap(), len(seq)) if seq else 1
    if workers <= 1:
        return [fn(x) for x in seq]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, seq))
