"""Optional process-level parallelism for exhaustive sweeps.

PARHYP_THREADS caps the worker count: unset or 1 runs serially, 0 picks
``os.cpu_count()``.  Results always come back in input order.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def worker_count() -> int:
    raw = os.environ.get("PARHYP_THREADS", "1").strip() or "1"
    n = int(raw)
    if n < 0:
        raise ValueError("PARHYP_THREADS must be >= 0")
    return (os.cpu_count() or 1) if n == 0 else n


def pmap(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    chunk = max(1, len(items) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunk))
