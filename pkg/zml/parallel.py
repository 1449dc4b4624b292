"""Ordered process-pool mapping.

Workers must be top-level functions so they pickle. Results come back
in input order whatever the worker count, which keeps every reduction
downstream deterministic.
"""

from __future__ import annotations

import os
from collections.abc import Callable, Iterable
from concurrent.futures import ProcessPoolExecutor
from typing import TypeVar

T = TypeVar("T")
R = TypeVar("R")


def resolve_workers(threads: int | str | None) -> int:
    if threads is None:
        return 1
    if threads == "auto":
        return os.cpu_count() or 1
    return max(1, int(threads))


def map_ordered(
    fn: Callable[[T], R],
    items: Iterable[T],
    workers: int = 1,
    chunksize: int = 1,
) -> list[R]:
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items, chunksize=chunksize))
