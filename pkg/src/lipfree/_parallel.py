"""Deterministic thread mapping, capped by the LIPFREE_THREADS env var.

Results always come back in input order, so thread count never changes
any output, only wall time. The default is a single thread.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def thread_count() -> int:
    raw = os.environ.get("LIPFREE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def thread_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    items = list(items)
    workers = thread_count()
    if workers == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
