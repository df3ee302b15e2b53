"""Ordered parallel map over independent chunks of work."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def default_threads() -> int:
    return os.cpu_count() or 1


def ordered_map(fn, items, threads: int | None = None) -> list:
    """``[fn(x) for x in items]``, optionally on a thread pool; order is kept."""
    items = list(items)
    threads = default_threads() if threads is None else threads
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
