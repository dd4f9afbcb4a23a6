"""Optional thread parallelism, capped by the FRACSPEC_THREADS variable.

Unset or 1 runs sequentially (the default); 0 means one thread per CPU.
Work items are indexed and results written back by index, so output never
depends on scheduling order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

__all__ = ["thread_count", "map_indexed"]


def thread_count() -> int:
    raw = os.environ.get("FRACSPEC_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    if n == 0:
        return os.cpu_count() or 1
    return max(1, n)


def map_indexed(fn, n_items: int):
    """Yield (index, fn(index)) for every index, possibly threaded."""
    workers = thread_count()
    if workers <= 1 or n_items <= 1:
        for idx in range(n_items):
            yield idx, fn(idx)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(fn, range(n_items)))
    for idx in range(n_items):
        yield idx, results[idx]
