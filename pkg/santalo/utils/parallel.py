"""Deterministic chunked execution on a thread pool.

numpy and qhull release the GIL for the heavy parts, so threads are enough
at desk scale. Results always come back in chunk order.
"""

from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

from santalo.settings import settings

T = TypeVar("T")
R = TypeVar("R")


def chunk_bounds(total: int, chunk: int) -> list[tuple[int, int]]:
    if total <= 0:
        return []
    chunk = max(1, chunk)
    return [(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]


def ordered_map(
    fn: Callable[[T], R], items: Sequence[T], workers: int | None = None
) -> list[R]:
    """Map ``fn`` over ``items`` concurrently, keeping input order."""
    workers = workers or settings.WORKERS
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
