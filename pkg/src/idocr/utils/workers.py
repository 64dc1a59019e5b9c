"""
Ordered worker pool.

Results always come back in input order, so parallel and serial runs write
identical artifacts.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def default_threads() -> int:
    return os.cpu_count() or 1


def resolve_threads(threads: Optional[int]) -> int:
    if threads is None or threads <= 0:
        return default_threads()
    return threads


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = 1) -> List[R]:
    """Apply fn to every item, in a thread pool when threads > 1, preserving order."""
    items = list(items)
    workers = min(resolve_threads(threads), max(1, len(items)))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="idocr") as pool:
        return list(pool.map(fn, items))
