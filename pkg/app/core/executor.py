"""
Worker pool management for parameter scans
"""

from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from typing import Callable, Iterable, Iterator, List, Optional, TypeVar

from app.core.config import settings

T = TypeVar("T")
R = TypeVar("R")


@contextmanager
def get_executor(max_workers: Optional[int] = None) -> Iterator[ThreadPoolExecutor]:
    """Yield a thread pool capped by QPT_THREADS"""
    workers = max(1, max_workers or settings.QPT_THREADS)
    pool = ThreadPoolExecutor(max_workers=workers, thread_name_prefix="qpt")
    try:
        yield pool
    finally:
        pool.shutdown(wait=True)


def ordered_map(func: Callable[[T], R], items: Iterable[T], max_workers: Optional[int] = None) -> List[R]:
    """Map over items in parallel; results come back in input order"""
    items = list(items)
    if (max_workers or settings.QPT_THREADS) <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with get_executor(max_workers) as pool:
        return list(pool.map(func, items))
