"""
Order-preserving parallel map helpers
"""
from typing import Callable, Iterable, List, Optional, TypeVar

import joblib

from settings import settings

T = TypeVar("T")
R = TypeVar("R")


def resolve_threads(threads: Optional[int] = None) -> int:
    """Explicit value wins, then the runtime setting, never less than one"""
    if threads is None:
        threads = settings.WORKER_THREADS or 1
    return max(1, int(threads))


def ordered_map(func: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """
    Map func over items, possibly in worker threads, keeping input order

    Args:
        func: Function applied to each item
        items: Inputs
        threads: Worker cap (None uses settings.WORKER_THREADS)

    Returns:
        Results in the order of items, independent of the thread count
    """
    items = list(items)
    workers = min(resolve_threads(threads), len(items))
    if workers <= 1:
        return [func(item) for item in items]
    # numpy releases the GIL in the heavy kernels
    return joblib.Parallel(n_jobs=workers, prefer="threads")(joblib.delayed(func)(item) for item in items)


def chunked(items: list, n_chunks: int) -> List[list]:
    """Split items into at most n_chunks contiguous slices"""
    n_chunks = max(1, min(n_chunks, len(items)))
    size, extra = divmod(len(items), n_chunks)
    chunks, start = [], 0
    for i in range(n_chunks):
        stop = start + size + (1 if i < extra else 0)
        chunks.append(items[start:stop])
        start = stop
    return chunks
