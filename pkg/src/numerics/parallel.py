"""
Sweep Fan-out

Order-preserving map over independent evaluations, bounded by the thread cap.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar
import logging

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(func: Callable[[T], R], items: Iterable[T], threads: int = 1) -> List[R]:
    """
    Apply ``func`` to every item, returning results in input order.

    Args:
        func: Pure function of one argument
        items: Inputs
        threads: Worker cap; 1 runs serially

    Returns:
        List of results aligned with ``items``
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    workers = min(threads, len(items))
    logger.debug(f"Fanning out {len(items)} evaluations over {workers} threads")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
