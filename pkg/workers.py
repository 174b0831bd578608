#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Worker Pool
Ordered chunk parallelism; results always come back in submission order.
"""

import logging
from multiprocessing import Pool, cpu_count
from typing import Callable, Iterable, List, Optional, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

_default_workers = 1


def set_default_workers(count: Optional[int]) -> int:
    """Caps the worker count used when callers pass workers=None."""
    global _default_workers
    if count is None or count < 1:
        count = 1
    _default_workers = min(count, cpu_count())
    return _default_workers


def default_workers() -> int:
    return _default_workers


def chunk_ranges(total: int, chunks: int) -> List[range]:
    """Splits range(total) into at most `chunks` contiguous pieces."""
    if total <= 0:
        return []
    chunks = max(1, min(chunks, total))
    step = -(-total // chunks)
    return [range(start, min(start + step, total)) for start in range(0, total, step)]


def ordered_map(func: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> List[R]:
    """Maps func over items; sequential when a single worker is configured.

    func and items must be picklable when more than one worker is used.
    """
    items = list(items)
    count = default_workers() if workers is None else max(1, workers)
    if count == 1 or len(items) <= 1:
        return [func(item) for item in items]

    logger.debug(f"🔄 {len(items)} chunks on {count} workers")
    with Pool(processes=min(count, len(items))) as pool:
        return pool.map(func, items)
