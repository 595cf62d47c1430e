"""Partition-and-merge helpers shared by the metric kernels and the dump parser."""

from __future__ import annotations

from collections import deque
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Iterator, List, Sequence, Tuple, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")


def split_range(n: int, parts: int) -> List[Tuple[int, int]]:
    """Contiguous ``[lo, hi)`` ranges covering ``range(n)``; empty ranges dropped."""
    parts = max(1, min(parts, n)) if n else 1
    bounds = np.linspace(0, n, parts + 1).astype(np.int64)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def ordered_map(fn: Callable[[T], R], items: Sequence[T], workers: int) -> List[R]:
    """Map in worker processes, returning results in input order."""
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if workers == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def ordered_imap(fn: Callable[[T], R], items: Iterable[T], workers: int, window: int = 0) -> Iterator[R]:
    """Lazy :func:`ordered_map` keeping at most ``window`` tasks in flight."""
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if workers == 1:
        for x in items:
            yield fn(x)
        return
    window = window or 2 * workers
    with ProcessPoolExecutor(max_workers=workers) as pool:
        pending: deque = deque()
        for x in items:
            pending.append(pool.submit(fn, x))
            if len(pending) >= window:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()


def merge_counts(parts: Iterable[np.ndarray], n: int) -> np.ndarray:
    """Additive merge of per-partition integer counters."""
    total = np.zeros(n, dtype=np.int64)
    for p in parts:
        total += p
    return total
