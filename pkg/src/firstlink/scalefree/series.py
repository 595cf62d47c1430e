"""Rank-frequency and complementary-CDF series for log-log plots."""

from __future__ import annotations

from typing import List, Tuple

import numpy as np


def rank_frequency_series(samples) -> List[Tuple[int, float]]:
    vals = np.sort(np.asarray(samples).reshape(-1))[::-1]
    if vals.size == 0:
        raise ValueError("rank_frequency_series of empty input")
    return [(r, v.item()) for r, v in enumerate(vals, start=1)]


def ccdf(samples) -> List[Tuple[float, float]]:
    """(value, fraction of samples >= value) at each distinct value."""
    vals = np.asarray(samples).reshape(-1)
    if vals.size == 0:
        raise ValueError("ccdf of empty input")
    uniq, counts = np.unique(vals, return_counts=True)
    at_least = np.cumsum(counts[::-1])[::-1] / vals.size
    return [(u.item(), float(f)) for u, f in zip(uniq, at_least)]
