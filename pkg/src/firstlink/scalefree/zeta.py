"""Hurwitz zeta by direct summation plus an Euler-Maclaurin tail."""

from __future__ import annotations

import math

import numpy as np

_DIRECT_TERMS = 10
# B_2, B_4, ..., B_14
_BERNOULLI = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6)


def hurwitz_zeta(s: float, q):
    """sum_{k>=0} (q + k)^-s for s > 1, q > 0 (vectorized over q).

    Relative error is below 1e-12 for s in (1, 8] and q >= 1.
    """
    if not s > 1:
        raise ValueError(f"hurwitz_zeta needs s > 1, got {s}")
    qa = np.asarray(q, dtype=np.float64)
    if np.any(qa <= 0):
        raise ValueError("hurwitz_zeta needs q > 0")
    k = np.arange(_DIRECT_TERMS, dtype=np.float64)
    head = np.power(qa[..., None] + k, -s).sum(axis=-1)
    a = qa + _DIRECT_TERMS
    tail = np.power(a, 1 - s) / (s - 1) + 0.5 * np.power(a, -s)
    rising = s  # s (s+1) ... (s+2j-2)
    for j, b in enumerate(_BERNOULLI, start=1):
        tail = tail + b / math.factorial(2 * j) * rising * np.power(a, -s - 2 * j + 1)
        rising *= (s + 2 * j - 1) * (s + 2 * j)
    out = head + tail
    return float(out) if out.ndim == 0 else out
