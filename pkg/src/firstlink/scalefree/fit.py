"""Discrete power-law fitting: MLE exponent with the KS-minimizing xmin."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from .zeta import hurwitz_zeta

logger = logging.getLogger(__name__)

MIN_TAIL = 50
GAMMA_BOUNDS = (1.01, 6.0)
GAMMA_TOL = 1e-6

_INVPHI = (math.sqrt(5) - 1) / 2


class FitError(ValueError):
    """The sample cannot support a power-law fit."""


def rank_exponent(gamma: float) -> float:
    """Zipf rank exponent for a density exponent: alpha = 1 / (gamma - 1)."""
    if not gamma > 1:
        raise ValueError("gamma must exceed 1")
    return 1.0 / (gamma - 1.0)


@dataclass(frozen=True, eq=False)
class FitResult:
    xmin: int
    gamma: float
    alpha: float
    ks_distance: float
    n_tail: int
    loglikelihood: float
    # candidate scan: xmin, gamma and KS distance per candidate
    scan: Tuple[np.ndarray, np.ndarray, np.ndarray] = field(repr=False, default=None)


def golden_section_max(
    f: Callable[[float], float], lo: float, hi: float, tol: float = GAMMA_TOL
) -> float:
    """Maximizer of a unimodal ``f`` on ``[lo, hi]``."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return (a + b) / 2


def power_law_loglik(gamma: float, xmin: int, n: int, sum_log: float) -> float:
    return -gamma * sum_log - n * math.log(hurwitz_zeta(gamma, xmin))


def power_law_logpmf(x: np.ndarray, gamma: float, xmin: int) -> np.ndarray:
    return -gamma * np.log(x) - math.log(hurwitz_zeta(gamma, xmin))


def ks_distance(tail: np.ndarray, gamma: float, xmin: int) -> float:
    """Sup over integers x >= xmin of |empirical CDF - fitted CDF|.

    Between consecutive observed values the empirical CDF is flat while the
    fitted one rises, so the sup is attained at an observed value or just
    before the next one; checking both ends of each gap is exact.
    """
    values, counts = np.unique(tail, return_counts=True)
    emp = np.cumsum(counts) / tail.size
    z0 = hurwitz_zeta(gamma, xmin)
    at = 1.0 - hurwitz_zeta(gamma, values + 1.0) / z0
    gap_end = values[1:] - 1
    before_next = 1.0 - hurwitz_zeta(gamma, gap_end + 1.0) / z0
    d = np.abs(emp - at).max()
    if gap_end.size:
        d = max(d, np.abs(emp[:-1] - before_next).max())
    return float(d)


def _clean(samples) -> np.ndarray:
    arr = np.asarray(samples).reshape(-1)
    if arr.size and not np.all(np.equal(np.mod(arr, 1), 0)):
        raise FitError("power-law samples must be integers")
    arr = arr.astype(np.int64)
    return np.sort(arr[arr >= 1])


def fit_power_law(
    samples,
    xmin: Optional[int] = None,
    min_tail: int = MIN_TAIL,
    xmin_max: Optional[int] = None,
    gamma_bounds: Tuple[float, float] = GAMMA_BOUNDS,
) -> FitResult:
    """Fit p(x) = x^-gamma / zeta(gamma, xmin) on x >= xmin.

    Values below 1 are dropped.  With ``xmin=None`` every distinct sample
    value leaving at least ``min_tail`` points (and at most ``xmin_max``,
    if given) is tried, and the one with the smallest KS distance wins;
    ties go to the smaller xmin.
    """
    data = _clean(samples)
    if data.size < min_tail:
        raise FitError(f"need at least {min_tail} samples >= 1, got {data.size}")
    if data[0] == data[-1]:
        raise FitError("all samples equal; power law is degenerate")

    logs = np.log(data.astype(np.float64))
    suffix_log = np.concatenate([np.cumsum(logs[::-1])[::-1], [0.0]])
    uniq, first = np.unique(data, return_index=True)
    if xmin is not None:
        keep = uniq == xmin
        if not keep.any():
            raise FitError(f"xmin={xmin} is not a sample value")
    else:
        keep = (data.size - first >= min_tail) & (uniq < data[-1])
        if xmin_max is not None:
            keep &= uniq <= xmin_max
        if not keep.any():
            raise FitError("no xmin candidate leaves a non-degenerate tail")
    cand, cand_first = uniq[keep], first[keep]

    gammas = np.empty(cand.size)
    kss = np.empty(cand.size)
    for i, (xm, lo) in enumerate(zip(cand.tolist(), cand_first.tolist())):
        n_tail = data.size - lo
        s_log = suffix_log[lo]
        g = golden_section_max(
            lambda gm: power_law_loglik(gm, xm, n_tail, s_log), *gamma_bounds
        )
        gammas[i] = g
        kss[i] = ks_distance(data[lo:], g, xm)

    best = int(np.argmin(kss))  # first minimum = smallest xmin on ties
    xm, lo = int(cand[best]), int(cand_first[best])
    gamma = float(gammas[best])
    n_tail = data.size - lo
    logger.debug("power-law fit: xmin=%d gamma=%.4f over %d candidates", xm, gamma, cand.size)
    return FitResult(
        xmin=xm,
        gamma=gamma,
        alpha=rank_exponent(gamma),
        ks_distance=float(kss[best]),
        n_tail=int(n_tail),
        loglikelihood=power_law_loglik(gamma, xm, n_tail, suffix_log[lo]),
        scan=(cand.copy(), gammas, kss),
    )


def tail_of(samples, fit: FitResult) -> np.ndarray:
    data = _clean(samples)
    return data[data >= fit.xmin]
