"""Likelihood-ratio comparison of a power-law tail against alternatives.

Each alternative is a discrete distribution on the same tail x >= xmin,
fitted by maximum likelihood.  Continuous families are discretized by
differencing their survival function.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Dict, Tuple

import numpy as np
from scipy import integrate, optimize, special

from .fit import FitResult, power_law_logpmf, tail_of

logger = logging.getLogger(__name__)

ALTERNATIVES = ("exponential", "stretched_exponential", "lognormal", "truncated_power_law")

_TPL_DIRECT_TERMS = 20_000
_LOG_FLOOR = 1e-300

# Search boxes, in optimizer coordinates: (log lambda, log beta), (mu, log sigma),
# (gamma, log lambda).  Hitting a wall is reported in the result message.
_STRETCHED_BOUNDS = [(-30.0, 10.0), (math.log(0.01), math.log(5.0))]
_LOGNORMAL_BOUNDS = [(-50.0, 50.0), (math.log(0.01), math.log(50.0))]
_TPL_BOUNDS = [(-5.0, 6.0), (-30.0, 5.0)]


@dataclass(frozen=True)
class ComparisonResult:
    alternative: str
    R: float
    p: float
    converged: bool = True
    params: Dict[str, float] = field(default_factory=dict)
    message: str = ""

    def favors(self, significance: float = 0.05) -> str:
        """'power_law', the alternative's name, or 'inconclusive'."""
        if not self.converged or not self.p < significance:
            return "inconclusive"
        return "power_law" if self.R > 0 else self.alternative


def loglikelihood_ratio(ll_a: np.ndarray, ll_b: np.ndarray) -> Tuple[float, float]:
    """Normalized ratio R and two-sided normal p-value; R > 0 favors ``a``."""
    d = np.asarray(ll_a, dtype=np.float64) - np.asarray(ll_b, dtype=np.float64)
    n = d.size
    sigma = float(d.std())
    if n == 0 or sigma == 0.0:
        return 0.0, 1.0
    r = float(d.sum()) / (sigma * math.sqrt(n))
    return r, float(special.erfc(abs(r) / math.sqrt(2)))


def _log_diff_survival(log_s_x: np.ndarray, log_s_next: np.ndarray) -> np.ndarray:
    # log(S(x) - S(x+1)) from log S values
    gap = -np.expm1(log_s_next - log_s_x)
    return log_s_x + np.log(np.maximum(gap, _LOG_FLOOR))


def exponential_logpmf(x, xmin, lam):
    return math.log(-math.expm1(-lam)) - lam * (x - xmin)


def stretched_exp_logpmf(x, xmin, lam, beta):
    log_s = lambda v: -np.power(lam * v, beta)
    return _log_diff_survival(log_s(x), log_s(x + 1.0)) - log_s(float(xmin))


def lognormal_logpmf(x, xmin, mu, sigma):
    log_s = lambda v: special.log_ndtr(-(np.log(v) - mu) / sigma)
    return _log_diff_survival(log_s(x), log_s(x + 1.0)) - log_s(float(xmin))


def _tpl_log_norm(xmin: int, gamma: float, lam: float) -> float:
    k = np.arange(xmin, xmin + _TPL_DIRECT_TERMS, dtype=np.float64)
    log_terms = -gamma * np.log(k) - lam * k
    top = log_terms.max()
    head = float(np.exp(log_terms - top).sum())
    end = float(xmin + _TPL_DIRECT_TERMS)
    # remaining terms by integral, shifted half a step; slow convergence only
    # happens far from the optimum, where the optimizer copes with a rough value
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        tail, _ = integrate.quad(
            lambda v: math.exp(-gamma * math.log(v) - lam * v - top), end - 0.5, math.inf, limit=200
        )
    return top + math.log(head + tail)


def truncated_power_law_logpmf(x, xmin, gamma, lam):
    return -gamma * np.log(x) - lam * x - _tpl_log_norm(xmin, gamma, lam)


def _minimize(neg_ll: Callable[[np.ndarray], float], start, bounds) -> optimize.OptimizeResult:
    start = np.clip(np.asarray(start, dtype=np.float64), [b[0] for b in bounds], [b[1] for b in bounds])
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        return optimize.minimize(
            neg_ll, start, method="L-BFGS-B", bounds=bounds, options={"maxiter": 2000}
        )


def fit_alternative(x: np.ndarray, xmin: int, name: str):
    """MLE of ``name`` on tail ``x``; returns (per-point loglik, params, result)."""
    xf = x.astype(np.float64)
    if name == "exponential":
        mean_excess = float((xf - xmin).mean())
        if mean_excess <= 0:
            raise ArithmeticError("tail has no spread")
        lam = math.log1p(1.0 / mean_excess)
        return exponential_logpmf(xf, xmin, lam), {"lambda": lam}, None

    if name == "stretched_exponential":
        def nll(theta):
            lam, beta = np.exp(theta)
            return -float(stretched_exp_logpmf(xf, xmin, lam, beta).sum())
        res = _minimize(nll, [math.log(1.0 / xf.mean()), 0.0], _STRETCHED_BOUNDS)
        lam, beta = np.exp(res.x)
        return stretched_exp_logpmf(xf, xmin, lam, beta), {"lambda": float(lam), "beta": float(beta)}, res

    if name == "lognormal":
        logs = np.log(xf)
        def nll(theta):
            return -float(lognormal_logpmf(xf, xmin, theta[0], math.exp(theta[1])).sum())
        res = _minimize(nll, [logs.mean(), math.log(max(logs.std(), 0.1))], _LOGNORMAL_BOUNDS)
        mu, sigma = float(res.x[0]), math.exp(res.x[1])
        return lognormal_logpmf(xf, xmin, mu, sigma), {"mu": mu, "sigma": sigma}, res

    if name == "truncated_power_law":
        sum_log, sum_x, n = float(np.log(xf).sum()), float(xf.sum()), xf.size
        def nll(theta):
            gamma, lam = theta[0], math.exp(theta[1])
            return gamma * sum_log + lam * sum_x + n * _tpl_log_norm(xmin, gamma, lam)
        start_gamma = 1.0 + n / float(np.log(xf / (xmin - 0.5)).sum())
        res = _minimize(nll, [start_gamma, math.log(1.0 / (10.0 * xf.mean()))], _TPL_BOUNDS)
        gamma, lam = float(res.x[0]), math.exp(res.x[1])
        return truncated_power_law_logpmf(xf, xmin, gamma, lam), {"gamma": gamma, "lambda": lam}, res

    raise ValueError(f"unknown alternative {name!r}; expected one of {ALTERNATIVES}")


def compare_distributions(samples, fit: FitResult, alternative: str) -> ComparisonResult:
    """Vuong-style test of the fitted power law against ``alternative``."""
    x = tail_of(samples, fit)
    pl = power_law_logpmf(x.astype(np.float64), fit.gamma, fit.xmin)
    try:
        alt, params, res = fit_alternative(x, fit.xmin, alternative)
    except (ArithmeticError, FloatingPointError, ValueError) as exc:
        if alternative not in ALTERNATIVES:
            raise
        logger.warning("%s fit failed: %s", alternative, exc)
        return ComparisonResult(alternative, math.nan, math.nan, False, {}, str(exc))
    if res is not None and not res.success:
        msg = f"{res.message} (nit={res.nit}, nll={res.fun:.6g}, x={np.round(res.x, 6).tolist()})"
        logger.warning("%s MLE did not converge: %s", alternative, msg)
        return ComparisonResult(alternative, math.nan, math.nan, False, params, msg)
    if not np.all(np.isfinite(alt)):
        return ComparisonResult(alternative, math.nan, math.nan, False, params, "non-finite likelihood")
    r, p = loglikelihood_ratio(pl, alt)
    note = ""
    if res is not None:
        bounds = {"stretched_exponential": _STRETCHED_BOUNDS, "lognormal": _LOGNORMAL_BOUNDS,
                  "truncated_power_law": _TPL_BOUNDS}[alternative]
        walls = [i for i, (v, (lo, hi)) in enumerate(zip(res.x, bounds)) if np.isclose(v, lo) or np.isclose(v, hi)]
        if walls:
            note = f"parameter(s) {walls} at search bound"
    return ComparisonResult(alternative, r, p, True, params, note)
