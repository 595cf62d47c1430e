from .alternatives import (
    ALTERNATIVES,
    ComparisonResult,
    compare_distributions,
    fit_alternative,
    loglikelihood_ratio,
)
from .fit import FitError, FitResult, fit_power_law, ks_distance, rank_exponent
from .series import ccdf, rank_frequency_series
from .zeta import hurwitz_zeta

__all__ = [
    "ALTERNATIVES",
    "ComparisonResult",
    "FitError",
    "FitResult",
    "ccdf",
    "compare_distributions",
    "fit_alternative",
    "fit_power_law",
    "hurwitz_zeta",
    "ks_distance",
    "loglikelihood_ratio",
    "rank_exponent",
    "rank_frequency_series",
]
