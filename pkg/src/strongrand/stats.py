"""Pearson chi-square goodness of fit with a self-contained upper-tail p-value.

The chi-square survival function is the regularized upper incomplete gamma
Q(df/2, x/2), evaluated by its power series below a+1 and by a Lentz
continued fraction above (Numerical Recipes 6.2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_EPS = 1e-15
_TINY = 1e-300
_MAX_ITER = 10_000


def _lower_series(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x), valid for x < a + 1."""
    term = total = 1.0 / a
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _upper_fraction(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x), valid for x >= a + 1."""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def gammaincc(a: float, x: float) -> float:
    if a <= 0:
        raise ValueError("shape parameter must be positive")
    if x <= 0:
        return 1.0
    if x < a + 1.0:
        return max(0.0, 1.0 - _lower_series(a, x))
    return min(1.0, _upper_fraction(a, x))


def chi2_sf(statistic: float, df: int) -> float:
    """P(X >= statistic) for X ~ chi-square(df). df = 0 is the point mass at 0."""
    if df < 0:
        raise ValueError("degrees of freedom must be non-negative")
    if df == 0:
        return 1.0 if statistic <= 0 else 0.0
    return gammaincc(df / 2.0, statistic / 2.0)


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    df: int
    p_value: float
    significance: float
    dispersion: float = 1.0

    @property
    def passed(self) -> bool:
        return self.p_value > self.significance

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "df": self.df,
            "p_value": self.p_value,
            "significance": self.significance,
            "dispersion": self.dispersion,
            "passed": self.passed,
        }


def chi_square(
    observed,
    expected_per_cell: float,
    df: int | None = None,
    significance: float = 0.001,
    dispersion: float = 1.0,
) -> ChiSquareResult:
    """Pearson statistic sum((O - E)^2 / E) against a flat expectation.

    `df` defaults to cells - 1 (a single multinomial). Tables whose cells are
    correlated beyond the multinomial constraint pass the matching `df` and a
    `dispersion`: the statistic divided by `dispersion` is referred to
    chi-square(df).
    """
    counts = np.asarray(observed, dtype=float)
    if expected_per_cell <= 0:
        raise ValueError("expected count must be positive")
    statistic = float(((counts - expected_per_cell) ** 2).sum() / expected_per_cell)
    if df is None:
        df = counts.size - 1
    p = chi2_sf(statistic / dispersion, df)
    return ChiSquareResult(statistic, df, p, significance, dispersion)
