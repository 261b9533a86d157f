"""Goodness-of-fit tests and Q-Q data against a candidate distribution.

The Kolmogorov-Smirnov p-value comes from the asymptotic Kolmogorov
distribution at sqrt(n) * D; the Cramer-von Mises p-value from the series
expansion of the limiting distribution of W^2, which involves K_{1/4}.
Neither applies a correction for estimated parameters, which makes both
tests conservative when the candidate was fitted to the same data.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from ..errors import DegenerateDataError
from .bessel import bessel_k_scaled


class GofResult(NamedTuple):
    stat: float
    p: float


def kolmogorov_sf(t: float) -> float:
    """Survival function of the Kolmogorov distribution.

    Jacobi-theta form below t = 1 where the alternating series is slow,
    alternating exponential series above.
    """
    if t <= 0.0:
        return 1.0
    if t < 1.0:
        total = 0.0
        k = 1
        while k < 2000:
            term = math.exp(-((2 * k - 1) ** 2) * math.pi**2 / (8.0 * t * t))
            total += term
            if term < 1e-18 * max(total, 1.0):
                break
            k += 1
        return min(1.0, max(0.0, 1.0 - math.sqrt(2.0 * math.pi) / t * total))
    total = 0.0
    sign = 1.0
    for k in range(1, 2000):
        term = sign * math.exp(-2.0 * k * k * t * t)
        total += term
        if abs(term) < 1e-18:
            break
        sign = -sign
    return min(1.0, max(0.0, 2.0 * total))


def cvm_limit_cdf(w2: float) -> float:
    """Limiting CDF of the Cramer-von Mises statistic.

    Series of scaled K_{1/4} terms; summed past the point where terms fall
    below 1e-14 (and at least 10 terms), so truncation stays well under
    1e-8.
    """
    if w2 <= 0.0:
        return 0.0
    total = 0.0
    coef = 1.0  # C(2j, j) / 4^j
    for j in range(400):
        if j > 0:
            coef *= (2.0 * j - 1.0) / (2.0 * j)
        y = 4.0 * j + 1.0
        e = y * y / (16.0 * w2)
        term = coef * math.sqrt(y) * math.exp(-2.0 * e) * float(bessel_k_scaled(0.25, e))
        total += term
        if j >= 10 and term < 1e-14:
            break
    return min(1.0, max(0.0, total / (math.pi * math.sqrt(w2))))


def _sorted_cdf_values(x, dist):
    x = np.asarray(x, dtype=np.float64)
    if len(x) < 8:
        raise DegenerateDataError("goodness-of-fit tests need at least 8 points")
    xs = np.sort(x)
    return xs, np.asarray(dist.cdf(xs), dtype=np.float64)


def ks_test(x, dist) -> GofResult:
    """One-sample Kolmogorov-Smirnov test of x against ``dist``.

    ``dist`` is anything exposing a vectorized ``cdf``.
    """
    xs, f = _sorted_cdf_values(x, dist)
    n = len(xs)
    i = np.arange(1, n + 1)
    d_plus = float(np.max(i / n - f))
    d_minus = float(np.max(f - (i - 1) / n))
    stat = max(d_plus, d_minus)
    return GofResult(stat, kolmogorov_sf(math.sqrt(n) * stat))


def cvm_test(x, dist) -> GofResult:
    """One-sample Cramer-von Mises test of x against ``dist``."""
    xs, f = _sorted_cdf_values(x, dist)
    n = len(xs)
    i = np.arange(1, n + 1)
    stat = 1.0 / (12.0 * n) + float(np.sum((f - (2.0 * i - 1.0) / (2.0 * n)) ** 2))
    return GofResult(stat, 1.0 - cvm_limit_cdf(stat))


def qq_points(x, dist) -> np.ndarray:
    """(theoretical, empirical) quantile pairs at positions (i - 0.5) / n."""
    x = np.asarray(x, dtype=np.float64)
    n = len(x)
    if n < 2:
        raise DegenerateDataError("qq_points needs at least 2 points")
    empirical = np.sort(x)
    theoretical = np.array([dist.quantile((i - 0.5) / n) for i in range(1, n + 1)])
    return np.column_stack([theoretical, empirical])
