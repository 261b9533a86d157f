"""Modified Bessel function of the second kind, real order.

Thin contract layer over scipy's AMOS-backed implementation: strict domain
checking (x must be positive) and an exponentially scaled variant for large
arguments, which the heavy-tail density evaluations use to stay in range.
"""

from __future__ import annotations

import numpy as np
from scipy import special


def _check_positive(x):
    x = np.asarray(x, dtype=np.float64)
    if np.any(x <= 0) or np.any(~np.isfinite(x)):
        raise ValueError("bessel_k requires strictly positive finite x")
    return x


def bessel_k(order, x):
    """K_v(x) for real order v and x > 0."""
    x = _check_positive(x)
    out = special.kv(order, x)
    return float(out) if np.isscalar(order) and out.ndim == 0 else out


def bessel_k_scaled(order, x):
    """exp(x) * K_v(x): the scaled variant, finite far into the right tail."""
    x = _check_positive(x)
    out = special.kve(order, x)
    return float(out) if np.isscalar(order) and out.ndim == 0 else out


def log_bessel_k(order, x):
    """log K_v(x), evaluated through the scaled form for stability."""
    x = _check_positive(x)
    return np.log(special.kve(order, x)) - x
