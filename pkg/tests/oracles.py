"""Independent brute-force reference implementations used as test oracles.

Everything here is deliberately written from definitions (scalar loops,
piecewise integrals, a different published solar algorithm) so agreement
with the library is a genuine cross-check, not a restatement.
"""

from __future__ import annotations

import math
from datetime import datetime, timezone


def brute_pearson(x, y) -> float:
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    num = sum((x[i] - mx) * (y[i] - my) for i in range(n))
    dx = math.sqrt(sum((v - mx) ** 2 for v in x))
    dy = math.sqrt(sum((v - my) ** 2 for v in y))
    return num / (dx * dy)


def brute_midranks(x) -> list[float]:
    n = len(x)
    ranks = [0.0] * n
    order = sorted(range(n), key=lambda i: x[i])
    i = 0
    while i < n:
        j = i
        while j + 1 < n and x[order[j + 1]] == x[order[i]]:
            j += 1
        mean_rank = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = mean_rank
        i = j + 1
    return ranks


def brute_spearman(x, y) -> float:
    return brute_pearson(brute_midranks(x), brute_midranks(y))


def brute_mbe(runs) -> float:
    per_run = []
    for run in runs:
        errors = [run.predicted[k] - run.truth[k] for k in range(run.f) if run.valid[k]]
        if errors:
            per_run.append(sum(errors) / len(errors))
    return sum(per_run) / len(per_run)


def brute_mae(runs) -> float:
    per_run = []
    for run in runs:
        errors = [abs(run.predicted[k] - run.truth[k]) for k in range(run.f) if run.valid[k]]
        if errors:
            per_run.append(sum(errors) / len(errors))
    return sum(per_run) / len(per_run)


def brute_ks_stat(x, cdf) -> float:
    """sup |F_emp - F| from the left/right limits at every jump."""
    xs = sorted(x)
    n = len(xs)
    best = 0.0
    for i, v in enumerate(xs, start=1):
        f = cdf(v)
        best = max(best, abs(i / n - f), abs((i - 1) / n - f))
    return best


def brute_cvm_stat(x, cdf) -> float:
    """n * integral of (F_emp - F)^2 dF, summed piecewise in closed form."""
    xs = sorted(x)
    n = len(xs)
    u = [0.0] + [cdf(v) for v in xs] + [1.0]
    total = 0.0
    for i in range(n + 1):
        a, b = u[i], u[i + 1]
        c = i / n
        total += ((c - a) ** 3 - (c - b) ** 3) / 3.0
    return n * total


def brute_count_windows(power_valid, weather_valids, h, f, hours, issue_hour) -> int:
    """O(T*(h+f)) enumeration of admissible issue times."""
    n = len(power_valid)
    count = 0
    for i in range(n):
        if hours[i] != issue_hour:
            continue
        if i - h + 1 < 0 or i + f >= n:
            continue
        ok = all(power_valid[j] for j in range(i - h + 1, i + 1))
        for w in weather_valids:
            ok = ok and all(w[j] for j in range(i + 1, i + 1 + f))
        ok = ok and all(power_valid[j] for j in range(i + 1, i + 1 + f))
        if ok:
            count += 1
    return count


def finite_diff_gradients(net, x, y, step=1e-5):
    """Central-difference gradients of the batch MSE for every parameter."""
    import numpy as np

    from pvcast.nn import forward, mse

    grads_w, grads_b = [], []
    for w in net.weights:
        g = np.zeros_like(w)
        for idx in np.ndindex(w.shape):
            orig = w[idx]
            w[idx] = orig + step
            up = mse(forward(net, x), y)
            w[idx] = orig - step
            down = mse(forward(net, x), y)
            w[idx] = orig
            g[idx] = (up - down) / (2.0 * step)
        grads_w.append(g)
    for b in net.biases:
        g = np.zeros_like(b)
        for idx in np.ndindex(b.shape):
            orig = b[idx]
            b[idx] = orig + step
            up = mse(forward(net, x), y)
            b[idx] = orig - step
            down = mse(forward(net, x), y)
            b[idx] = orig
            g[idx] = (up - down) / (2.0 * step)
        grads_b.append(g)
    return grads_w, grads_b


# ---------------------------------------------------------------------------
# Solar position reference: the NOAA calculator's equations (Meeus-style),
# a different algorithm family from the Fourier-series production path.


def _julian_day(t: datetime) -> float:
    t = t.astimezone(timezone.utc)
    year, month = t.year, t.month
    day = (
        t.day
        + t.hour / 24.0
        + t.minute / 1440.0
        + t.second / 86400.0
        + t.microsecond / 86400e6
    )
    if month <= 2:
        year -= 1
        month += 12
    a = year // 100
    b = 2 - a + a // 4
    return math.floor(365.25 * (year + 4716)) + math.floor(30.6001 * (month + 1)) + day + b - 1524.5


def noaa_elevation_deg(lat: float, lon: float, t: datetime) -> float:
    """Geometric (unrefracted, unclamped) solar elevation in degrees."""
    jd = _julian_day(t)
    T = (jd - 2451545.0) / 36525.0

    l0 = (280.46646 + 36000.76983 * T + 0.0003032 * T * T) % 360.0
    m = math.radians(357.52911 + 35999.05029 * T - 0.0001537 * T * T)
    c = (
        (1.914602 - 0.004817 * T - 0.000014 * T * T) * math.sin(m)
        + (0.019993 - 0.000101 * T) * math.sin(2 * m)
        + 0.000289 * math.sin(3 * m)
    )
    true_long = l0 + c
    omega = math.radians(125.04 - 1934.136 * T)
    app_long = math.radians(true_long - 0.00569 - 0.00478 * math.sin(omega))

    eps0 = 23.0 + (26.0 + 21.448 / 60.0) / 60.0 - (46.815 * T + 0.00059 * T * T - 0.001813 * T**3) / 3600.0
    eps = math.radians(eps0 + 0.00256 * math.cos(omega))

    decl = math.asin(math.sin(eps) * math.sin(app_long))
    ra = math.degrees(math.atan2(math.cos(eps) * math.sin(app_long), math.cos(app_long)))

    gmst = (
        280.46061837
        + 360.98564736629 * (jd - 2451545.0)
        + 0.000387933 * T * T
        - T**3 / 38710000.0
    ) % 360.0
    hour_angle = math.radians((gmst + lon - ra) % 360.0)

    phi = math.radians(lat)
    sin_elev = math.sin(phi) * math.sin(decl) + math.cos(phi) * math.cos(decl) * math.cos(hour_angle)
    return math.degrees(math.asin(max(-1.0, min(1.0, sin_elev))))
