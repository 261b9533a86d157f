"""Geometric solar elevation for a site and UTC instant.

Uses the classic low-precision sequence: fractional year, declination and
equation of time from short Fourier series, true solar time from longitude,
then the hour angle. Atmospheric refraction is deliberately ignored and
angles below the horizon are clamped to zero, so the output is a pure
geometry feature in [0, 90] degrees.
"""

from __future__ import annotations

import math
from datetime import datetime, timedelta, timezone

from .series import UNIT_DEGREES, HourlySeries, SiteMeta
from .timeutil import add_hours, floor_hour

_TWO_PI = 2.0 * math.pi


def _fractional_year(t: datetime) -> float:
    """Year angle in radians; leap years use a 366-day circle."""
    t = t.astimezone(timezone.utc)
    year_start = datetime(t.year, 1, 1, tzinfo=timezone.utc)
    day_of_year = (t - year_start).days
    days_in_year = 366 if t.year % 4 == 0 and (t.year % 100 != 0 or t.year % 400 == 0) else 365
    hour = t.hour + t.minute / 60.0 + t.second / 3600.0
    return _TWO_PI / days_in_year * (day_of_year + (hour - 12.0) / 24.0)


def _declination_rad(gamma: float) -> float:
    return (
        0.006918
        - 0.399912 * math.cos(gamma)
        + 0.070257 * math.sin(gamma)
        - 0.006758 * math.cos(2 * gamma)
        + 0.000907 * math.sin(2 * gamma)
        - 0.002697 * math.cos(3 * gamma)
        + 0.00148 * math.sin(3 * gamma)
    )


def _equation_of_time_minutes(gamma: float) -> float:
    return 229.18 * (
        0.000075
        + 0.001868 * math.cos(gamma)
        - 0.032077 * math.sin(gamma)
        - 0.014615 * math.cos(2 * gamma)
        - 0.040849 * math.sin(2 * gamma)
    )


def solar_elevation(latitude: float, longitude: float, t: datetime) -> float:
    """Clamped geometric solar elevation in degrees for a UTC instant."""
    if not -90.0 <= latitude <= 90.0:
        raise ValueError(f"latitude {latitude} outside [-90, 90]")
    if not -180.0 <= longitude <= 180.0:
        raise ValueError(f"longitude {longitude} outside [-180, 180]")
    t = t.astimezone(timezone.utc)
    gamma = _fractional_year(t)
    decl = _declination_rad(gamma)
    eqtime = _equation_of_time_minutes(gamma)
    utc_minutes = t.hour * 60.0 + t.minute + t.second / 60.0
    true_solar_minutes = utc_minutes + eqtime + 4.0 * longitude
    hour_angle = math.radians(true_solar_minutes / 4.0 - 180.0)
    lat = math.radians(latitude)
    sin_elev = math.sin(lat) * math.sin(decl) + math.cos(lat) * math.cos(decl) * math.cos(hour_angle)
    elev = math.degrees(math.asin(max(-1.0, min(1.0, sin_elev))))
    return max(0.0, min(90.0, elev))


def elevation_series(
    site: SiteMeta, start: datetime, count: int, at_midpoint: bool = True
) -> HourlySeries:
    """Per-hour elevations for ``count`` hours starting at ``start``.

    By default each hour is evaluated at its midpoint (H + 30 min), matching
    the period-mean convention of the resampled series; ``at_midpoint=False``
    evaluates on the hour instead.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    start = floor_hour(start)
    offset = timedelta(minutes=30) if at_midpoint else timedelta(0)
    values = [
        solar_elevation(site.latitude, site.longitude, add_hours(start, i) + offset)
        for i in range(count)
    ]
    return HourlySeries(start=start, values=values, valid=[True] * count, unit=UNIT_DEGREES)
