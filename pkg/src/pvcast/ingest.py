"""Reading, cleaning, resampling, and windowing of the input time series.

The pipeline turns raw instrument CSVs into normalized ``HourlySeries`` and
finally into ``SampleWindow`` records: the lagged power vector, the weather
feature block, the solar elevation vector, and the target power vector that
together make one training or inference sample.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

import numpy as np

from .errors import AlignmentError, DataError, SchemaError
from .series import UNIT_WATT, UNIT_WATT_PER_KWP, HourlySeries
from .timeutil import HOUR, add_hours, from_epoch, hours_between, isoformat_z, parse_utc, to_epoch

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RawRecord:
    timestamp: datetime
    value: float
    valid: bool = True


def parse_csv(path, timestamp_column: str, value_column: str) -> list[RawRecord]:
    """Parse one input CSV into timestamp-sorted raw records.

    Rows whose value does not parse as a number become invalid records and
    are counted in a warning, never silently dropped. Duplicate timestamps
    are a data error.
    """
    path = Path(path)
    records: list[RawRecord] = []
    bad_rows = 0
    with path.open("r", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return []
        missing = {timestamp_column, value_column} - set(reader.fieldnames)
        if missing:
            raise SchemaError(f"{path}: missing column(s) {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            raw_ts = row[timestamp_column]
            try:
                ts = parse_utc(raw_ts)
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: bad timestamp {raw_ts!r}") from exc
            try:
                value = float(row[value_column])
            except (TypeError, ValueError):
                value = math.nan
            if math.isnan(value):
                bad_rows += 1
                records.append(RawRecord(ts, math.nan, valid=False))
            else:
                records.append(RawRecord(ts, value))
    records.sort(key=lambda r: r.timestamp)
    for a, b in zip(records, records[1:]):
        if a.timestamp == b.timestamp:
            raise DataError(f"{path}: duplicate timestamp {isoformat_z(a.timestamp)}")
    if bad_rows:
        logger.warning("%s: %d row(s) with unparseable values marked invalid", path, bad_rows)
    return records


def clean_power(records, peak_power_w: float, outlier_factor: float = 1.5) -> list[RawRecord]:
    """Clamp standby losses to zero and invalidate physically impossible values.

    Values in [-5% of peak, 0) are treated as standby losses and set to 0;
    values below that band or above ``outlier_factor * peak`` are marked
    invalid. Everything else passes through unchanged.
    """
    if peak_power_w <= 0:
        raise ValueError("peak_power_w must be positive")
    if outlier_factor <= 1:
        raise ValueError("outlier_factor must exceed 1")
    low = -0.05 * peak_power_w
    high = outlier_factor * peak_power_w
    out = []
    for r in records:
        if not r.valid:
            out.append(r)
        elif low <= r.value < 0:
            out.append(RawRecord(r.timestamp, 0.0))
        elif r.value < low or r.value > high:
            out.append(RawRecord(r.timestamp, r.value, valid=False))
        else:
            out.append(r)
    return out


def resample_hourly_mean(records, unit: str = UNIT_WATT) -> HourlySeries:
    """Aggregate sorted records to hourly resolution by period means.

    Hour H covers [H, H+1). Buckets holding no valid sample become invalid
    slots; the output spans every hour from the first to the last record.
    """
    if not records:
        raise DataError("cannot resample an empty record sequence")
    first_hour = to_epoch(records[0].timestamp) // HOUR
    last_hour = to_epoch(records[-1].timestamp) // HOUR
    n = last_hour - first_hour + 1
    sums = np.zeros(n)
    counts = np.zeros(n, dtype=int)
    for r in records:
        if not r.valid:
            continue
        i = to_epoch(r.timestamp) // HOUR - first_hour
        sums[i] += r.value
        counts[i] += 1
    valid = counts > 0
    values = np.full(n, np.nan)
    values[valid] = sums[valid] / counts[valid]
    return HourlySeries(start=from_epoch(first_hour * HOUR), values=values, valid=valid, unit=unit)


def normalize_by_peak(series: HourlySeries, peak_power_w: float) -> HourlySeries:
    """Divide a raw-watt power series by rated peak power.

    The result is a fraction of peak; multiply by 1000 for W/kWp display.
    """
    if peak_power_w <= 0:
        raise ValueError("peak_power_w must be positive")
    if series.unit != UNIT_WATT:
        raise ValueError(f"expected a raw watt series, got unit {series.unit!r}")
    values = series.values / peak_power_w
    return HourlySeries(series.start, values, series.valid.copy(), UNIT_WATT_PER_KWP)


@dataclass
class SampleWindow:
    """One model sample anchored at issue time t.

    ``lags`` holds normalized power for t-h+1 .. t, ``weather`` is an
    (n_features, f) block for t+1 .. t+f, ``elevation`` the solar elevation
    for the same leads, and ``target`` the normalized power for t+1 .. t+f
    (absent at pure inference). ``target_valid`` marks which leads carry a
    usable ground-truth value.
    """

    t: datetime
    lags: np.ndarray
    weather: np.ndarray
    elevation: np.ndarray
    target: np.ndarray | None = None
    target_valid: np.ndarray | None = None

    @property
    def h(self) -> int:
        return len(self.lags)

    @property
    def f(self) -> int:
        return len(self.elevation)

    def features(self) -> np.ndarray:
        """Flat input vector: lags, then each weather feature block, then elevation."""
        return np.concatenate([self.lags, self.weather.ravel(), self.elevation])

    def first_lag_time(self) -> datetime:
        return add_hours(self.t, -(self.h - 1))

    def last_target_time(self) -> datetime:
        return add_hours(self.t, self.f)


def input_dim(h: int, n_weather: int, f: int) -> int:
    return h + n_weather * f + f


def build_samples(
    power: HourlySeries,
    weather: list[HourlySeries],
    elevation: HourlySeries,
    h: int = 24,
    f: int = 24,
    issue_hour_utc: int = 6,
    require_targets: bool = True,
) -> list[SampleWindow]:
    """Cut aligned hourly series into issue-time windows.

    One window is produced per grid hour matching ``issue_hour_utc`` where
    all h lags and all weather and elevation leads are valid. With
    ``require_targets`` every target lead must be valid too (training
    semantics); otherwise per-lead target validity is recorded so forecast
    evaluation can mask missing truth.
    """
    if h < 1 or f < 1:
        raise ValueError("h and f must be at least 1")
    all_series = [power, *weather, elevation]
    for s in all_series[1:]:
        if s.start != power.start or len(s) != len(power):
            raise AlignmentError(
                "series are not aligned: "
                f"power starts {isoformat_z(power.start)} len {len(power)}, "
                f"other starts {isoformat_z(s.start)} len {len(s)}"
            )
    n = len(power)
    windows: list[SampleWindow] = []
    for i in range(h - 1, n - f):
        t = power.time_at(i)
        if t.hour != issue_hour_utc:
            continue
        lag_sl = slice(i - h + 1, i + 1)
        lead_sl = slice(i + 1, i + 1 + f)
        if not power.valid[lag_sl].all():
            continue
        if not all(w.valid[lead_sl].all() for w in weather):
            continue
        if not elevation.valid[lead_sl].all():
            continue
        tgt_valid = power.valid[lead_sl].copy()
        if require_targets and not tgt_valid.all():
            continue
        target = power.values[lead_sl].copy()
        target[~tgt_valid] = np.nan
        windows.append(
            SampleWindow(
                t=t,
                lags=power.values[lag_sl].copy(),
                weather=np.stack([w.values[lead_sl] for w in weather]) if weather else np.empty((0, f)),
                elevation=elevation.values[lead_sl].copy(),
                target=target,
                target_valid=tgt_valid,
            )
        )
    return windows


def split_by_date(samples, boundary: datetime):
    """Split windows into (train, test) at a boundary instant.

    A window trains only if its last target hour ends before the boundary
    and tests only if its first lag hour starts at or after it; windows
    straddling the boundary are discarded so no timestamp leaks across.
    """
    train, test = [], []
    for s in samples:
        if hours_between(s.last_target_time(), boundary) > 0:
            train.append(s)
        elif hours_between(boundary, s.first_lag_time()) >= 0:
            test.append(s)
    return train, test


def seasonal_valid_fraction(series: HourlySeries) -> dict[str, float]:
    """Valid-data fraction per meteorological season (DJF/MAM/JJA/SON)."""
    season_of = {12: "DJF", 1: "DJF", 2: "DJF", 3: "MAM", 4: "MAM", 5: "MAM",
                 6: "JJA", 7: "JJA", 8: "JJA", 9: "SON", 10: "SON", 11: "SON"}
    counts = {"DJF": 0, "MAM": 0, "JJA": 0, "SON": 0}
    hits = dict(counts)
    for i in range(len(series)):
        season = season_of[series.time_at(i).month]
        counts[season] += 1
        if series.valid[i]:
            hits[season] += 1
    return {s: (hits[s] / counts[s] if counts[s] else 0.0) for s in counts}
