"""Hourly time series carrier and site metadata.

``HourlySeries`` is the universal container for power, irradiance,
temperature, and solar elevation: a start hour, a float array, and a
validity mask. Hour ``i`` covers the half-open interval
``[start + i h, start + (i+1) h)``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

import numpy as np

from .errors import AlignmentError, DataError
from .timeutil import add_hours, hours_between, is_hour_aligned, isoformat_z, parse_utc

UNIT_WATT = "watt"
UNIT_WATT_PER_KWP = "watt_per_kwp"
UNIT_WATT_PER_M2 = "watt_per_m2"
UNIT_CELSIUS = "celsius"
UNIT_DEGREES = "degrees"

KNOWN_UNITS = (UNIT_WATT, UNIT_WATT_PER_KWP, UNIT_WATT_PER_M2, UNIT_CELSIUS, UNIT_DEGREES)


@dataclass
class HourlySeries:
    start: datetime
    values: np.ndarray
    valid: np.ndarray
    unit: str

    def __post_init__(self):
        if not is_hour_aligned(self.start):
            raise ValueError(f"series start {self.start} is not hour aligned")
        if self.unit not in KNOWN_UNITS:
            raise ValueError(f"unknown unit {self.unit!r}")
        self.values = np.asarray(self.values, dtype=np.float64)
        self.valid = np.asarray(self.valid, dtype=bool)
        if self.values.shape != self.valid.shape or self.values.ndim != 1:
            raise ValueError("values and valid must be 1-d arrays of equal length")
        if self.unit == UNIT_WATT_PER_KWP and np.any(self.values[self.valid] < 0):
            raise ValueError("normalized power must be non-negative; clean the series first")

    def __len__(self) -> int:
        return len(self.values)

    def time_at(self, i: int) -> datetime:
        return add_hours(self.start, i)

    def index_of(self, t: datetime) -> int:
        """Index of hour ``t``; raises if off the grid or out of range."""
        if not is_hour_aligned(t):
            raise ValueError(f"{t} is not on the hourly grid")
        i = hours_between(self.start, t)
        if not 0 <= i < len(self):
            raise IndexError(f"{t} outside series range")
        return i

    def valid_fraction(self) -> float:
        return float(self.valid.mean()) if len(self) else 0.0

    def crop(self, start_idx: int, stop_idx: int) -> "HourlySeries":
        return HourlySeries(
            start=add_hours(self.start, start_idx),
            values=self.values[start_idx:stop_idx].copy(),
            valid=self.valid[start_idx:stop_idx].copy(),
            unit=self.unit,
        )


@dataclass(frozen=True)
class SiteMeta:
    """PV site description: coordinates, rated peak power, local offset."""

    latitude: float
    longitude: float
    peak_power_w: float
    local_utc_offset_hours: int = 0

    def __post_init__(self):
        if not -90.0 <= self.latitude <= 90.0:
            raise ValueError(f"latitude {self.latitude} outside [-90, 90]")
        if not -180.0 <= self.longitude <= 180.0:
            raise ValueError(f"longitude {self.longitude} outside [-180, 180]")
        if not self.peak_power_w > 0:
            raise ValueError("peak_power_w must be strictly positive")


def align_series(*series: HourlySeries) -> list[HourlySeries]:
    """Crop series to their common hourly range.

    All inputs must lie on the same hourly grid (hour-aligned starts). Raises
    ``AlignmentError`` when the overlap is empty.
    """
    ends = [add_hours(s.start, len(s)) for s in series]
    start = max(s.start for s in series)
    end = min(ends)
    if hours_between(start, end) <= 0:
        raise AlignmentError("series have no overlapping hours")
    out = []
    for s in series:
        a = hours_between(s.start, start)
        out.append(s.crop(a, a + hours_between(start, end)))
    return out


def write_canonical_csv(series: HourlySeries, path) -> None:
    """Write the canonical (timestamp, value, valid) CSV, bit-exact reloadable.

    Valid values are rendered with ``repr`` so ``float`` round-trips exactly;
    invalid slots have an empty value field.
    """
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(f"# unit={series.unit}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["timestamp", "value", "valid"])
        for i in range(len(series)):
            ok = bool(series.valid[i])
            value = repr(float(series.values[i])) if ok else ""
            writer.writerow([isoformat_z(series.time_at(i)), value, "1" if ok else "0"])


def read_canonical_csv(path) -> HourlySeries:
    path = Path(path)
    with path.open("r", newline="") as fh:
        first = fh.readline()
        unit = UNIT_WATT
        if first.startswith("#"):
            key, _, val = first[1:].strip().partition("=")
            if key.strip() == "unit":
                unit = val.strip()
            header = fh.readline()
        else:
            header = first
        if header.strip() != "timestamp,value,valid":
            raise DataError(f"{path}: not a canonical hourly CSV")
        times, values, valid = [], [], []
        for row in csv.reader(fh):
            if not row:
                continue
            times.append(parse_utc(row[0]))
            ok = row[2] == "1"
            values.append(float(row[1]) if ok else np.nan)
            valid.append(ok)
    if not times:
        raise DataError(f"{path}: empty canonical CSV")
    for i in range(1, len(times)):
        if hours_between(times[i - 1], times[i]) != 1:
            raise DataError(f"{path}: non-hourly step at {isoformat_z(times[i])}")
    return HourlySeries(start=times[0], values=np.array(values), valid=np.array(valid), unit=unit)
