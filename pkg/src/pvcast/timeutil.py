"""UTC timestamp helpers for the hourly grid.

All timestamps in the toolkit are timezone-aware UTC datetimes; internally
hourly bookkeeping is done on integer epoch seconds so index arithmetic is
exact.
"""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

HOUR = 3600


def parse_utc(text: str) -> datetime:
    """Parse an ISO-8601 timestamp into an aware UTC datetime.

    Accepts a trailing 'Z', an explicit offset, or a naive timestamp
    (interpreted as UTC).
    """
    raw = text.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    dt = datetime.fromisoformat(raw)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def to_epoch(t: datetime) -> int:
    return int(t.timestamp())


def from_epoch(seconds: int) -> datetime:
    return datetime.fromtimestamp(seconds, tz=timezone.utc)


def floor_hour(t: datetime) -> datetime:
    return from_epoch((to_epoch(t) // HOUR) * HOUR)


def is_hour_aligned(t: datetime) -> bool:
    return to_epoch(t) % HOUR == 0


def hours_between(start: datetime, t: datetime) -> int:
    """Signed whole-hour offset of ``t`` from ``start``; both hour-aligned."""
    return (to_epoch(t) - to_epoch(start)) // HOUR


def add_hours(t: datetime, n: int) -> datetime:
    return t + timedelta(hours=n)


def isoformat_z(t: datetime) -> str:
    """Canonical second-precision UTC rendering, e.g. 2022-01-01T06:00:00Z."""
    return t.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
