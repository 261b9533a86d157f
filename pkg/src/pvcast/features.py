"""Correlation analysis for input-feature selection.

Feature choice itself is a reported analysis outcome, not an automated
decision: this module computes the Pearson/Spearman table and the power
autocorrelation by lag, and the pipeline configuration declares which
features feed the model.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Mapping, NamedTuple, Optional, Sequence

import numpy as np

from .errors import DegenerateDataError
from .ingest import SampleWindow
from .series import HourlySeries

logger = logging.getLogger(__name__)

MIN_LAG_PAIRS = 30


def pearson(x, y) -> float:
    """Sample Pearson product-moment correlation."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("inputs must be 1-d arrays of equal length")
    if len(x) < 2:
        raise DegenerateDataError("need at least 2 points for a correlation")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = float(np.sqrt((dx * dx).sum()))
    sy = float(np.sqrt((dy * dy).sum()))
    if sx == 0.0 or sy == 0.0:
        raise DegenerateDataError("correlation undefined for constant input")
    r = float((dx * dy).sum() / (sx * sy))
    # rounding can push exact (anti-)affine relations a few ulps past 1
    return max(-1.0, min(1.0, r))


def midranks(x) -> np.ndarray:
    """Ranks 1..n with ties replaced by the mean rank of the tied group."""
    x = np.asarray(x, dtype=np.float64)
    order = np.argsort(x, kind="stable")
    ranks = np.empty(len(x))
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and x[order[j + 1]] == x[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(x, y) -> float:
    """Spearman rank correlation: Pearson on midranks."""
    return pearson(midranks(x), midranks(y))


class LagCorrelation(NamedTuple):
    lag: int
    r: float
    n: int


def lag_autocorrelation(
    power: HourlySeries, max_lag: int, min_pairs: int = MIN_LAG_PAIRS
) -> tuple[list[LagCorrelation], list[int]]:
    """Pearson autocorrelation of the power series for lags 1..max_lag.

    Pairs with either member invalid are dropped. Lags with fewer than
    ``min_pairs`` joint pairs are omitted; their lag numbers are returned in
    the second element and logged.
    """
    values, valid = power.values, power.valid
    results: list[LagCorrelation] = []
    skipped: list[int] = []
    for lag in range(1, max_lag + 1):
        if lag >= len(values):
            skipped.append(lag)
            continue
        joint = valid[lag:] & valid[:-lag]
        n = int(joint.sum())
        if n < min_pairs:
            skipped.append(lag)
            continue
        try:
            r = pearson(values[lag:][joint], values[:-lag][joint])
        except DegenerateDataError:
            skipped.append(lag)
            continue
        results.append(LagCorrelation(lag, r, n))
    if skipped:
        logger.warning("autocorrelation: omitted lags with too few pairs: %s", skipped)
    return results, skipped


@dataclass(frozen=True)
class CorrelationReport:
    feature_name: str
    pearson: Optional[float]
    spearman: Optional[float]
    sample_count: int

    @property
    def defined(self) -> bool:
        return self.pearson is not None


Extractor = Callable[[SampleWindow], np.ndarray]


def weather_extractor(index: int = 0) -> Extractor:
    """Per-lead values of the index-th weather feature block."""
    return lambda s: s.weather[index]


def elevation_extractor(s: SampleWindow) -> np.ndarray:
    return s.elevation


def power_lag1_extractor(s: SampleWindow) -> np.ndarray:
    """Power one hour before each target lead: the last lag, then targets shifted."""
    return np.concatenate([s.lags[-1:], s.target[:-1]])


def power_lag24_extractor(s: SampleWindow) -> np.ndarray:
    """Power 24 hours before each target lead; with h = f = 24 this is the lag vector."""
    if s.h < 24:
        raise ValueError("need at least 24 lags for the one-day feature")
    full = np.concatenate([s.lags[s.h - 24 :], s.target])
    return full[: s.f]


def feature_report(
    samples: Sequence[SampleWindow], extractors: Mapping[str, Extractor]
) -> list[CorrelationReport]:
    """Correlate each feature with same-hour target power, pooled over leads.

    Computed on all hours, nocturnal included. A constant feature yields an
    undefined-correlation marker row rather than an error.
    """
    if not samples:
        raise DegenerateDataError("feature_report needs at least one sample")
    targets = np.concatenate([s.target for s in samples])
    reports = []
    for name, extract in extractors.items():
        feats = np.concatenate([np.asarray(extract(s), dtype=np.float64) for s in samples])
        if feats.shape != targets.shape:
            raise ValueError(f"extractor {name!r} returned a wrong-length vector")
        keep = ~(np.isnan(feats) | np.isnan(targets))
        n = int(keep.sum())
        try:
            p = pearson(feats[keep], targets[keep])
            s = spearman(feats[keep], targets[keep])
        except DegenerateDataError:
            reports.append(CorrelationReport(name, None, None, n))
            continue
        reports.append(CorrelationReport(name, p, s, n))
    return reports
