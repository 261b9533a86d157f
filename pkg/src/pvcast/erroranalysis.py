"""Lead-wise forecast-error decomposition, metrics, and autocorrelation.

Errors are signed prediction minus truth, so positive numbers mean
overprediction. MBE and MAE are double means: first over the valid leads of
a run, then over runs. Lead-wise pooling keeps runs aligned so temporal
correlation between leads can be measured across runs.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from datetime import datetime
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .distfit import (
    FittedDistribution,
    MomentSummary,
    cvm_test,
    fit_generalized_hyperbolic,
    fit_normal,
    fit_student_t,
    ks_test,
    moments,
)
from .errors import DegenerateDataError, FitError
from .features import pearson

logger = logging.getLogger(__name__)

MIN_PAIRS_PER_DISTANCE = 30
DEFAULT_DIURNAL_LEADS = (6, 20)
MIN_FIT_SAMPLES = 16


@dataclass
class ForecastRun:
    """One forecast initialization: f predicted leads and their ground truth."""

    issue_time: datetime
    predicted: np.ndarray
    truth: np.ndarray
    valid: np.ndarray

    def __post_init__(self):
        self.predicted = np.asarray(self.predicted, dtype=np.float64)
        self.truth = np.asarray(self.truth, dtype=np.float64)
        self.valid = np.asarray(self.valid, dtype=bool)
        if not (len(self.predicted) == len(self.truth) == len(self.valid)):
            raise ValueError("predicted, truth and valid must share one length")

    @property
    def f(self) -> int:
        return len(self.predicted)

    def errors(self) -> np.ndarray:
        e = self.predicted - self.truth
        e[~self.valid] = np.nan
        return e


def _per_run_means(runs: Sequence[ForecastRun], absolute: bool) -> list[float]:
    out = []
    for run in runs:
        if not run.valid.any():
            continue
        e = (run.predicted - run.truth)[run.valid]
        out.append(float(np.mean(np.abs(e) if absolute else e)))
    if not out:
        raise DegenerateDataError("no run has a valid lead")
    return out


def mbe(runs: Sequence[ForecastRun]) -> float:
    """Mean bias error: positive means overprediction."""
    return float(np.mean(_per_run_means(runs, absolute=False)))


def mae(runs: Sequence[ForecastRun]) -> float:
    return float(np.mean(_per_run_means(runs, absolute=True)))


@dataclass
class LeadErrorSamples:
    """Run-aligned error matrix (n_runs, f) with a validity mask.

    Lead indices are 1-based to match forecast-step numbering.
    """

    errors: np.ndarray
    valid: np.ndarray

    @property
    def n_runs(self) -> int:
        return self.errors.shape[0]

    @property
    def f(self) -> int:
        return self.errors.shape[1]

    def for_lead(self, lead: int) -> np.ndarray:
        """Finite error sample for one 1-based lead."""
        if not 1 <= lead <= self.f:
            raise IndexError(f"lead {lead} outside 1..{self.f}")
        col = self.errors[:, lead - 1]
        return col[self.valid[:, lead - 1]]


def lead_errors(runs: Sequence[ForecastRun]) -> LeadErrorSamples:
    """Pool errors by lead across runs; seasonality is deliberately not
    stratified, all runs at the issue hour contribute to one distribution
    per lead."""
    if not runs:
        raise DegenerateDataError("lead_errors needs at least one run")
    f = runs[0].f
    if any(r.f != f for r in runs):
        raise ValueError("all runs must share the same number of leads")
    errors = np.stack([r.predicted - r.truth for r in runs])
    valid = np.stack([r.valid for r in runs])
    errors[~valid] = np.nan
    return LeadErrorSamples(errors=errors, valid=valid)


@dataclass
class LeadReport:
    lead: int
    n: int
    moments: Optional[MomentSummary]
    fits: dict[str, FittedDistribution] = field(default_factory=dict)
    degenerate: bool = False


def lead_report(
    samples: LeadErrorSamples,
    diurnal_leads: tuple[int, int] = DEFAULT_DIURNAL_LEADS,
    min_fit_samples: int = MIN_FIT_SAMPLES,
) -> list[LeadReport]:
    """Per-lead moments plus fitted distributions with goodness-of-fit.

    Distribution fitting runs on the configured diurnal lead range when the
    lead has at least ``min_fit_samples`` points; other leads report moments
    only. Fit failures are recorded per lead, not raised.
    """
    reports = []
    lo, hi = diurnal_leads
    for lead in range(1, samples.f + 1):
        x = samples.for_lead(lead)
        n = len(x)
        if n < 4:
            reports.append(LeadReport(lead, n, None, degenerate=True))
            continue
        summary = moments(x)
        report = LeadReport(lead, n, summary, degenerate=summary.degenerate)
        if summary.degenerate or not (lo <= lead <= hi) or n < min_fit_samples:
            reports.append(report)
            continue
        for name, fitter in (
            ("normal", fit_normal),
            ("student_t", fit_student_t),
            ("generalized_hyperbolic", fit_generalized_hyperbolic),
        ):
            try:
                fitted = fitter(x)
            except (FitError, DegenerateDataError) as exc:
                logger.warning("lead %d: %s fit failed: %s", lead, name, exc)
                fitted = FittedDistribution(name, None, -math.inf, False, n, message=str(exc))
            if fitted.converged and fitted.dist is not None:
                fitted.ks = ks_test(x, fitted.dist)
                fitted.cvm = cvm_test(x, fitted.dist)
            report.fits[name] = fitted
        reports.append(report)
    return reports


class DistanceCorrelation(NamedTuple):
    distance: int
    r: float
    n_pairs: int


class LeadPairCorrelation(NamedTuple):
    lead_a: int
    lead_b: int
    r: float
    n_pairs: int


def pairwise_lead_correlation(
    samples: LeadErrorSamples,
    max_distance: int,
    min_pairs: int = MIN_PAIRS_PER_DISTANCE,
) -> list[LeadPairCorrelation]:
    """Per lead-pair (k, k+d) correlations, the breakdown behind the pooled
    curve; pairs with too few joint runs are omitted."""
    rows: list[LeadPairCorrelation] = []
    for d in range(1, max_distance + 1):
        for k in range(1, samples.f - d + 1):
            a = samples.errors[:, k - 1]
            b = samples.errors[:, k - 1 + d]
            joint = samples.valid[:, k - 1] & samples.valid[:, k - 1 + d]
            n = int(joint.sum())
            if n < min_pairs:
                continue
            try:
                r = pearson(a[joint], b[joint])
            except DegenerateDataError:
                continue
            rows.append(LeadPairCorrelation(k, k + d, r, n))
    return rows


def temporal_autocorrelation(
    samples: LeadErrorSamples,
    max_distance: int,
    min_pairs: int = MIN_PAIRS_PER_DISTANCE,
) -> tuple[list[DistanceCorrelation], list[int]]:
    """Error correlation between leads k and k+d, pooled over all lead pairs.

    For each distance d the (run, lead) pairs with both members valid are
    pooled into one Pearson coefficient. Distances with fewer than
    ``min_pairs`` joint pairs are omitted and returned in the second list.
    """
    if samples.f < 2:
        raise DegenerateDataError("need at least 2 leads for autocorrelation")
    results: list[DistanceCorrelation] = []
    skipped: list[int] = []
    for d in range(1, max_distance + 1):
        if d >= samples.f:
            skipped.append(d)
            continue
        a = samples.errors[:, :-d].ravel()
        b = samples.errors[:, d:].ravel()
        joint = samples.valid[:, :-d].ravel() & samples.valid[:, d:].ravel()
        n = int(joint.sum())
        if n < min_pairs:
            skipped.append(d)
            continue
        try:
            r = pearson(a[joint], b[joint])
        except DegenerateDataError:
            skipped.append(d)
            continue
        results.append(DistanceCorrelation(d, r, n))
    if skipped:
        logger.warning("autocorrelation: omitted distances with too few pairs: %s", skipped)
    return results, skipped


@dataclass
class ColumnMetrics:
    label: str
    unit: str
    mbe: float
    mae: float
    n_runs: int


@dataclass
class DecompositionReport:
    plant: Optional[ColumnMetrics]
    weather: dict[str, ColumnMetrics]
    combined: Optional[ColumnMetrics]
    mae_inflation_pct: Optional[float]


def decomposition_report(
    plant_runs: Optional[Sequence[ForecastRun]],
    weather_runs: Optional[dict[str, tuple[str, Sequence[ForecastRun]]]],
    combined_runs: Optional[Sequence[ForecastRun]],
    power_unit: str = "W/kWp",
) -> DecompositionReport:
    """MBE/MAE per decomposition column plus the combined-vs-plant MAE
    inflation percentage; absent columns stay ``None``."""

    def column(label, unit, runs):
        return ColumnMetrics(label, unit, mbe(runs), mae(runs), len(runs))

    plant = column("plant", power_unit, plant_runs) if plant_runs else None
    weather = {
        name: column(name, unit, runs)
        for name, (unit, runs) in (weather_runs or {}).items()
    }
    combined = column("combined", power_unit, combined_runs) if combined_runs else None
    inflation = None
    if plant is not None and combined is not None and plant.mae > 0:
        inflation = 100.0 * (combined.mae - plant.mae) / plant.mae
    return DecompositionReport(plant, weather, combined, inflation)
