from datetime import datetime, timedelta, timezone

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_mae, brute_mbe
from pvcast.erroranalysis import (
    ForecastRun,
    decomposition_report,
    lead_errors,
    lead_report,
    mae,
    mbe,
    temporal_autocorrelation,
)
from pvcast.errors import DegenerateDataError

T0 = datetime(2022, 1, 1, 6, tzinfo=timezone.utc)


def make_runs(pred, truth, valid=None):
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if valid is None:
        valid = np.ones_like(pred, dtype=bool)
    return [
        ForecastRun(T0 + timedelta(days=i), pred[i], truth[i], np.asarray(valid)[i])
        for i in range(len(pred))
    ]


# ---------------------------------------------------------------------------
# mbe / mae


def test_exact_forecast_zero_error():
    runs = make_runs([[1.0, 2.0]], [[1.0, 2.0]])
    assert mbe(runs) == 0.0 and mae(runs) == 0.0


def test_constant_offset():
    runs = make_runs([[6.0, 7.0, 8.0]], [[1.0, 2.0, 3.0]])
    assert mbe(runs) == pytest.approx(5.0)
    assert mae(runs) == pytest.approx(5.0)


def test_cancelling_errors_mbe_zero_mae_five():
    runs = make_runs([[5.0, -5.0]], [[0.0, 0.0]])
    assert mbe(runs) == pytest.approx(0.0)
    assert mae(runs) == pytest.approx(5.0)


def test_toy_table_matches_brute_force(rng):
    pred = rng.normal(size=(2, 3))
    truth = rng.normal(size=(2, 3))
    runs = make_runs(pred, truth)
    assert mbe(runs) == pytest.approx(brute_mbe(runs), abs=1e-12)
    assert mae(runs) == pytest.approx(brute_mae(runs), abs=1e-12)


def test_double_mean_respects_validity(rng):
    pred = rng.normal(size=(4, 6))
    truth = rng.normal(size=(4, 6))
    valid = rng.random((4, 6)) > 0.3
    valid[0] = True  # keep at least one fully valid run
    runs = make_runs(pred, truth, valid)
    assert mbe(runs) == pytest.approx(brute_mbe(runs), abs=1e-12)
    assert mae(runs) == pytest.approx(brute_mae(runs), abs=1e-12)


def test_no_valid_data_rejected():
    runs = make_runs([[1.0]], [[2.0]], [[False]])
    with pytest.raises(DegenerateDataError):
        mbe(runs)


@settings(max_examples=60)
@given(st.integers(1, 6), st.integers(1, 8), st.integers(0, 10_000))
def test_mbe_never_exceeds_mae_and_permutation_invariant(n_runs, f, seed):
    rng = np.random.default_rng(seed)
    pred = rng.normal(size=(n_runs, f))
    truth = rng.normal(size=(n_runs, f))
    runs = make_runs(pred, truth)
    assert abs(mbe(runs)) <= mae(runs) + 1e-12
    perm = [runs[i] for i in rng.permutation(n_runs)]
    assert mbe(perm) == pytest.approx(mbe(runs), abs=1e-12)
    assert mae(perm) == pytest.approx(mae(runs), abs=1e-12)


# ---------------------------------------------------------------------------
# lead_errors


def test_single_run_gives_length_one_samples():
    runs = make_runs([[1.0, 2.0, 3.0]], [[0.0, 0.0, 0.0]])
    samples = lead_errors(runs)
    for lead in (1, 2, 3):
        assert len(samples.for_lead(lead)) == 1
    assert list(samples.for_lead(2)) == [2.0]


def test_invalid_lead_shortens_its_array():
    valid = np.ones((3, 4), dtype=bool)
    valid[1, 2] = False
    runs = make_runs(np.zeros((3, 4)), np.zeros((3, 4)), valid)
    samples = lead_errors(runs)
    assert len(samples.for_lead(3)) == 2
    assert len(samples.for_lead(1)) == 3


def test_pooled_lead_means_equal_column_means(rng):
    pred = rng.normal(size=(10, 5))
    truth = rng.normal(size=(10, 5))
    samples = lead_errors(make_runs(pred, truth))
    col_means = (pred - truth).mean(axis=0)
    for lead in range(1, 6):
        assert samples.for_lead(lead).mean() == pytest.approx(col_means[lead - 1], abs=1e-12)


def test_lead_mean_of_means_equals_mbe_when_all_valid(rng):
    pred = rng.normal(size=(7, 4))
    truth = rng.normal(size=(7, 4))
    runs = make_runs(pred, truth)
    samples = lead_errors(runs)
    per_lead = [samples.for_lead(k).mean() for k in range(1, 5)]
    assert np.mean(per_lead) == pytest.approx(mbe(runs), abs=1e-12)


# ---------------------------------------------------------------------------
# lead_report


def test_lead_report_degenerate_lead_skips_fits():
    runs = make_runs(np.zeros((20, 3)), np.zeros((20, 3)))
    reports = lead_report(lead_errors(runs), diurnal_leads=(1, 3))
    assert all(r.degenerate and not r.fits for r in reports)


def test_lead_report_fits_only_diurnal_range(rng):
    pred = rng.normal(size=(30, 6))
    runs = make_runs(pred, np.zeros_like(pred))
    reports = lead_report(lead_errors(runs), diurnal_leads=(2, 4))
    fitted = {r.lead for r in reports if r.fits}
    assert fitted == {2, 3, 4}
    fits = reports[1].fits
    assert set(fits) == {"normal", "student_t", "generalized_hyperbolic"}
    for fd in fits.values():
        if fd.converged:
            assert fd.ks is not None and fd.cvm is not None


def test_lead_report_small_n_moments_only(rng):
    pred = rng.normal(size=(10, 2))
    runs = make_runs(pred, np.zeros_like(pred))
    reports = lead_report(lead_errors(runs), diurnal_leads=(1, 2), min_fit_samples=16)
    assert all(not r.fits and r.moments is not None for r in reports)


def test_lead_report_normal_errors_pass_all_families(rng):
    accept = 0
    trials = 10
    for trial in range(trials):
        trial_rng = np.random.default_rng(100 + trial)
        pred = trial_rng.normal(size=(120, 1))
        runs = make_runs(pred, np.zeros_like(pred))
        reports = lead_report(lead_errors(runs), diurnal_leads=(1, 1))
        fits = reports[0].fits
        if all(f.converged and f.ks.p > 0.05 for f in fits.values()):
            accept += 1
    assert accept >= 9


def test_lead_report_skewed_errors_reject_normal_accept_gh(rng):
    hits = 0
    trials = 10
    for trial in range(trials):
        trial_rng = np.random.default_rng(200 + trial)
        errors = np.exp(trial_rng.normal(size=(220, 1))) - np.exp(0.5)
        runs = make_runs(errors, np.zeros_like(errors))
        reports = lead_report(lead_errors(runs), diurnal_leads=(1, 1))
        fits = reports[0].fits
        normal_rejected = fits["normal"].ks.p < 0.05
        gh = fits["generalized_hyperbolic"]
        gh_accepted = gh.converged and gh.ks.p > 0.05
        hits += normal_rejected and gh_accepted
    assert hits >= 8


# ---------------------------------------------------------------------------
# temporal autocorrelation


def test_identical_errors_across_leads_fully_correlated(rng):
    base = rng.normal(size=50)
    errors = np.tile(base[:, None], (1, 6))
    runs = make_runs(errors, np.zeros_like(errors))
    corr, _ = temporal_autocorrelation(lead_errors(runs), 4)
    assert all(c.r == pytest.approx(1.0) for c in corr)


def test_independent_noise_uncorrelated(rng):
    errors = rng.normal(size=(10_000, 4))
    runs = make_runs(errors, np.zeros_like(errors))
    corr, _ = temporal_autocorrelation(lead_errors(runs), 3)
    assert all(abs(c.r) < 0.05 for c in corr)


def ar1_errors(rng, n_runs, f, rho):
    out = np.empty((n_runs, f))
    out[:, 0] = rng.normal(size=n_runs)
    for k in range(1, f):
        out[:, k] = rho * out[:, k - 1] + np.sqrt(1 - rho**2) * rng.normal(size=n_runs)
    return out


def test_ar1_structure_recovered(rng):
    errors = ar1_errors(rng, 4000, 8, rho=0.6)
    runs = make_runs(errors, np.zeros_like(errors))
    corr, _ = temporal_autocorrelation(lead_errors(runs), 4)
    by_d = {c.distance: c.r for c in corr}
    assert 0.55 <= by_d[1] <= 0.65
    assert by_d[1] > by_d[2] > by_d[4]
    assert by_d[2] == pytest.approx(0.36, abs=0.05)  # rho^2


def test_insufficient_pairs_distance_omitted(rng):
    errors = rng.normal(size=(5, 4))
    runs = make_runs(errors, np.zeros_like(errors))
    corr, skipped = temporal_autocorrelation(lead_errors(runs), 3, min_pairs=30)
    assert corr == [] and skipped == [1, 2, 3]


# ---------------------------------------------------------------------------
# decomposition report


def test_identical_runs_zero_inflation(rng):
    pred = rng.normal(size=(5, 3)) + 2.0
    truth = rng.normal(size=(5, 3))
    plant = make_runs(pred, truth)
    combined = make_runs(pred, truth)
    report = decomposition_report(plant, None, combined)
    assert report.mae_inflation_pct == pytest.approx(0.0, abs=1e-12)


def _runs_with_mae(target_mae):
    # One run, constant positive error equal to the MAE.
    return make_runs([[target_mae, target_mae]], [[0.0, 0.0]])


def test_inflation_eleven_percent_case():
    report = decomposition_report(_runs_with_mae(28.04), None, _runs_with_mae(31.16))
    assert report.mae_inflation_pct == pytest.approx(11.1, abs=0.05)


def test_inflation_sixty_eight_percent_case():
    report = decomposition_report(_runs_with_mae(28.12), None, _runs_with_mae(47.28))
    assert report.mae_inflation_pct == pytest.approx(68.1, abs=0.05)


def test_absent_columns_stay_none():
    report = decomposition_report(_runs_with_mae(1.0), None, None)
    assert report.combined is None and report.mae_inflation_pct is None
    assert report.plant.mae == pytest.approx(1.0)


def test_weather_columns_carry_units():
    weather = {"ghi": ("W/m2", _runs_with_mae(30.72))}
    report = decomposition_report(None, weather, None)
    assert report.weather["ghi"].unit == "W/m2"
    assert report.weather["ghi"].mae == pytest.approx(30.72)
