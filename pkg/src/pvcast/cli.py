"""Command-line pipeline: synth, ingest, features, train, forecast, eval,
report.

Every command works under a single output directory (--out), writes its
artifacts there, and updates a manifest of content digests. A lock file
guards against concurrent commands on the same directory. All commands are
deterministic given (config, seed).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import os
import sys
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import __version__
from .config import PipelineConfig, load_config, resolve_input
from .erroranalysis import (
    ForecastRun,
    decomposition_report,
    lead_errors,
    lead_report,
    mae,
    mbe,
    pairwise_lead_correlation,
    temporal_autocorrelation,
)
from .errors import (
    AlignmentError,
    ConfigError,
    DataError,
    DegenerateDataError,
    FitError,
    SchemaError,
    TrainingError,
)
from .features import (
    elevation_extractor,
    feature_report,
    lag_autocorrelation,
    power_lag1_extractor,
    power_lag24_extractor,
    weather_extractor,
)
from .ingest import (
    build_samples,
    clean_power,
    normalize_by_peak,
    parse_csv,
    resample_hourly_mean,
    seasonal_valid_fraction,
    split_by_date,
)
from .distfit import qq_points
from .plantmodel import MlpEnsembleRegressor, default_grid, grid_search, load_ensemble, save_ensemble
from .series import (
    UNIT_CELSIUS,
    UNIT_WATT_PER_M2,
    HourlySeries,
    align_series,
    read_canonical_csv,
    write_canonical_csv,
)
from .solarpos import elevation_series
from .timeutil import add_hours, hours_between, isoformat_z, parse_utc

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_MODEL = 4

LOCK_NAME = ".lock"
MANIFEST_NAME = "manifest.json"


# ---------------------------------------------------------------------------
# Output directory bookkeeping


@contextmanager
def output_lock(out_dir: Path):
    out_dir.mkdir(parents=True, exist_ok=True)
    lock = out_dir / LOCK_NAME
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise DataError(f"output directory is locked by another command: {lock}")
    try:
        os.close(fd)
        yield
    finally:
        lock.unlink(missing_ok=True)


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def update_manifest(out_dir: Path, new_paths: list[Path]) -> None:
    manifest_path = out_dir / MANIFEST_NAME
    artifacts = {}
    if manifest_path.exists():
        artifacts = json.loads(manifest_path.read_text()).get("artifacts", {})
    for p in new_paths:
        artifacts[str(p.relative_to(out_dir))] = _sha256(p)
    payload = {"format": 1, "artifacts": dict(sorted(artifacts.items()))}
    manifest_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_rows_csv(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(value) -> str:
    return repr(float(value))


# ---------------------------------------------------------------------------
# Commands


def cmd_synth(config: PipelineConfig, args) -> list[Path]:
    from .synth import generate, write_scenario_csvs

    data = generate(config.synth, seed=args.seed if args.seed is not None else config.seed)
    paths = write_scenario_csvs(data, config.synth, args.out)
    site = config.synth.site()
    runnable = {
        "site": {
            "latitude": site.latitude,
            "longitude": site.longitude,
            "peak_power_w": site.peak_power_w,
            "utc_offset": site.local_utc_offset_hours,
        },
        "paths": {
            "power_csv": "power.csv",
            "weather_obs_csv": "weather_obs.csv",
            "weather_fc_csv": "weather_fc.csv",
        },
        "ingest": {"outlier_factor": config.ingest.outlier_factor,
                   "issue_hour_utc": config.ingest.issue_hour_utc},
        "model": {
            "h": config.model.h,
            "f": config.model.f,
            "hidden": list(config.model.hidden),
            "members": config.model.members,
            "epochs": config.model.epochs,
            "batch_size": config.model.batch_size,
            "learning_rate": config.model.learning_rate,
            "validation_fraction": config.model.validation_fraction,
            "patience": config.model.patience,
            "k_folds": config.model.k_folds,
            "night_filter": config.model.night_filter,
        },
        "eval": {
            "train_test_boundary": config.eval.train_test_boundary,
            "diurnal_leads": list(config.eval.diurnal_leads),
            "max_autocorr_distance": config.eval.max_autocorr_distance,
            "min_fit_samples": config.eval.min_fit_samples,
        },
        "seed": args.seed if args.seed is not None else config.seed,
    }
    config_path = args.out / "config.json"
    config_path.write_text(json.dumps(runnable, indent=2, sort_keys=True) + "\n")
    print(f"synth: wrote {len(paths)} input CSVs and config.json under {args.out}")
    return [*paths.values(), config_path]


def _canonical_dir(out: Path) -> Path:
    return out / "canonical"


def cmd_ingest(config: PipelineConfig, args) -> list[Path]:
    cfg_dir = args.config_dir
    cols = config.columns
    site = config.site

    power_path = resolve_input(config.paths.power_csv, cfg_dir)
    obs_path = resolve_input(config.paths.weather_obs_csv, cfg_dir)
    fc_path = resolve_input(config.paths.weather_fc_csv, cfg_dir)
    for p in (power_path, obs_path, fc_path):
        if not p.exists():
            raise ConfigError(f"input file not found: {p}")

    records = parse_csv(power_path, cols.timestamp, cols.power)
    records = clean_power(records, site.peak_power_w, config.ingest.outlier_factor)
    power = normalize_by_peak(resample_hourly_mean(records), site.peak_power_w)

    def weather_series(path, column, unit):
        series = resample_hourly_mean(parse_csv(path, cols.timestamp, column), unit)
        return series

    obs_ghi = weather_series(obs_path, cols.ghi, UNIT_WATT_PER_M2)
    obs_temp = weather_series(obs_path, cols.temp, UNIT_CELSIUS)
    fc_ghi = weather_series(fc_path, cols.ghi, UNIT_WATT_PER_M2)
    fc_temp = weather_series(fc_path, cols.temp, UNIT_CELSIUS)
    elevation = elevation_series(
        site, power.start, len(power),
        at_midpoint=config.ingest.elevation_at == "midpoint",
    )

    power, obs_ghi, obs_temp, fc_ghi, fc_temp, elevation = align_series(
        power, obs_ghi, obs_temp, fc_ghi, fc_temp, elevation
    )

    out = _canonical_dir(args.out)
    out.mkdir(parents=True, exist_ok=True)
    named = {
        "power": power,
        "obs_ghi": obs_ghi,
        "obs_temp": obs_temp,
        "fc_ghi": fc_ghi,
        "fc_temp": fc_temp,
        "elevation": elevation,
    }
    written = []
    coverage = {}
    for name, series in named.items():
        path = out / f"{name}.csv"
        write_canonical_csv(series, path)
        written.append(path)
        coverage[name] = {
            "valid_fraction": series.valid_fraction(),
            "per_season": seasonal_valid_fraction(series),
            "hours": len(series),
        }
    report_path = args.out / "ingest_report.json"
    report_path.write_text(json.dumps(coverage, indent=2, sort_keys=True) + "\n")
    written.append(report_path)

    print(f"ingest: {len(power)} aligned hours starting {isoformat_z(power.start)}")
    for name, stats in coverage.items():
        seasons = " ".join(f"{k}={v:.1%}" for k, v in sorted(stats["per_season"].items()))
        print(f"  {name}: valid {stats['valid_fraction']:.1%} ({seasons})")
    return written


def _load_canonical(out: Path) -> dict[str, HourlySeries]:
    base = _canonical_dir(out)
    names = ("power", "obs_ghi", "obs_temp", "fc_ghi", "fc_temp", "elevation")
    missing = [n for n in names if not (base / f"{n}.csv").exists()]
    if missing:
        raise DataError(f"canonical series missing (run ingest first): {missing}")
    return {n: read_canonical_csv(base / f"{n}.csv") for n in names}


def _train_windows(config: PipelineConfig, series: dict[str, HourlySeries]):
    windows = build_samples(
        series["power"],
        [series["obs_ghi"], series["obs_temp"]],
        series["elevation"],
        h=config.model.h,
        f=config.model.f,
        issue_hour_utc=config.ingest.issue_hour_utc,
    )
    return split_by_date(windows, config.eval.boundary())


def cmd_features(config: PipelineConfig, args) -> list[Path]:
    series = _load_canonical(args.out)
    train, _ = _train_windows(config, series)
    if not train:
        raise DataError("no training windows available for the feature report")
    extractors = {
        "ghi": weather_extractor(0),
        "temperature": weather_extractor(1),
        "elevation": elevation_extractor,
        "power_lag_1h": power_lag1_extractor,
        "power_lag_24h": power_lag24_extractor,
    }
    reports = feature_report(train, extractors)
    lags, _ = lag_autocorrelation(series["power"], max_lag=48)

    reports_dir = args.out / "reports"
    reports_dir.mkdir(parents=True, exist_ok=True)
    feat_path = reports_dir / "feature_correlations.csv"
    with feat_path.open("w", newline="") as fh:
        fh.write("# correlations computed on all hours, nocturnal included\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["feature", "pearson", "spearman", "n"])
        for r in reports:
            writer.writerow(
                [
                    r.feature_name,
                    _fmt(r.pearson) if r.defined else "",
                    _fmt(r.spearman) if r.defined else "",
                    r.sample_count,
                ]
            )
    lag_path = reports_dir / "power_autocorrelation.csv"
    write_rows_csv(lag_path, ["lag_hours", "pearson", "n"], [[l.lag, _fmt(l.r), l.n] for l in lags])

    print("feature correlations with target power (all hours, nocturnal included):")
    print(f"  {'feature':14s} {'pearson':>8s} {'spearman':>9s} {'n':>7s}")
    for r in reports:
        p = f"{r.pearson:8.3f}" if r.defined else "       -"
        s = f"{r.spearman:9.3f}" if r.defined else "        -"
        print(f"  {r.feature_name:14s} {p} {s} {r.sample_count:7d}")
    return [feat_path, lag_path]


def cmd_train(config: PipelineConfig, args) -> list[Path]:
    series = _load_canonical(args.out)
    train_windows, _ = _train_windows(config, series)
    if not train_windows:
        raise DataError("no training windows before the train/test boundary")
    X = np.stack([w.features() for w in train_windows])
    Y = np.stack([w.target for w in train_windows])
    seed = args.seed if args.seed is not None else config.seed
    est = MlpEnsembleRegressor(
        hidden=config.model.hidden,
        n_members=config.model.members,
        seed=seed,
        learning_rate=config.model.learning_rate,
        batch_size=config.model.batch_size,
        epochs=config.model.epochs,
        validation_fraction=config.model.validation_fraction,
        patience=config.model.patience,
        n_jobs=args.threads,
    )
    written = []
    if args.grid:
        grid_base = MlpEnsembleRegressor(**{**est.get_params(), "n_members": 1})
        results = grid_search(default_grid(), X, Y, k=config.model.k_folds, base=grid_base)
        grid_path = args.out / "grid_results.csv"
        write_rows_csv(
            grid_path,
            ["hidden", "mean_r2", "fold_r2", "error"],
            [
                [
                    "x".join(str(w) for w in r.params["hidden"]),
                    _fmt(r.mean_r2) if r.mean_r2 is not None else "",
                    ";".join(_fmt(v) for v in r.fold_r2) if r.fold_r2 else "",
                    r.error or "",
                ]
                for r in results
            ],
        )
        written.append(grid_path)
        best = results[0]
        if best.mean_r2 is not None:
            print(f"grid: best hidden={best.params['hidden']} mean R2={best.mean_r2:.4f}")

    est.fit(X, Y)
    model_path = args.out / "model.bin"
    save_ensemble(est, model_path)
    written.append(model_path)

    log = {
        "n_train_windows": len(train_windows),
        "seed": seed,
        "members": [
            {
                "final_train_mse": t.train[-1] if t.train else None,
                "final_val_mse": t.validation[-1] if t.validation else None,
                "best_epoch": t.stopped_epoch,
            }
            for t in est.traces_
        ],
    }
    log_path = args.out / "training_log.json"
    log_path.write_text(json.dumps(log, indent=2, sort_keys=True) + "\n")
    written.append(log_path)
    print(f"train: fitted {config.model.members} member(s) on {len(train_windows)} windows -> {model_path}")
    return written


def _forecast_runs(config: PipelineConfig, series, est, mode: str) -> list[ForecastRun]:
    weather = (
        [series["obs_ghi"], series["obs_temp"]]
        if mode == "perfect"
        else [series["fc_ghi"], series["fc_temp"]]
    )
    windows = build_samples(
        series["power"],
        weather,
        series["elevation"],
        h=config.model.h,
        f=config.model.f,
        issue_hour_utc=config.ingest.issue_hour_utc,
        require_targets=False,
    )
    _, test = split_by_date(windows, config.eval.boundary())
    runs = []
    skipped = 0
    for w in test:
        if not np.isfinite(w.features()).all():
            skipped += 1
            continue
        pred = est.predict(w.features())
        if config.model.night_filter:
            pred = np.where(w.elevation > 0.0, pred, 0.0)
        runs.append(ForecastRun(w.t, pred, w.target, w.target_valid))
    if skipped:
        logger.warning("%s mode: skipped %d windows with incomplete weather", mode, skipped)
    return runs


def _runs_csv_path(out: Path, mode: str) -> Path:
    return out / "runs" / f"{mode}.csv"


def write_runs_csv(path: Path, runs: list[ForecastRun]) -> None:
    rows = []
    for r in runs:
        for k in range(r.f):
            rows.append(
                [
                    isoformat_z(r.issue_time),
                    k + 1,
                    _fmt(r.predicted[k]),
                    _fmt(r.truth[k]) if r.valid[k] else "",
                    "1" if r.valid[k] else "0",
                ]
            )
    write_rows_csv(path, ["issue_time", "lead", "predicted", "truth", "valid"], rows)


def read_runs_csv(path: Path) -> list[ForecastRun]:
    runs: dict[str, dict] = {}
    with path.open("r", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            entry = runs.setdefault(row["issue_time"], {"leads": []})
            entry["leads"].append(
                (
                    int(row["lead"]),
                    float(row["predicted"]),
                    float(row["truth"]) if row["valid"] == "1" else np.nan,
                    row["valid"] == "1",
                )
            )
    out = []
    for issue, entry in runs.items():
        leads = sorted(entry["leads"])
        out.append(
            ForecastRun(
                parse_utc(issue),
                np.array([l[1] for l in leads]),
                np.array([l[2] for l in leads]),
                np.array([l[3] for l in leads]),
            )
        )
    out.sort(key=lambda r: r.issue_time)
    return out


def cmd_forecast(config: PipelineConfig, args) -> list[Path]:
    model_path = args.out / "model.bin"
    if not model_path.exists():
        raise TrainingError(f"no trained model at {model_path}; run train first")
    series = _load_canonical(args.out)
    est = load_ensemble(model_path)
    written = []
    modes = ["perfect", "nwp"] if args.mode == "both" else [args.mode]
    for mode in modes:
        runs = _forecast_runs(config, series, est, mode)
        if not runs:
            raise DataError(f"{mode} mode produced no forecast runs")
        path = _runs_csv_path(args.out, mode)
        write_runs_csv(path, runs)
        written.append(path)
        print(f"forecast[{mode}]: {len(runs)} runs at issue hour {config.ingest.issue_hour_utc:02d}Z -> {path}")
    return written


def _weather_error_runs(obs: HourlySeries, fc: HourlySeries, power_runs: list[ForecastRun], f: int):
    """Forecast-vs-observation runs for one weather variable at the same
    issue times as the power runs."""
    runs = []
    for r in power_runs:
        start = hours_between(obs.start, add_hours(r.issue_time, 1))
        if start < 0 or start + f > len(obs):
            continue
        sl = slice(start, start + f)
        valid = obs.valid[sl] & fc.valid[sl]
        if not valid.any():
            continue
        runs.append(ForecastRun(r.issue_time, fc.values[sl].copy(), obs.values[sl].copy(), valid))
    return runs


_POWER_DISPLAY_SCALE = 1000.0  # normalized fraction of peak -> W/kWp


def _scaled_runs(runs: list[ForecastRun], scale: float) -> list[ForecastRun]:
    return [
        ForecastRun(r.issue_time, r.predicted * scale, np.where(r.valid, r.truth * scale, np.nan), r.valid.copy())
        for r in runs
    ]


def cmd_eval(config: PipelineConfig, args) -> list[Path]:
    series = _load_canonical(args.out)
    available = {m: _runs_csv_path(args.out, m) for m in ("perfect", "nwp")}
    modes = {m: read_runs_csv(p) for m, p in available.items() if p.exists()}
    if not modes:
        raise DataError("no forecast runs found; run forecast first")

    reports_dir = args.out / "reports"
    reports_dir.mkdir(parents=True, exist_ok=True)
    written = []
    f = config.model.f

    plant_runs = _scaled_runs(modes["perfect"], _POWER_DISPLAY_SCALE) if "perfect" in modes else None
    combined_runs = _scaled_runs(modes["nwp"], _POWER_DISPLAY_SCALE) if "nwp" in modes else None
    weather_cols = None
    if "nwp" in modes:
        base_runs = modes["nwp"]
        weather_cols = {
            "ghi": ("W/m2", _weather_error_runs(series["obs_ghi"], series["fc_ghi"], base_runs, f)),
            "temp": ("degC", _weather_error_runs(series["obs_temp"], series["fc_temp"], base_runs, f)),
        }
    summary = decomposition_report(plant_runs, weather_cols, combined_runs)

    summary_json = {
        "format": 1,
        "power_unit": "W/kWp",
        "plant": None,
        "weather": {},
        "combined": None,
        "mae_inflation_pct": summary.mae_inflation_pct,
    }
    for label, col in (("plant", summary.plant), ("combined", summary.combined)):
        if col is not None:
            summary_json[label] = {"mbe": col.mbe, "mae": col.mae, "n_runs": col.n_runs, "unit": col.unit}
    for name, col in summary.weather.items():
        summary_json["weather"][name] = {"mbe": col.mbe, "mae": col.mae, "n_runs": col.n_runs, "unit": col.unit}

    lead_tables = {}
    for mode, runs in modes.items():
        scaled = _scaled_runs(runs, _POWER_DISPLAY_SCALE)
        samples = lead_errors(scaled)
        err_path = reports_dir / f"lead_errors_{mode}.csv"
        rows = []
        for lead in range(1, samples.f + 1):
            for value in samples.for_lead(lead):
                rows.append([lead, _fmt(value)])
        write_rows_csv(err_path, ["lead", "error_wkwp"], rows)
        written.append(err_path)

        reports = lead_report(
            samples,
            diurnal_leads=config.eval.diurnal_leads,
            min_fit_samples=config.eval.min_fit_samples,
        )
        lead_tables[mode] = reports
        fits_path = reports_dir / f"lead_fits_{mode}.json"
        fits_payload = []
        for rep in reports:
            entry = {
                "lead": rep.lead,
                "n": rep.n,
                "degenerate": rep.degenerate,
                "moments": None,
                "fits": {name: fd.to_json_dict() for name, fd in rep.fits.items()},
            }
            if rep.moments is not None and not rep.degenerate:
                entry["moments"] = {
                    "mean": rep.moments.mean,
                    "std": rep.moments.std,
                    "skewness": rep.moments.skewness,
                    "kurtosis": rep.moments.kurtosis,
                }
            fits_payload.append(entry)
        fits_doc = {"format": 1, "leads": fits_payload}
        fits_path.write_text(json.dumps(fits_doc, indent=2, sort_keys=True) + "\n")
        written.append(fits_path)

        corr, _ = temporal_autocorrelation(samples, config.eval.max_autocorr_distance)
        corr_path = reports_dir / f"autocorrelation_{mode}.csv"
        write_rows_csv(corr_path, ["distance", "pearson", "n_pairs"], [[c.distance, _fmt(c.r), c.n_pairs] for c in corr])
        written.append(corr_path)

        pairs = pairwise_lead_correlation(samples, config.eval.max_autocorr_distance)
        pairs_path = reports_dir / f"autocorrelation_pairs_{mode}.csv"
        write_rows_csv(
            pairs_path,
            ["lead_a", "lead_b", "pearson", "n_pairs"],
            [[p.lead_a, p.lead_b, _fmt(p.r), p.n_pairs] for p in pairs],
        )
        written.append(pairs_path)

        written.extend(_write_qq(reports_dir, mode, reports, samples, args.qq_points))

    summary_path = reports_dir / "summary.json"
    summary_path.write_text(json.dumps(summary_json, indent=2, sort_keys=True) + "\n")
    written.append(summary_path)

    _print_summary(summary_json)
    for mode, reports in lead_tables.items():
        _print_lead_table(mode, reports)
    return written


def _qq_leads(reports) -> list[int]:
    fitted = [r.lead for r in reports if r.fits]
    if not fitted:
        return []
    return sorted({fitted[0], fitted[len(fitted) // 2], fitted[-1]})


def _write_qq(reports_dir: Path, mode: str, reports, samples, max_points: int) -> list[Path]:
    """Q-Q CSVs for a few representative leads; long samples are thinned to
    evenly spaced order statistics to bound quantile inversions."""
    written = []
    for lead in _qq_leads(reports):
        rep = reports[lead - 1]
        x = samples.for_lead(lead)
        if len(x) > max_points:
            idx = np.linspace(0, len(x) - 1, max_points).round().astype(int)
            x = np.sort(x)[idx]
        for name, fd in rep.fits.items():
            if not fd.converged or fd.dist is None:
                continue
            points = qq_points(x, fd.dist)
            path = reports_dir / "qq" / mode / f"lead{lead:02d}_{name}.csv"
            write_rows_csv(
                path,
                ["theoretical", "empirical"],
                [[_fmt(a), _fmt(b)] for a, b in points],
            )
            written.append(path)
    return written


def _print_summary(summary: dict) -> None:
    print("error summary (MBE / MAE):")
    if summary["plant"]:
        col = summary["plant"]
        print(f"  plant    : {col['mbe']:8.2f} / {col['mae']:8.2f} {col['unit']} ({col['n_runs']} runs)")
    for name, col in summary["weather"].items():
        print(f"  nwp {name:5s}: {col['mbe']:8.2f} / {col['mae']:8.2f} {col['unit']} ({col['n_runs']} runs)")
    if summary["combined"]:
        col = summary["combined"]
        print(f"  combined : {col['mbe']:8.2f} / {col['mae']:8.2f} {col['unit']} ({col['n_runs']} runs)")
    if summary["mae_inflation_pct"] is not None:
        print(f"  combined vs plant MAE inflation: {summary['mae_inflation_pct']:+.1f}%")


def _print_lead_table(mode: str, reports) -> None:
    fitted = [r for r in reports if r.fits]
    if not fitted:
        return
    print(f"goodness-of-fit p-values, {mode} mode (K-S / C-M; '-' = fit did not converge):")
    print(f"  {'lead':>4s} {'normal':>15s} {'student_t':>15s} {'gen_hyperbolic':>15s}")
    for rep in fitted:
        cells = []
        for name in ("normal", "student_t", "generalized_hyperbolic"):
            fd = rep.fits.get(name)
            if fd is None or not fd.converged or fd.ks is None:
                cells.append(f"{'-':>7s} {'-':>7s}")
            else:
                cells.append(f"{fd.ks.p:7.3f} {fd.cvm.p:7.3f}")
        print(f"  {rep.lead:4d} {cells[0]:>15s} {cells[1]:>15s} {cells[2]:>15s}")


def cmd_report(config: PipelineConfig, args) -> list[Path]:
    reports_dir = args.out / "reports"
    summary_path = reports_dir / "summary.json"
    if not summary_path.exists():
        raise DataError(f"no evaluation bundle at {reports_dir}; run eval first")
    summary = json.loads(summary_path.read_text())
    _print_summary(summary)
    for mode in ("perfect", "nwp"):
        fits_path = reports_dir / f"lead_fits_{mode}.json"
        if not fits_path.exists():
            continue
        payload = json.loads(fits_path.read_text())
        rows = [e for e in payload.get("leads", []) if e["fits"]]
        if not rows:
            continue
        print(f"goodness-of-fit p-values, {mode} mode (K-S / C-M; '-' = fit did not converge):")
        print(f"  {'lead':>4s} {'normal':>15s} {'student_t':>15s} {'gen_hyperbolic':>15s}")
        for entry in rows:
            cells = []
            for name in ("normal", "student_t", "generalized_hyperbolic"):
                fd = entry["fits"].get(name)
                if not fd or not fd.get("converged") or "ks" not in fd:
                    cells.append(f"{'-':>7s} {'-':>7s}")
                else:
                    cells.append(f"{fd['ks']['p']:7.3f} {fd['cvm']['p']:7.3f}")
            print(f"  {entry['lead']:4d} {cells[0]:>15s} {cells[1]:>15s} {cells[2]:>15s}")
    return []


# ---------------------------------------------------------------------------
# Entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pvcast",
        description="Two-stage PV forecasting pipeline and forecast-error analysis.",
    )
    parser.add_argument("--version", action="version", version=f"pvcast {__version__}")
    parser.add_argument("--config", type=Path, required=True, help="pipeline config JSON")
    parser.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--threads", type=int, default=1, help="parallel workers for ensemble training")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("synth", help="generate the synthetic scenario inputs")
    sub.add_parser("ingest", help="clean, resample, normalize and align the input series")
    sub.add_parser("features", help="correlation report for input features")
    train_p = sub.add_parser("train", help="train the plant model ensemble")
    train_p.add_argument("--grid", action="store_true", help="run the architecture grid search first")
    fc_p = sub.add_parser("forecast", help="run the trained model over the test period")
    fc_p.add_argument("--mode", choices=["perfect", "nwp", "both"], default="both")
    eval_p = sub.add_parser("eval", help="error decomposition, fits, and autocorrelation")
    eval_p.add_argument("--qq-points", type=int, default=101, help="max Q-Q points per plot CSV")
    sub.add_parser("report", help="re-render tables from an existing eval bundle")
    return parser


_COMMANDS = {
    "synth": cmd_synth,
    "ingest": cmd_ingest,
    "features": cmd_features,
    "train": cmd_train,
    "forecast": cmd_forecast,
    "eval": cmd_eval,
    "report": cmd_report,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        args.config_dir = args.config.resolve().parent
        with output_lock(args.out):
            written = _COMMANDS[args.command](config, args)
            if written:
                update_manifest(args.out, [p for p in written if p.exists()])
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SchemaError, AlignmentError, DegenerateDataError, DataError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (TrainingError, FitError) as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
