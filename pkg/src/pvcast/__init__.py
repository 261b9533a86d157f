"""pvcast: two-stage photovoltaic power forecasting and error analysis.

The toolkit separates the forecast problem into a plant characteristic
model (a bagged MLP ensemble mapping weather and power history to power)
and a black-box weather forecast whose errors are characterized lead by
lead with fitted heavy-tailed distributions and goodness-of-fit tests.
"""

__version__ = "0.1.0"

from .erroranalysis import ForecastRun, LeadErrorSamples, lead_errors, mae, mbe
from .ingest import SampleWindow, build_samples, clean_power, normalize_by_peak, parse_csv, resample_hourly_mean, split_by_date
from .plantmodel import MinMaxScaler, MlpEnsembleRegressor, cross_validate, grid_search, load_ensemble, r2_score, save_ensemble
from .series import HourlySeries, SiteMeta
from .solarpos import elevation_series, solar_elevation

__all__ = [
    "__version__",
    "HourlySeries",
    "SiteMeta",
    "SampleWindow",
    "parse_csv",
    "clean_power",
    "resample_hourly_mean",
    "normalize_by_peak",
    "build_samples",
    "split_by_date",
    "solar_elevation",
    "elevation_series",
    "MinMaxScaler",
    "MlpEnsembleRegressor",
    "r2_score",
    "cross_validate",
    "grid_search",
    "save_ensemble",
    "load_ensemble",
    "ForecastRun",
    "LeadErrorSamples",
    "lead_errors",
    "mbe",
    "mae",
]
