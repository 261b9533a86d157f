"""Synthetic desk-scale scenario: plant power, satellite-style observations,
and a biased NWP-style forecast surrogate.

The generator is the test substrate for the whole pipeline, so it is a pure
function of (scenario, seed): a clear-sky envelope from solar elevation, a
persistent multiplicative cloud process, a temperature tied to elevation,
and a forecast series equal to the observations plus a daytime bias and
persistent noise.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

import numpy as np

from .series import SiteMeta
from .solarpos import elevation_series
from .timeutil import add_hours, isoformat_z, parse_utc

CLEAR_SKY_MAX_WM2 = 1100.0
PLANT_GAIN = 0.85
TEMP_COEFF_PER_C = 0.004
TEMP_REFERENCE_C = 25.0


@dataclass
class SyntheticScenario:
    days: int = 730
    start: str = "2021-01-01T00:00:00Z"
    latitude: float = 39.74
    longitude: float = -105.18
    peak_power_w: float = 2400.0
    cloud_mean: float = 0.75
    cloud_persistence: float = 0.85
    cloud_sigma: float = 0.25
    nwp_ghi_bias_wm2: float = 20.0
    nwp_ghi_noise_wm2: float = 30.0
    nwp_noise_persistence: float = 0.7
    nwp_temp_bias_c: float = 1.0
    nwp_temp_noise_c: float = 1.0
    temp_noise_c: float = 1.5
    power_noise: float = 0.01

    def __post_init__(self):
        if self.days < 1:
            raise ValueError("days must be at least 1")
        for name in (
            "cloud_sigma",
            "nwp_ghi_noise_wm2",
            "nwp_temp_noise_c",
            "temp_noise_c",
            "power_noise",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        for name in ("cloud_persistence", "nwp_noise_persistence"):
            if not 0.0 <= getattr(self, name) < 1.0:
                raise ValueError(f"{name} must lie in [0, 1)")

    def site(self) -> SiteMeta:
        return SiteMeta(self.latitude, self.longitude, self.peak_power_w)


@dataclass
class SyntheticData:
    start: datetime
    hours: int
    elevation: np.ndarray
    ghi_true: np.ndarray
    temp_true: np.ndarray
    power_norm: np.ndarray
    ghi_forecast: np.ndarray
    temp_forecast: np.ndarray


def _ar1(rng, n: int, rho: float) -> np.ndarray:
    """Stationary unit-variance AR(1) path."""
    eps = rng.normal(size=n)
    out = np.empty(n)
    out[0] = eps[0]
    scale = np.sqrt(1.0 - rho * rho)
    for i in range(1, n):
        out[i] = rho * out[i - 1] + scale * eps[i]
    return out


def generate(scenario: SyntheticScenario, seed: int = 0) -> SyntheticData:
    rng = np.random.default_rng(seed)
    start = parse_utc(scenario.start)
    n = scenario.days * 24
    site = scenario.site()
    elev = elevation_series(site, start, n).values
    sin_elev = np.sin(np.radians(elev))

    clear_sky = CLEAR_SKY_MAX_WM2 * np.maximum(sin_elev, 0.0) ** 1.15
    cloud = np.clip(
        scenario.cloud_mean + scenario.cloud_sigma * _ar1(rng, n, scenario.cloud_persistence),
        0.05,
        1.0,
    )
    ghi_true = clear_sky * cloud

    temp_true = 8.0 + 0.25 * elev + scenario.temp_noise_c * _ar1(rng, n, 0.9)

    efficiency = 1.0 - TEMP_COEFF_PER_C * (temp_true - TEMP_REFERENCE_C)
    power_norm = PLANT_GAIN * ghi_true / 1000.0 * efficiency
    power_norm = np.maximum(power_norm * (1.0 + scenario.power_noise * rng.normal(size=n)), 0.0)

    daylight = (elev > 0.0).astype(float)
    ghi_err = scenario.nwp_ghi_bias_wm2 + scenario.nwp_ghi_noise_wm2 * _ar1(
        rng, n, scenario.nwp_noise_persistence
    )
    ghi_forecast = np.maximum(ghi_true + daylight * ghi_err, 0.0)
    temp_forecast = (
        temp_true
        + scenario.nwp_temp_bias_c
        + scenario.nwp_temp_noise_c * _ar1(rng, n, scenario.nwp_noise_persistence)
    )

    return SyntheticData(
        start=start,
        hours=n,
        elevation=elev,
        ghi_true=ghi_true,
        temp_true=temp_true,
        power_norm=power_norm,
        ghi_forecast=ghi_forecast,
        temp_forecast=temp_forecast,
    )


def write_scenario_csvs(data: SyntheticData, scenario: SyntheticScenario, out_dir) -> dict[str, Path]:
    """Write the three raw input CSVs: 15-minute power plus hourly weather.

    Power rows repeat the hourly mean at quarter-hour stamps, exercising the
    resampling path without changing the hourly truth.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "power": out_dir / "power.csv",
        "weather_obs": out_dir / "weather_obs.csv",
        "weather_fc": out_dir / "weather_fc.csv",
    }
    with paths["power"].open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["timestamp", "power_w"])
        for i in range(data.hours):
            watts = data.power_norm[i] * scenario.peak_power_w
            hour = add_hours(data.start, i)
            for quarter in range(4):
                stamp = hour.replace(minute=quarter * 15)
                writer.writerow([isoformat_z(stamp), repr(float(watts))])
    for key, ghi, temp in (
        ("weather_obs", data.ghi_true, data.temp_true),
        ("weather_fc", data.ghi_forecast, data.temp_forecast),
    ):
        with paths[key].open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["timestamp", "ghi_wm2", "temp_c"])
            for i in range(data.hours):
                writer.writerow(
                    [
                        isoformat_z(add_hours(data.start, i)),
                        repr(float(ghi[i])),
                        repr(float(temp[i])),
                    ]
                )
    return paths
