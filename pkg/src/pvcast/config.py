"""Pipeline configuration: a JSON file with site, path, and parameter blocks.

Unknown keys are rejected so typos fail fast; every block has sensible
defaults and only ``site`` plus the input paths are mandatory for the data
commands.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigError
from .series import SiteMeta
from .synth import SyntheticScenario
from .timeutil import parse_utc


@dataclass
class IngestParams:
    outlier_factor: float = 1.5
    issue_hour_utc: int = 6
    elevation_at: str = "midpoint"

    def __post_init__(self):
        if self.outlier_factor <= 1:
            raise ConfigError("ingest.outlier_factor must exceed 1")
        if not 0 <= self.issue_hour_utc <= 23:
            raise ConfigError("ingest.issue_hour_utc must lie in 0..23")
        if self.elevation_at not in ("midpoint", "start"):
            raise ConfigError("ingest.elevation_at must be 'midpoint' or 'start'")


@dataclass
class ModelParams:
    h: int = 24
    f: int = 24
    hidden: tuple = (90, 80)
    members: int = 200
    epochs: int = 300
    batch_size: int = 32
    learning_rate: float = 1e-3
    validation_fraction: float = 0.1
    patience: int = 20
    k_folds: int = 5
    night_filter: bool = False

    def __post_init__(self):
        self.hidden = tuple(int(w) for w in self.hidden)
        if self.h < 1 or self.f < 1:
            raise ConfigError("model.h and model.f must be at least 1")
        if self.members < 1:
            raise ConfigError("model.members must be at least 1")


@dataclass
class EvalParams:
    train_test_boundary: str = "2022-01-01T00:00:00Z"
    diurnal_leads: tuple = (6, 20)
    max_autocorr_distance: int = 12
    min_fit_samples: int = 16

    def __post_init__(self):
        self.diurnal_leads = tuple(int(v) for v in self.diurnal_leads)
        parse_utc(self.train_test_boundary)

    def boundary(self):
        return parse_utc(self.train_test_boundary)


@dataclass
class PathsConfig:
    power_csv: str = "power.csv"
    weather_obs_csv: str = "weather_obs.csv"
    weather_fc_csv: str = "weather_fc.csv"


@dataclass
class ColumnsConfig:
    timestamp: str = "timestamp"
    power: str = "power_w"
    ghi: str = "ghi_wm2"
    temp: str = "temp_c"


@dataclass
class PipelineConfig:
    site: SiteMeta
    paths: PathsConfig = field(default_factory=PathsConfig)
    columns: ColumnsConfig = field(default_factory=ColumnsConfig)
    ingest: IngestParams = field(default_factory=IngestParams)
    model: ModelParams = field(default_factory=ModelParams)
    eval: EvalParams = field(default_factory=EvalParams)
    synth: SyntheticScenario = field(default_factory=SyntheticScenario)
    seed: int = 0


def _build(cls, block: dict, where: str):
    allowed = {f.name for f in fields(cls)}
    unknown = set(block) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(unknown)}")
    try:
        return cls(**block)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad {where} block: {exc}") from exc


def load_config(path) -> PipelineConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object")

    known = {"site", "paths", "columns", "ingest", "model", "eval", "synth", "seed"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"{path}: unknown top-level key(s): {sorted(unknown)}")

    site_block = raw.get("site")
    if not isinstance(site_block, dict):
        raise ConfigError(f"{path}: a site block is required")
    site_map = {
        "latitude": site_block.get("latitude"),
        "longitude": site_block.get("longitude"),
        "peak_power_w": site_block.get("peak_power_w"),
        "local_utc_offset_hours": site_block.get("utc_offset", 0),
    }
    extra = set(site_block) - {"latitude", "longitude", "peak_power_w", "utc_offset"}
    if extra:
        raise ConfigError(f"{path}: unknown site key(s): {sorted(extra)}")
    if any(v is None for k, v in site_map.items() if k != "local_utc_offset_hours"):
        raise ConfigError(f"{path}: site needs latitude, longitude and peak_power_w")
    try:
        site = SiteMeta(**site_map)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    return PipelineConfig(
        site=site,
        paths=_build(PathsConfig, raw.get("paths", {}), "paths"),
        columns=_build(ColumnsConfig, raw.get("columns", {}), "columns"),
        ingest=_build(IngestParams, raw.get("ingest", {}), "ingest"),
        model=_build(ModelParams, raw.get("model", {}), "model"),
        eval=_build(EvalParams, raw.get("eval", {}), "eval"),
        synth=_build(SyntheticScenario, raw.get("synth", {}), "synth"),
        seed=int(raw.get("seed", 0)),
    )


def resolve_input(path_value: str, config_dir: Path) -> Path:
    """Input paths are taken relative to the config file's directory."""
    p = Path(path_value)
    return p if p.is_absolute() else config_dir / p
