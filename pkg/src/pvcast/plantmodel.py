"""Plant characteristic model: a bagged ensemble of identically configured
feed-forward networks behind a fit/predict estimator API.

``MlpEnsembleRegressor`` follows the scikit-learn estimator protocol
(``get_params`` / ``set_params`` / ``fit`` / ``predict``) so it composes
with ecosystem tooling, while the network math itself lives in ``nn``.
"""

from __future__ import annotations

import inspect
import json
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateDataError, TrainingError
from .nn import LossTrace, Mlp, MlpConfig, forward, init_mlp, train

_MODEL_MAGIC = b"PVCAST-MODEL"
_MODEL_VERSION = 1


class MinMaxScaler:
    """Per-dimension min-max scaling fitted on training data only.

    Transform is a plain affine map: out-of-range inputs extend beyond
    [0, 1] rather than being clamped, and a degenerate dimension
    (max == min) maps to 0 for every input.
    """

    def __init__(self):
        self.min_ = None
        self.max_ = None

    def fit(self, x) -> "MinMaxScaler":
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if x.size == 0:
            raise DegenerateDataError("cannot fit a scaler on an empty training set")
        self.min_ = x.min(axis=0)
        self.max_ = x.max(axis=0)
        return self

    def transform(self, x) -> np.ndarray:
        if self.min_ is None:
            raise RuntimeError("scaler is not fitted")
        x = np.asarray(x, dtype=np.float64)
        scale = self.max_ - self.min_
        safe = np.where(scale > 0, scale, 1.0)
        out = (x - self.min_) / safe
        return np.where(scale > 0, out, 0.0)

    def fit_transform(self, x) -> np.ndarray:
        return self.fit(x).transform(x)


class BaseEstimator:
    """Minimal scikit-learn parameter protocol (compatible with sklearn.clone)."""

    @classmethod
    def _param_names(cls):
        sig = inspect.signature(cls.__init__)
        return [p for p in sig.parameters if p != "self"]

    def get_params(self, deep=True) -> dict:
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params):
        valid = set(self._param_names())
        for key, value in params.items():
            if key not in valid:
                raise ValueError(f"invalid parameter {key!r} for {type(self).__name__}")
            setattr(self, key, value)
        return self

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"


class MlpEnsembleRegressor(BaseEstimator):
    """Bagged multi-output MLP regressor.

    ``n_members`` identically configured networks are trained with seeds
    ``seed .. seed + n_members - 1``; the prediction is their element-wise
    mean. One min-max scaler is fitted on the full training inputs and
    shared by all members. A member whose training diverges is retried with
    a fresh deterministic seed up to ``max_retries`` times.
    """

    def __init__(
        self,
        hidden=(90, 80),
        n_members=200,
        seed=0,
        learning_rate=1e-3,
        batch_size=32,
        epochs=300,
        validation_fraction=0.1,
        patience=20,
        max_retries=3,
        n_jobs=1,
    ):
        self.hidden = hidden
        self.n_members = n_members
        self.seed = seed
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.epochs = epochs
        self.validation_fraction = validation_fraction
        self.patience = patience
        self.max_retries = max_retries
        self.n_jobs = n_jobs

    def _config(self, input_dim, output_dim, seed) -> MlpConfig:
        return MlpConfig(
            input_dim=input_dim,
            output_dim=output_dim,
            hidden=tuple(self.hidden),
            seed=seed,
            learning_rate=self.learning_rate,
            batch_size=self.batch_size,
            epochs=self.epochs,
            validation_fraction=self.validation_fraction,
            patience=self.patience,
        )

    def _train_member(self, j, x_scaled, y):
        """Train member j, retrying with fresh seeds after divergence."""
        seeds = [self.seed + j] + [
            self.seed + self.n_members + 7919 * attempt + j
            for attempt in range(1, self.max_retries + 1)
        ]
        last_error = None
        for seed in seeds:
            cfg = self._config(x_scaled.shape[1], y.shape[1], seed)
            try:
                net, trace = train(init_mlp(cfg), x_scaled, y)
                return net, trace
            except TrainingError as exc:
                last_error = exc
        raise TrainingError(f"member {j} diverged on every retry: {last_error}")

    def fit(self, X, y) -> "MlpEnsembleRegressor":
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        y = np.atleast_2d(np.asarray(y, dtype=np.float64))
        if len(X) != len(y) or len(X) == 0:
            raise TrainingError("fit needs equal-length, nonempty X and y")
        if self.n_members < 1:
            raise ValueError("n_members must be at least 1")
        self.scaler_ = MinMaxScaler().fit(X)
        x_scaled = self.scaler_.transform(X)
        if self.n_jobs and self.n_jobs > 1:
            with ThreadPoolExecutor(max_workers=self.n_jobs) as pool:
                results = list(pool.map(lambda j: self._train_member(j, x_scaled, y), range(self.n_members)))
        else:
            results = [self._train_member(j, x_scaled, y) for j in range(self.n_members)]
        self.members_ = [net for net, _ in results]
        self.traces_ = [trace for _, trace in results]
        return self

    def _check_fitted(self):
        if not hasattr(self, "members_"):
            raise RuntimeError("estimator is not fitted")

    def predict_members(self, X) -> np.ndarray:
        """Per-member predictions, shape (n_members, n_samples, output_dim)."""
        self._check_fitted()
        x_scaled = np.atleast_2d(self.scaler_.transform(X))
        return np.stack([forward(net, x_scaled) for net in self.members_])

    def predict(self, X) -> np.ndarray:
        """Element-wise mean of the member outputs; no clipping is applied."""
        member_preds = self.predict_members(X)
        out = member_preds.mean(axis=0)
        return out[0] if np.asarray(X).ndim == 1 else out


def r2_score(pred, truth) -> float:
    """Coefficient of determination pooled over all samples and outputs."""
    pred = np.asarray(pred, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if pred.shape != truth.shape or pred.size < 2:
        raise ValueError("pred and truth must match in shape with at least 2 values")
    ss_tot = float(((truth - truth.mean()) ** 2).sum())
    if ss_tot == 0.0:
        raise DegenerateDataError("R^2 undefined for constant truth")
    ss_res = float(((pred - truth) ** 2).sum())
    return 1.0 - ss_res / ss_tot


def fold_blocks(n: int, k: int) -> list[np.ndarray]:
    """Contiguous index blocks with sizes differing by at most one."""
    if k < 2:
        raise ValueError("need at least 2 folds")
    if n < k:
        raise ValueError(f"cannot split {n} samples into {k} folds")
    sizes = [n // k + (1 if i < n % k else 0) for i in range(k)]
    blocks, at = [], 0
    for size in sizes:
        blocks.append(np.arange(at, at + size))
        at += size
    return blocks


@dataclass
class CvResult:
    mean_r2: float
    fold_r2: list[float]


def cross_validate(estimator: MlpEnsembleRegressor, X, y, k: int = 5) -> CvResult:
    """K-fold cross-validation on contiguous, time-ordered blocks.

    Contiguous folds (rather than shuffled ones) keep overlapping windows
    from leaking between train and validation blocks.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    scores = []
    for block in fold_blocks(len(X), k):
        mask = np.ones(len(X), dtype=bool)
        mask[block] = False
        est = type(estimator)(**estimator.get_params())
        est.fit(X[mask], y[mask])
        scores.append(r2_score(est.predict(X[block]), y[block]))
    return CvResult(mean_r2=float(np.mean(scores)), fold_r2=scores)


@dataclass
class GridResult:
    params: dict
    mean_r2: float | None
    fold_r2: list[float] | None
    error: str | None = None


def grid_search(space: list[dict], X, y, k: int = 5, base: MlpEnsembleRegressor | None = None) -> list[GridResult]:
    """Cross-validate every parameter set and rank by mean R^2 (descending).

    A failing configuration is recorded with its error instead of aborting
    the search. Ties keep the earlier configuration first. Entries in
    ``space`` override the base estimator's parameters; pass single-member
    entries for architecture sweeps, the ensemble size is a separate choice.
    """
    if not space:
        raise ValueError("grid space must not be empty")
    base = base if base is not None else MlpEnsembleRegressor(n_members=1)
    results: list[GridResult] = []
    for params in space:
        est = type(base)(**base.get_params()).set_params(**params)
        try:
            cv = cross_validate(est, X, y, k)
            results.append(GridResult(dict(params), cv.mean_r2, cv.fold_r2))
        except (TrainingError, DegenerateDataError, ValueError) as exc:
            results.append(GridResult(dict(params), None, None, error=str(exc)))
    order = sorted(
        range(len(results)),
        key=lambda i: (-(results[i].mean_r2 if results[i].mean_r2 is not None else -np.inf), i),
    )
    return [results[i] for i in order]


def default_grid() -> list[dict]:
    """Width sweep between 24 and 192 around the 88-neuron reference, 1-2 layers."""
    singles = [{"hidden": (w,)} for w in (24, 48, 88, 128, 192)]
    doubles = [{"hidden": p} for p in ((88, 48), (90, 80), (128, 64), (192, 96))]
    return singles + doubles


def save_ensemble(est: MlpEnsembleRegressor, path) -> None:
    """Persist a fitted ensemble to a self-describing versioned container.

    Layout: magic line, header length, JSON header (format version,
    estimator params, array manifest), then raw little-endian float64 data.
    The byte stream is a pure function of the model, so identical models
    produce identical files.
    """
    est._check_fitted()
    arrays: list[tuple[str, np.ndarray]] = [
        ("scaler_min", est.scaler_.min_),
        ("scaler_max", est.scaler_.max_),
    ]
    for j, net in enumerate(est.members_):
        for l, (w, b) in enumerate(zip(net.weights, net.biases)):
            arrays.append((f"m{j}_w{l}", w))
            arrays.append((f"m{j}_b{l}", b))
    params = est.get_params()
    params["hidden"] = list(params["hidden"])
    header = {
        "format": _MODEL_VERSION,
        "params": params,
        "input_dim": est.members_[0].config.input_dim,
        "output_dim": est.members_[0].config.output_dim,
        "arrays": [{"name": name, "shape": list(a.shape)} for name, a in arrays],
    }
    header_bytes = json.dumps(header, sort_keys=True).encode()
    with Path(path).open("wb") as fh:
        fh.write(_MODEL_MAGIC + b"\n")
        fh.write(struct.pack("<I", len(header_bytes)))
        fh.write(header_bytes)
        for _, a in arrays:
            fh.write(np.ascontiguousarray(a, dtype="<f8").tobytes())


def load_ensemble(path) -> MlpEnsembleRegressor:
    """Load a persisted ensemble; predictions round-trip bit-exactly."""
    with Path(path).open("rb") as fh:
        magic = fh.readline().strip()
        if magic != _MODEL_MAGIC:
            raise ValueError(f"{path}: not a pvcast model file")
        (header_len,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(header_len).decode())
        if header["format"] != _MODEL_VERSION:
            raise ValueError(f"{path}: unsupported model format {header['format']}")
        data = {}
        for entry in header["arrays"]:
            shape = tuple(entry["shape"])
            count = int(np.prod(shape)) if shape else 1
            buf = fh.read(count * 8)
            data[entry["name"]] = np.frombuffer(buf, dtype="<f8").reshape(shape).copy()
    params = dict(header["params"])
    params["hidden"] = tuple(params["hidden"])
    est = MlpEnsembleRegressor(**params)
    est.scaler_ = MinMaxScaler()
    est.scaler_.min_ = data["scaler_min"]
    est.scaler_.max_ = data["scaler_max"]
    est.members_ = []
    n_layers = len(tuple(params["hidden"])) + 1
    for j in range(params["n_members"]):
        cfg = est._config(header["input_dim"], header["output_dim"], params["seed"] + j)
        weights = [data[f"m{j}_w{l}"] for l in range(n_layers)]
        biases = [data[f"m{j}_b{l}"] for l in range(n_layers)]
        est.members_.append(Mlp(cfg, weights, biases))
    est.traces_ = [LossTrace() for _ in range(params["n_members"])]
    return est
