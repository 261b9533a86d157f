"""Feed-forward network internals: initialization, forward pass, backprop,
and the Adam training loop.

Everything here is plain numpy in float64 and fully deterministic given the
seed, so two identically configured trainings produce bit-identical weights.
The higher-level estimator API lives in ``plantmodel``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import TrainingError


@dataclass(frozen=True)
class MlpConfig:
    input_dim: int
    output_dim: int
    hidden: tuple[int, ...] = (90, 80)
    seed: int = 0
    learning_rate: float = 1e-3
    batch_size: int = 32
    epochs: int = 300
    validation_fraction: float = 0.1
    patience: int = 20

    def __post_init__(self):
        object.__setattr__(self, "hidden", tuple(int(w) for w in self.hidden))
        if self.input_dim < 1 or self.output_dim < 1 or any(w < 1 for w in self.hidden):
            raise ValueError("all layer widths must be at least 1")

    def layer_dims(self) -> list[tuple[int, int]]:
        sizes = [self.input_dim, *self.hidden, self.output_dim]
        return list(zip(sizes[:-1], sizes[1:]))


@dataclass
class Mlp:
    """Weights (in, out) and biases per layer; ReLU hidden, identity output."""

    config: MlpConfig
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def copy(self) -> "Mlp":
        return Mlp(self.config, [w.copy() for w in self.weights], [b.copy() for b in self.biases])


def init_mlp(config: MlpConfig) -> Mlp:
    """Uniform fan-in initialization, U(-sqrt(6/fan_in), +sqrt(6/fan_in))."""
    rng = np.random.default_rng(config.seed)
    weights, biases = [], []
    for fan_in, fan_out in config.layer_dims():
        bound = np.sqrt(6.0 / fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return Mlp(config, weights, biases)


def forward(net: Mlp, x: np.ndarray) -> np.ndarray:
    """Forward pass; accepts a single vector or a (batch, input_dim) matrix."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    a = x[None, :] if single else x
    if a.shape[1] != net.config.input_dim:
        raise ValueError(f"expected input dim {net.config.input_dim}, got {a.shape[1]}")
    last = len(net.weights) - 1
    for l, (w, b) in enumerate(zip(net.weights, net.biases)):
        a = a @ w + b
        if l != last:
            a = np.maximum(a, 0.0)
    return a[0] if single else a


def _forward_cached(net: Mlp, x: np.ndarray):
    activations = [x]
    a = x
    last = len(net.weights) - 1
    for l, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = a @ w + b
        a = np.maximum(z, 0.0) if l != last else z
        activations.append(a)
    return activations


def mse(pred: np.ndarray, truth: np.ndarray) -> float:
    return float(np.mean((pred - truth) ** 2))


def gradients(net: Mlp, x: np.ndarray, y: np.ndarray):
    """Backprop gradients of the mean-squared error over all output elements.

    Returns (grad_weights, grad_biases, loss) for a (batch, in) / (batch, out)
    pair.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    acts = _forward_cached(net, x)
    pred = acts[-1]
    loss = mse(pred, y)
    delta = 2.0 * (pred - y) / pred.size
    grad_w = [np.empty(0)] * len(net.weights)
    grad_b = [np.empty(0)] * len(net.biases)
    for l in range(len(net.weights) - 1, -1, -1):
        grad_w[l] = acts[l].T @ delta
        grad_b[l] = delta.sum(axis=0)
        if l > 0:
            delta = (delta @ net.weights[l].T) * (acts[l] > 0.0)
    return grad_w, grad_b, loss


@dataclass
class LossTrace:
    train: list[float] = field(default_factory=list)
    validation: list[float] = field(default_factory=list)
    stopped_epoch: int | None = None


def train(net: Mlp, x: np.ndarray, y: np.ndarray) -> tuple[Mlp, LossTrace]:
    """Train a copy of ``net`` with Adam on mini-batch MSE.

    The last ``validation_fraction`` of the samples (in given order) is held
    out for early stopping with the configured patience; the best-validation
    weights are restored. A non-finite loss raises ``TrainingError``.
    """
    cfg = net.config
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    if len(x) != len(y) or len(x) == 0:
        raise TrainingError("training needs equal-length, nonempty x and y")
    net = net.copy()
    trace = LossTrace()
    if cfg.epochs == 0:
        return net, trace

    n_val = int(round(cfg.validation_fraction * len(x)))
    use_val = 0 < n_val < len(x)
    x_tr, y_tr = (x[:-n_val], y[:-n_val]) if use_val else (x, y)
    x_val, y_val = (x[-n_val:], y[-n_val:]) if use_val else (None, None)

    rng = np.random.default_rng(cfg.seed + 1)
    params = net.weights + net.biases
    m = [np.zeros_like(p) for p in params]
    v = [np.zeros_like(p) for p in params]
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    step = 0

    best_val = np.inf
    best_net = net.copy()
    best_epoch = 0
    since_best = 0

    for epoch in range(cfg.epochs):
        order = rng.permutation(len(x_tr))
        epoch_loss = 0.0
        n_batches = 0
        for start in range(0, len(x_tr), cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            grad_w, grad_b, loss = gradients(net, x_tr[idx], y_tr[idx])
            if not np.isfinite(loss):
                raise TrainingError(
                    f"non-finite loss at epoch {epoch}, step {step} "
                    f"(lr={cfg.learning_rate}, seed={cfg.seed})"
                )
            epoch_loss += loss
            n_batches += 1
            step += 1
            grads = grad_w + grad_b
            for i, (p, g) in enumerate(zip(params, grads)):
                m[i] = beta1 * m[i] + (1 - beta1) * g
                v[i] = beta2 * v[i] + (1 - beta2) * g * g
                m_hat = m[i] / (1 - beta1**step)
                v_hat = v[i] / (1 - beta2**step)
                p -= cfg.learning_rate * m_hat / (np.sqrt(v_hat) + eps)
        trace.train.append(epoch_loss / n_batches)
        if use_val:
            val_loss = mse(forward(net, x_val), y_val)
            if not np.isfinite(val_loss):
                raise TrainingError(f"non-finite validation loss at epoch {epoch}")
            trace.validation.append(val_loss)
            if val_loss < best_val:
                best_val = val_loss
                best_net = net.copy()
                best_epoch = epoch
                since_best = 0
            else:
                since_best += 1
                if since_best > cfg.patience:
                    trace.stopped_epoch = epoch
                    return best_net, trace
    if use_val:
        trace.stopped_epoch = best_epoch
        return best_net, trace
    return net, trace


def with_seed(config: MlpConfig, seed: int) -> MlpConfig:
    return replace(config, seed=seed)
