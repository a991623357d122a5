"""Gated and plain perceptrons, softmax classifier, and their trainers.

A gated perceptron adds one input to an ordinary perceptron: the product of
all its inputs, weighted like any other input::

    sum = w . x + gate * prod(x) + bias

With ``gate_enabled=False`` the product term is dropped and the model is the
plain perceptron baseline.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .data import Dataset
from .errors import ConfigError, DataError, DimensionError, DivergenceError

WEIGHT_LIMIT = 1e12
PROB_CLIP = 1e-12


def _frozen(a, dtype=np.float64):
    arr = np.array(a, dtype=dtype, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class GatedModel:
    input_weights: np.ndarray
    gate_weight: float = 0.0
    bias: float = 0.0
    gate_enabled: bool = True

    def __post_init__(self):
        w = _frozen(self.input_weights)
        if w.ndim != 1 or w.size < 1:
            raise ConfigError("input_weights must be a non-empty 1-D sequence")
        object.__setattr__(self, "input_weights", w)
        object.__setattr__(self, "gate_weight", float(self.gate_weight))
        object.__setattr__(self, "bias", float(self.bias))
        object.__setattr__(self, "gate_enabled", bool(self.gate_enabled))

    @property
    def n_inputs(self) -> int:
        return self.input_weights.size

    @classmethod
    def zeros(cls, n_inputs: int, gate_enabled: bool = True) -> "GatedModel":
        return cls(np.zeros(n_inputs), 0.0, 0.0, gate_enabled)

    @classmethod
    def initial(cls, n_inputs: int, seed: int = 0, gate_enabled: bool = True) -> "GatedModel":
        """Weights (gate included) uniform in [-0.5, 0.5]; bias 0."""
        rng = np.random.default_rng([seed, 0])
        w = rng.uniform(-0.5, 0.5, size=n_inputs + 1)
        return cls(w[:n_inputs], w[n_inputs] if gate_enabled else 0.0, 0.0, gate_enabled)

    def parameters(self) -> np.ndarray:
        """Flat ``[w..., gate, bias]`` (gate omitted when disabled), matching :func:`design_matrix`."""
        if self.gate_enabled:
            return np.concatenate([self.input_weights, [self.gate_weight, self.bias]])
        return np.concatenate([self.input_weights, [self.bias]])

    def with_parameters(self, theta: np.ndarray) -> "GatedModel":
        n = self.n_inputs
        gate = theta[n] if self.gate_enabled else self.gate_weight
        return GatedModel(theta[:n], gate, theta[-1], self.gate_enabled)


@dataclass(frozen=True)
class SoftmaxModel:
    """``weights`` is C x m (m inputs, product column included), ``bias`` has length C."""

    weights: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        W = _frozen(self.weights)
        b = _frozen(self.bias)
        if W.ndim != 2 or W.shape[0] < 2:
            raise ConfigError("softmax weights must be C x m with C >= 2")
        if b.shape != (W.shape[0],):
            raise ConfigError("bias length must equal the class count")
        object.__setattr__(self, "weights", W)
        object.__setattr__(self, "bias", b)

    @property
    def n_classes(self) -> int:
        return self.weights.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.weights.shape[1]

    @classmethod
    def zeros(cls, n_classes: int, n_inputs: int) -> "SoftmaxModel":
        return cls(np.zeros((n_classes, n_inputs)), np.zeros(n_classes))

    @classmethod
    def initial(cls, n_classes: int, n_inputs: int, seed: int = 0) -> "SoftmaxModel":
        rng = np.random.default_rng([seed, 0])
        return cls(rng.uniform(-0.5, 0.5, size=(n_classes, n_inputs)), np.zeros(n_classes))


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float
    epochs: int
    seed: int = 0
    shuffle_each_epoch: bool = True

    def __post_init__(self):
        if not (self.learning_rate > 0 and np.isfinite(self.learning_rate)):
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if int(self.epochs) != self.epochs or self.epochs < 1:
            raise ConfigError(f"epochs must be a positive integer, got {self.epochs}")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")


@dataclass(frozen=True)
class LossTrace:
    per_epoch_loss: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "per_epoch_loss", _frozen(self.per_epoch_loss))

    def __len__(self):
        return self.per_epoch_loss.size

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("epoch,loss\n")
            for i, v in enumerate(self.per_epoch_loss, start=1):
                fh.write(f"{i},{v:.17g}\n")


# -- evaluation --------------------------------------------------------------


def sigmoid(z):
    """Logistic function without overflow for large ``|z|``."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out if out.ndim else float(out)


def gate_input(X):
    """Product of all features per row."""
    return np.prod(np.asarray(X, dtype=np.float64), axis=-1)


def _as_rows(model_inputs: int, x):
    X = np.asarray(x, dtype=np.float64)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.ndim != 2 or X.shape[1] != model_inputs:
        raise DimensionError(f"expected {model_inputs} features, got shape {np.shape(x)}")
    return X, single


def design_matrix(model: GatedModel, X) -> np.ndarray:
    """Rows ``[x..., prod(x), 1]`` (product column only when the gate is on)."""
    X, _ = _as_rows(model.n_inputs, X)
    cols = [X]
    if model.gate_enabled:
        cols.append(gate_input(X)[:, None])
    cols.append(np.ones((X.shape[0], 1)))
    return np.hstack(cols)


def weighted_sum(model: GatedModel, x):
    X, single = _as_rows(model.n_inputs, x)
    s = X @ model.input_weights + model.bias
    if model.gate_enabled:
        s = s + model.gate_weight * gate_input(X)
    return float(s[0]) if single else s


def sigmoid_predict(model: GatedModel, x):
    return sigmoid(weighted_sum(model, x))


def softmax(z):
    z = np.asarray(z, dtype=np.float64)
    e = np.exp(z - z.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def softmax_proba(model: SoftmaxModel, x):
    X, single = _as_rows(model.n_inputs, x)
    p = softmax(X @ model.weights.T + model.bias)
    return p[0] if single else p


def predict_class(model: SoftmaxModel, x):
    """Argmax of class probabilities; ``np.argmax`` already breaks ties toward the lowest index."""
    p = softmax_proba(model, x)
    if p.ndim == 1:
        return int(np.argmax(p))
    return np.argmax(p, axis=1)


def bce(labels, probs) -> float:
    p = np.clip(np.asarray(probs, dtype=np.float64), PROB_CLIP, 1.0 - PROB_CLIP)
    y = np.asarray(labels, dtype=np.float64)
    return float(np.mean(-(y * np.log(p) + (1.0 - y) * np.log1p(-p))))


# -- training ----------------------------------------------------------------


def _orders(n_rows: int, cfg: TrainConfig):
    rng = np.random.default_rng([cfg.seed, 1])
    base = np.arange(n_rows, dtype=np.int64)
    for _ in range(cfg.epochs):
        yield rng.permutation(n_rows) if cfg.shuffle_each_epoch else base


def _guard(theta, epoch):
    if not np.all(np.isfinite(theta)) or np.max(np.abs(theta)) > WEIGHT_LIMIT:
        raise DivergenceError(f"weights diverged at epoch {epoch}")


def _check_dims(model_inputs: int, data: Dataset):
    if data.n_features != model_inputs:
        raise DimensionError(
            f"model has {model_inputs} inputs but dataset has {data.n_features} features"
        )


def train_binary(model: GatedModel, data: Dataset, cfg: TrainConfig):
    """Per-sample delta rule through the sigmoid: ``w += lr * (t - y) * y * (1 - y) * input``.

    Mean binary cross-entropy over ``data`` is recorded after every epoch.
    """
    _check_dims(model.n_inputs, data)
    labels = data.labels
    if not np.all((labels == 0) | (labels == 1)):
        raise ConfigError("train_binary needs 0/1 labels")
    A = design_matrix(model, data.features)
    target = labels.astype(np.float64)
    theta = model.parameters()
    losses = np.empty(cfg.epochs)
    for epoch, order in enumerate(_orders(data.n_rows, cfg)):
        kernels.delta_epoch(A, target, order, theta, cfg.learning_rate)
        _guard(theta, epoch + 1)
        losses[epoch] = bce(target, sigmoid(A @ theta))
    return model.with_parameters(theta), LossTrace(losses)


def sign_errors(model: GatedModel, data: Dataset) -> np.ndarray:
    """Boolean mask of rows whose raw-sum sign (0 counts as +) disagrees with the +-1 label."""
    s = weighted_sum(model, data.features)
    return np.where(s >= 0, 1, -1) != data.labels


def train_region(model: GatedModel, data: Dataset, cfg: TrainConfig, keep_best: bool = True):
    """Drive the sign of the raw weighted sum toward +-1 targets.

    Each misclassified visit applies ``w += lr * (target - sum) * input``.
    Training stops early after an epoch with no updates. With ``keep_best``
    the epoch-end weights with the fewest sign errors are returned (earliest
    wins on ties); the initial weights count as epoch 0.
    """
    if model.n_inputs != 2 or data.n_features != 2:
        raise ConfigError("region training needs exactly 2 features")
    labels = data.labels
    if not np.all((labels == 1) | (labels == -1)):
        raise ConfigError("region training needs +1/-1 labels")
    A = design_matrix(model, data.features)
    target = labels.astype(np.float64)
    theta = model.parameters()

    def n_wrong(t):
        return int(np.count_nonzero(np.where(A @ t >= 0, 1.0, -1.0) != target))

    best_theta, best_err = theta.copy(), n_wrong(theta)
    for epoch, order in enumerate(_orders(data.n_rows, cfg)):
        if best_err == 0 and keep_best:
            break
        updates = kernels.region_epoch(A, target, order, theta, cfg.learning_rate)
        _guard(theta, epoch + 1)
        if updates == 0:
            break
        err = n_wrong(theta)
        if err < best_err:
            best_theta, best_err = theta.copy(), err
    return model.with_parameters(best_theta if keep_best else theta)


def train_softmax(model: SoftmaxModel, data: Dataset, cfg: TrainConfig):
    """Per-sample update ``W[c] += lr * (onehot_c - p_c) * input``; bias uses input 1."""
    _check_dims(model.n_inputs, data)
    labels = data.labels
    C = model.n_classes
    if labels.min() < 0 or labels.max() >= C:
        raise DataError(f"labels must lie in 0..{C - 1}")
    A = np.hstack([data.features, np.ones((data.n_rows, 1))])
    W = np.hstack([model.weights, model.bias[:, None]])
    losses = np.empty(cfg.epochs)
    rows = np.arange(data.n_rows)
    for epoch, order in enumerate(_orders(data.n_rows, cfg)):
        kernels.softmax_epoch(A, labels, order, W, cfg.learning_rate)
        _guard(W, epoch + 1)
        p = softmax(A @ W.T)
        losses[epoch] = float(np.mean(-np.log(np.clip(p[rows, labels], PROB_CLIP, 1.0))))
    return SoftmaxModel(W[:, :-1], W[:, -1]), LossTrace(losses)


# -- serialization -----------------------------------------------------------

_GATED_MAGIC = "gatedmodel v1"
_SOFTMAX_MAGIC = "softmaxmodel v1"


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def dumps_model(model) -> str:
    if isinstance(model, GatedModel):
        lines = [_GATED_MAGIC]
        lines += [f"w{i}={_fmt(v)}" for i, v in enumerate(model.input_weights, start=1)]
        lines += [
            f"gate={_fmt(model.gate_weight)}",
            f"bias={_fmt(model.bias)}",
            f"gate_enabled={'true' if model.gate_enabled else 'false'}",
        ]
    elif isinstance(model, SoftmaxModel):
        lines = [_SOFTMAX_MAGIC, f"classes={model.n_classes}", f"inputs={model.n_inputs}"]
        for c in range(model.n_classes):
            lines += [f"w{c}_{j}={_fmt(v)}" for j, v in enumerate(model.weights[c], start=1)]
            lines.append(f"b{c}={_fmt(model.bias[c])}")
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    return "\n".join(lines) + "\n"


def loads_model(text: str):
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise DataError("empty model file")
    magic, body = lines[0], lines[1:]
    kv = {}
    for ln in body:
        key, sep, val = ln.partition("=")
        if not sep:
            raise DataError(f"malformed model line {ln!r}")
        kv[key.strip()] = val.strip()
    try:
        if magic == _GATED_MAGIC:
            n = sum(1 for k in kv if k.startswith("w"))
            w = [float(kv[f"w{i}"]) for i in range(1, n + 1)]
            enabled = kv.get("gate_enabled", "true").lower() in {"true", "1", "yes"}
            return GatedModel(w, float(kv["gate"]), float(kv["bias"]), enabled)
        if magic == _SOFTMAX_MAGIC:
            C, m = int(kv["classes"]), int(kv["inputs"])
            W = [[float(kv[f"w{c}_{j}"]) for j in range(1, m + 1)] for c in range(C)]
            b = [float(kv[f"b{c}"]) for c in range(C)]
            return SoftmaxModel(W, b)
    except KeyError as exc:
        raise DataError(f"model file missing field {exc.args[0]!r}") from None
    raise DataError(f"unknown model format {magic!r}")


def save_model(model, path) -> None:
    Path(path).write_text(dumps_model(model))


def load_model(path):
    return loads_model(Path(path).read_text())
