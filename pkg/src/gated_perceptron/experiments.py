"""End-to-end pipelines behind the CLI subcommands."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import metrics
from .data import Dataset, SplitSpec, get_schema, load_bundled, load_csv, normalize, prepare
from .errors import ConfigError, DataError
from .model import (
    GatedModel,
    LossTrace,
    SoftmaxModel,
    TrainConfig,
    predict_class,
    sign_errors,
    sigmoid_predict,
    train_binary,
    train_region,
    train_softmax,
    weighted_sum,
)

BINARY_SCHEMAS = ("wdbc", "pima")
DEFAULTS = {
    "gated": {"lr": 0.5, "epochs": 100},
    "plain": {"lr": 0.5, "epochs": 100},
    "softmax": {"lr": 0.01, "epochs": 1000},
    "region": {"lr": 0.05, "epochs": 40},
    "xor": {"lr": 0.1, "epochs": 10000},
}

# Weights published for the XOR example. On the four corners they are positive
# exactly where x1 == 1, which is not the XOR partition.
PUBLISHED_XOR_WEIGHTS = GatedModel([0.1, -0.2], 1.0, -0.01, True)
XOR_POINTS = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
XOR_TARGETS = np.array([1, -1, -1, 1])


def load_data(schema: str, path=None) -> Dataset:
    return load_bundled(schema) if path is None else load_csv(path, schema)


def check_pair(schema: str, kind: str) -> None:
    get_schema(schema)
    if kind == "softmax" and schema != "iris-multiclass":
        raise ConfigError("the softmax model requires the iris-multiclass schema")
    if kind in ("gated", "plain") and schema not in BINARY_SCHEMAS:
        raise ConfigError(f"{kind} binary training needs one of {BINARY_SCHEMAS}, got {schema!r}")


# -- binary sigmoid ----------------------------------------------------------


@dataclass
class BinaryRun:
    seed: int
    model: GatedModel
    trace: LossTrace
    report: metrics.MetricReport
    roc: metrics.RocCurve
    test_gate_inputs: np.ndarray = field(repr=False)


def run_binary(data: Dataset, schema: str, gated: bool, lr: float, epochs: int,
               seed: int, test_fraction: float = 0.2) -> BinaryRun:
    prep = prepare(data, schema, SplitSpec(test_fraction, seed))
    cfg = TrainConfig(lr, epochs, seed)
    model = GatedModel.initial(prep.train.n_features, seed, gate_enabled=gated)
    model, trace = train_binary(model, prep.train, cfg)
    scores = sigmoid_predict(model, prep.test.features)
    report, roc = metrics.evaluate_binary(prep.test.labels, scores)
    gate_in = np.prod(prep.test.features, axis=1)
    return BinaryRun(seed, model, trace, report, roc, gate_in)


# -- softmax -----------------------------------------------------------------


@dataclass
class SoftmaxRun:
    seed: int
    model: SoftmaxModel
    trace: LossTrace
    confusion: np.ndarray
    accuracy: float

    def to_dict(self) -> dict:
        return {"seed": self.seed, "accuracy": self.accuracy,
                "confusion": self.confusion.tolist()}


def run_softmax(data: Dataset, lr: float, epochs: int, seed: int,
                test_fraction: float = 0.2) -> SoftmaxRun:
    prep = prepare(data, "iris-multiclass", SplitSpec(test_fraction, seed), product_feature=True)
    n_classes = int(data.labels.max()) + 1
    model = SoftmaxModel.initial(n_classes, prep.train.n_features, seed)
    model, trace = train_softmax(model, prep.train, TrainConfig(lr, epochs, seed))
    pred = predict_class(model, prep.test.features)
    cm = metrics.multiclass_confusion(prep.test.labels, pred, n_classes)
    return SoftmaxRun(seed, model, trace, cm, metrics.confusion_accuracy(cm))


# -- repeated runs -----------------------------------------------------------


@dataclass
class ReproReport:
    kind: str
    schema: str
    runs: list
    mean: dict

    def check(self, tol: float = 1e-9) -> None:
        """The mean row must equal the arithmetic mean of the per-run rows."""
        for key, value in self.mean.items():
            expected = float(np.mean([r[key] for r in self.runs]))
            if abs(expected - value) > tol:
                raise DataError(f"mean row inconsistent for {key}: {value} vs {expected}")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "schema": self.schema, "runs": self.runs, "mean": self.mean}

    def table(self) -> str:
        if self.kind == "softmax":
            lines = [f"{'seed':>6} {'accuracy':>9}"]
            lines += [f"{r['seed']:>6} {r['accuracy']:>9.4f}" for r in self.runs]
            lines.append(f"{'Mean':>6} {self.mean['accuracy']:>9.4f}")
            return "\n".join(lines)
        head = f"{'seed':>6} {'TP':>5} {'TN':>5} {'FP':>5} {'FN':>5} " \
               f"{'Ac':>6} {'Pr':>6} {'Rec':>6} {'F1':>6} {'AUC':>6}"
        lines = [head]
        for r in self.runs:
            lines.append(
                f"{r['seed']:>6} {r['tp']:>5} {r['tn']:>5} {r['fp']:>5} {r['fn']:>5} "
                f"{r['accuracy']:>6.3f} {r['precision']:>6.3f} {r['recall']:>6.3f} "
                f"{r['f1']:>6.3f} {r['auc']:>6.3f}"
            )
        m = self.mean
        lines.append(
            f"{'Mean':>6} {m['tp']:>5.1f} {m['tn']:>5.1f} {m['fp']:>5.1f} {m['fn']:>5.1f} "
            f"{m['accuracy']:>6.3f} {m['precision']:>6.3f} {m['recall']:>6.3f} "
            f"{m['f1']:>6.3f} {m['auc']:>6.3f}"
        )
        return "\n".join(lines)


def repro(data: Dataset, schema: str, kind: str, lr: float, epochs: int, seed: int = 0,
          reps: int = 10, test_fraction: float = 0.2, jobs: int = 1) -> ReproReport:
    """Run the pipeline with seeds ``seed .. seed+reps-1``; rows are ordered by seed."""
    check_pair(schema, kind)
    if reps < 1:
        raise ConfigError("reps must be >= 1")
    seeds = [seed + i for i in range(reps)]

    def one(s):
        if kind == "softmax":
            return run_softmax(data, lr, epochs, s, test_fraction).to_dict()
        run = run_binary(data, schema, kind == "gated", lr, epochs, s, test_fraction)
        return {"seed": s, **run.report.to_dict()}

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            runs = list(pool.map(one, seeds))
    else:
        runs = [one(s) for s in seeds]

    if kind == "softmax":
        mean = {"accuracy": float(np.mean([r["accuracy"] for r in runs]))}
    else:
        mean = metrics.mean_row(runs)
    report = ReproReport(kind, schema, runs, mean)
    report.check()
    return report


# -- region regression -------------------------------------------------------


def to_raw_coordinates(model: GatedModel, stats: np.ndarray, feature_range) -> GatedModel:
    """Express a model trained on min-max scaled inputs in the original units.

    Each axis is affine, ``u = a*x + c``, so the gated form is preserved.
    """
    lo, hi = feature_range
    span = np.where(stats[:, 1] > stats[:, 0], stats[:, 1] - stats[:, 0], np.inf)
    a = (hi - lo) / span
    c = lo - a * stats[:, 0]
    w1, w2 = model.input_weights
    g = model.gate_weight if model.gate_enabled else 0.0
    return GatedModel(
        [w1 * a[0] + g * a[0] * c[1], w2 * a[1] + g * c[0] * a[1]],
        g * a[0] * a[1],
        w1 * c[0] + w2 * c[1] + g * c[0] * c[1] + model.bias,
        model.gate_enabled,
    )


@dataclass
class RegionRun:
    model: GatedModel
    raw_model: GatedModel
    data: Dataset
    misclassified: dict
    raw_names: tuple

    @property
    def total_misclassified(self) -> int:
        return sum(self.misclassified.values())


IRIS_CLASS_NAMES = ("Iris-setosa", "Iris-versicolor", "Iris-virginica")
REGION_RANGE = (-1.0, 1.0)


def run_iris_region(columns=(3, 4), classes: int = 3, lr: float = 0.05, epochs: int = 40,
                    seed: int = 0, gated: bool = True, path=None) -> RegionRun:
    """Region regression on two Iris columns (1-based), targets +1/-1/+1 per class."""
    if classes not in (2, 3):
        raise ConfigError("classes must be 2 or 3")
    i, j = columns
    if not (1 <= i <= 4 and 1 <= j <= 4) or i == j:
        raise ConfigError(f"columns must be two distinct values in 1..4, got {columns}")
    multi = load_data("iris-multiclass", path)
    keep = multi.labels < classes
    species = multi.labels[keep]
    feats = multi.features[keep][:, [i - 1, j - 1]]
    targets = np.where(species == 1, -1, 1)
    names = (multi.column_names[i - 1], multi.column_names[j - 1])
    data = normalize(Dataset(feats, targets, names), np.arange(feats.shape[0]), REGION_RANGE)
    model = GatedModel.initial(2, seed, gate_enabled=gated)
    model = train_region(model, data, TrainConfig(lr, epochs, seed))
    wrong = sign_errors(model, data)
    mis = {IRIS_CLASS_NAMES[c]: int(np.sum(wrong[species == c])) for c in range(classes)}
    raw = to_raw_coordinates(model, data.norm_stats, REGION_RANGE)
    return RegionRun(model, raw, data, mis, names)


# -- XOR ---------------------------------------------------------------------


def xor_dataset() -> Dataset:
    return Dataset(XOR_POINTS, XOR_TARGETS, ("x1", "x2"))


def xor_satisfied(model: GatedModel) -> bool:
    s = weighted_sum(model, XOR_POINTS)
    return bool(np.all(np.where(s >= 0, 1, -1) == XOR_TARGETS))


def run_xor(gated: bool = True, lr: float = 0.1, epochs: int = 10000, seed: int = 0) -> GatedModel:
    model = GatedModel.initial(2, seed, gate_enabled=gated)
    return train_region(model, xor_dataset(), TrainConfig(lr, epochs, seed))
