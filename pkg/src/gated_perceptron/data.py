"""Dataset loading, schemas, imputation, min-max scaling and seeded splits."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigError, DataError

IRIS_COLUMNS = ("sepal_length", "sepal_width", "petal_length", "petal_width")
PIMA_COLUMNS = (
    "pregnancies",
    "glucose",
    "blood_pressure",
    "skin_thickness",
    "insulin",
    "bmi",
    "diabetes_pedigree",
    "age",
)
_WDBC_BASE = (
    "radius",
    "texture",
    "perimeter",
    "area",
    "smoothness",
    "compactness",
    "concavity",
    "concave_points",
    "symmetry",
    "fractal_dimension",
)
WDBC_COLUMNS = tuple(f"{b}_{s}" for s in ("mean", "se", "worst") for b in _WDBC_BASE)

# PIMA physiological columns where a recorded 0 means "not measured"
PIMA_ZERO_MISSING = ("glucose", "blood_pressure", "skin_thickness", "insulin", "bmi")


@dataclass(frozen=True)
class Dataset:
    """Feature matrix with integer labels.

    ``norm_stats`` holds one ``(min, max)`` row per column once
    :func:`normalize` has been applied, otherwise ``None``.
    """

    features: np.ndarray
    labels: np.ndarray
    column_names: tuple[str, ...]
    norm_stats: np.ndarray | None = None

    def __post_init__(self):
        X = np.array(self.features, dtype=np.float64, copy=True)
        y = np.array(self.labels, dtype=np.int64, copy=True)
        if X.ndim != 2:
            raise DataError(f"features must be 2-D, got shape {X.shape}")
        if X.shape[0] < 1:
            raise DataError("dataset must contain at least one row")
        if y.shape != (X.shape[0],):
            raise DataError(f"{y.shape[0]} labels for {X.shape[0]} rows")
        if len(self.column_names) != X.shape[1]:
            raise DataError(
                f"{len(self.column_names)} column names for {X.shape[1]} columns"
            )
        if not np.all(np.isfinite(X)):
            raise DataError("features contain non-finite values")
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "column_names", tuple(self.column_names))
        if self.norm_stats is not None:
            s = np.array(self.norm_stats, dtype=np.float64, copy=True)
            s.flags.writeable = False
            object.__setattr__(self, "norm_stats", s)

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def take(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return replace(self, features=self.features[idx], labels=self.labels[idx])

    def to_csv(self, path) -> None:
        """Write features and integer label as a headed CSV (17 significant digits)."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(list(self.column_names) + ["label"])
            for row, lab in zip(self.features, self.labels):
                w.writerow([format(v, ".17g") for v in row] + [int(lab)])


@dataclass(frozen=True)
class DatasetSchema:
    name: str
    label_column: int
    label_mapping: Mapping[str, int] | None
    column_names: tuple[str, ...] | None = None
    dropped_columns: tuple[int, ...] = ()
    skipped_labels: frozenset[str] = frozenset()
    zero_as_missing: tuple[str, ...] = ()
    n_columns: int | None = None

    @property
    def classes(self) -> tuple[int, ...] | None:
        if self.label_mapping is None:
            return None
        return tuple(sorted(set(self.label_mapping.values())))


def _iris_mapping(values):
    names = ("setosa", "versicolor", "virginica")
    out = {}
    for name, v in zip(names, values):
        if v is None:
            continue
        out[f"Iris-{name}"] = v
        out[name] = v
    return out


SCHEMAS: dict[str, DatasetSchema] = {
    "iris-2class": DatasetSchema(
        "iris-2class",
        label_column=4,
        label_mapping=_iris_mapping((1, -1, None)),
        column_names=IRIS_COLUMNS,
        skipped_labels=frozenset({"Iris-virginica", "virginica"}),
        n_columns=5,
    ),
    "iris-3class-regression": DatasetSchema(
        "iris-3class-regression",
        label_column=4,
        label_mapping=_iris_mapping((1, -1, 1)),
        column_names=IRIS_COLUMNS,
        n_columns=5,
    ),
    "iris-multiclass": DatasetSchema(
        "iris-multiclass",
        label_column=4,
        label_mapping=_iris_mapping((0, 1, 2)),
        column_names=IRIS_COLUMNS,
        n_columns=5,
    ),
    "wdbc": DatasetSchema(
        "wdbc",
        label_column=1,
        label_mapping={"M": 1, "B": 0},
        column_names=WDBC_COLUMNS,
        dropped_columns=(0,),
        n_columns=32,
    ),
    "pima": DatasetSchema(
        "pima",
        label_column=8,
        label_mapping={"0": 0, "1": 1},
        column_names=PIMA_COLUMNS,
        zero_as_missing=PIMA_ZERO_MISSING,
        n_columns=9,
    ),
    "generic": DatasetSchema("generic", label_column=-1, label_mapping=None),
}

_BUNDLED = {
    "iris-2class": "iris.csv",
    "iris-3class-regression": "iris.csv",
    "iris-multiclass": "iris.csv",
    "wdbc": "wdbc.csv",
    "pima": "pima.csv",
}


def get_schema(schema: str | DatasetSchema) -> DatasetSchema:
    if isinstance(schema, DatasetSchema):
        return schema
    try:
        return SCHEMAS[schema]
    except KeyError:
        raise ConfigError(
            f"unknown schema {schema!r}; expected one of {sorted(SCHEMAS)}"
        ) from None


def bundled_path(schema: str) -> Path:
    """Path of the CSV shipped with the package for a named schema."""
    try:
        name = _BUNDLED[schema]
    except KeyError:
        raise ConfigError(f"no bundled data for schema {schema!r}") from None
    return Path(str(resources.files("gated_perceptron") / "datasets" / name))


def _is_number(tok: str) -> bool:
    try:
        float(tok)
    except ValueError:
        return False
    return True


def _canonical_label(tok: str) -> str:
    tok = tok.strip()
    if _is_number(tok) and float(tok).is_integer():
        return str(int(float(tok)))
    return tok


def load_csv(path, schema: str | DatasetSchema) -> Dataset:
    """Parse a UCI-style CSV according to ``schema``.

    A first row whose feature fields are not all numeric is taken as a header.
    """
    schema = get_schema(schema)
    path = Path(path)
    if not path.exists():
        raise DataError(f"data file not found: {path}")
    with open(path, newline="") as fh:
        rows = [(i, r) for i, r in enumerate(csv.reader(fh), start=1) if r and any(c.strip() for c in r)]
    if not rows:
        raise DataError(f"{path}: no data rows")

    width = schema.n_columns or len(rows[0][1])
    label_col = schema.label_column % width
    feat_cols = [c for c in range(width) if c != label_col and c not in schema.dropped_columns]

    header = None
    first = rows[0][1]
    if len(first) == width and not all(_is_number(first[c]) for c in feat_cols):
        header = [first[c].strip() for c in feat_cols]
        rows = rows[1:]

    feats, labels = [], []
    for lineno, row in rows:
        if len(row) != width:
            raise DataError(f"{path}:{lineno}: expected {width} fields, got {len(row)}")
        tok = _canonical_label(row[label_col])
        if tok in schema.skipped_labels:
            continue
        if schema.label_mapping is None:
            try:
                lab = int(tok)
            except ValueError:
                raise DataError(f"{path}:{lineno}: unknown label token {tok!r}") from None
        else:
            if tok not in schema.label_mapping:
                raise DataError(f"{path}:{lineno}: unknown label token {tok!r}")
            lab = schema.label_mapping[tok]
        try:
            feats.append([float(row[c]) for c in feat_cols])
        except ValueError:
            raise DataError(f"{path}:{lineno}: non-numeric feature value") from None
        labels.append(lab)

    if not feats:
        raise DataError(f"{path}: no rows left after label filtering")
    names = schema.column_names or header or tuple(f"x{j + 1}" for j in range(len(feat_cols)))
    return Dataset(np.array(feats), np.array(labels), tuple(names))


def load_bundled(schema: str) -> Dataset:
    return load_csv(bundled_path(schema), schema)


def impute_missing(data: Dataset, schema: str | DatasetSchema, fit_indices) -> Dataset:
    """Replace zeros in the schema's missing-value columns by the fit-row median of non-zeros."""
    schema = get_schema(schema)
    fit = np.asarray(fit_indices, dtype=np.int64)
    if fit.size == 0:
        raise DataError("fit_indices must be non-empty")
    if not schema.zero_as_missing:
        return data
    X = data.features.copy()
    for name in schema.zero_as_missing:
        j = data.column_names.index(name)
        ref = X[fit, j]
        ref = ref[ref != 0]
        if ref.size == 0:
            raise DataError(f"column {name!r}: all fit values are zero, median undefined")
        X[X[:, j] == 0, j] = np.median(ref)
    return replace(data, features=X)


def normalize(data: Dataset, fit_indices, feature_range=(0.0, 1.0)) -> Dataset:
    """Per-column min-max scaling with statistics taken from ``fit_indices`` only.

    Constant columns map to the lower end of ``feature_range``. Rows outside
    the fit set are scaled with the same statistics and are not clamped.
    """
    fit = np.asarray(fit_indices, dtype=np.int64)
    if fit.size == 0:
        raise DataError("fit_indices must be non-empty")
    lo, hi = feature_range
    X = data.features
    mn = X[fit].min(axis=0)
    mx = X[fit].max(axis=0)
    span = mx - mn
    safe = np.where(span > 0, span, 1.0)
    unit = np.where(span > 0, (X - mn) / safe, 0.0)
    return replace(data, features=lo + (hi - lo) * unit, norm_stats=np.column_stack([mn, mx]))


def append_product_feature(data: Dataset, name: str = "product") -> Dataset:
    prod = np.prod(data.features, axis=1)
    return replace(
        data,
        features=np.column_stack([data.features, prod]),
        column_names=data.column_names + (name,),
        norm_stats=None,
    )


@dataclass(frozen=True)
class SplitSpec:
    test_fraction: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigError(f"test_fraction must lie in (0, 1), got {self.test_fraction}")


def split_indices(n_rows: int, spec: SplitSpec) -> tuple[np.ndarray, np.ndarray]:
    if n_rows < 2:
        raise DataError("need at least 2 rows to split")
    # round away float noise such as 10 * 0.8 == 8.000000000000002 before the ceiling
    n_train = math.ceil(round(n_rows * (1.0 - spec.test_fraction), 9))
    if n_train <= 0 or n_train >= n_rows:
        raise ConfigError(
            f"test_fraction {spec.test_fraction} leaves an empty side for {n_rows} rows"
        )
    perm = np.random.default_rng([spec.seed, 2]).permutation(n_rows)
    return perm[:n_train], perm[n_train:]


def split(data: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    train_idx, test_idx = split_indices(data.n_rows, spec)
    return data.take(train_idx), data.take(test_idx)


@dataclass
class PreparedSplit:
    """Train/test views after impute and normalize, with the indices used."""

    train: Dataset
    test: Dataset
    train_idx: np.ndarray
    test_idx: np.ndarray
    full: Dataset = field(repr=False)


def prepare(
    data: Dataset,
    schema: str | DatasetSchema,
    spec: SplitSpec,
    product_feature: bool = False,
) -> PreparedSplit:
    """load -> impute -> split -> (product) -> normalize, statistics from the train side."""
    train_idx, test_idx = split_indices(data.n_rows, spec)
    data = impute_missing(data, schema, train_idx)
    if product_feature:
        data = append_product_feature(data)
    data = normalize(data, train_idx)
    return PreparedSplit(data.take(train_idx), data.take(test_idx), train_idx, test_idx, data)


def class_counts(labels: Sequence[int]) -> dict[int, int]:
    vals, counts = np.unique(np.asarray(labels), return_counts=True)
    return {int(v): int(c) for v, c in zip(vals, counts)}
