"""Gated perceptron: a perceptron with an extra input equal to the product of its inputs."""

from ._accel import USE_NUMBA, backend_name
from .data import Dataset, DatasetSchema, SplitSpec, load_bundled, load_csv
from .errors import (
    ConfigError,
    DataError,
    DegenerateGeometryError,
    DimensionError,
    DivergenceError,
    GatedPerceptronError,
)
from .model import (
    GatedModel,
    LossTrace,
    SoftmaxModel,
    TrainConfig,
    predict_class,
    sigmoid_predict,
    train_binary,
    train_region,
    train_softmax,
    weighted_sum,
)

__version__ = "0.1.0"
