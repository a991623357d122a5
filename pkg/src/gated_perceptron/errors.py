class GatedPerceptronError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(GatedPerceptronError, ValueError):
    """Invalid hyper-parameters or unsupported combination of options."""

    exit_code = 2


class DataError(GatedPerceptronError, ValueError):
    """Malformed input file, unknown label, or inconsistent dataset."""

    exit_code = 3


class DimensionError(DataError):
    """Feature vector length does not match the model."""


class DivergenceError(GatedPerceptronError, ArithmeticError):
    """Weights became non-finite or exceeded the magnitude guard."""

    exit_code = 4


class DegenerateGeometryError(GatedPerceptronError, ValueError):
    """Boundary is undefined (all boundary weights zero)."""

    exit_code = 5
