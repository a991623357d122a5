"""Decision-region geometry for 2-input gated perceptrons.

The zero set of ``w1*x1 + w2*x2 + g*x1*x2 + b`` is a rectangular hyperbola
with asymptotes ``x1 = -w2/g`` and ``x2 = -w1/g`` (a line when ``g == 0``).
Regions are counted by rasterizing the sign tuple of k models over a window
and labelling 4-connected components of equal tuples.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Sequence

import numpy as np

from . import kernels
from .errors import ConfigError, DegenerateGeometryError
from .model import GatedModel

DEFAULT_RESOLUTION = 2000


@dataclass(frozen=True)
class Window:
    x_min: float = 0.0
    x_max: float = 1.0
    y_min: float = 0.0
    y_max: float = 1.0
    resolution: int = DEFAULT_RESOLUTION

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ConfigError("window bounds must satisfy x_min < x_max and y_min < y_max")
        if int(self.resolution) != self.resolution or self.resolution < 2:
            raise ConfigError("resolution must be an integer >= 2")

    @classmethod
    def parse(cls, text: str, resolution: int = DEFAULT_RESOLUTION) -> "Window":
        try:
            x0, x1, y0, y1 = (float(t) for t in text.split(","))
        except ValueError:
            raise ConfigError(f"window must be 'x0,x1,y0,y1', got {text!r}") from None
        return cls(x0, x1, y0, y1, resolution)

    def with_resolution(self, resolution: int) -> "Window":
        return Window(self.x_min, self.x_max, self.y_min, self.y_max, resolution)

    def centers(self):
        r = self.resolution
        dx = (self.x_max - self.x_min) / r
        dy = (self.y_max - self.y_min) / r
        xs = self.x_min + (np.arange(r) + 0.5) * dx
        ys = self.y_min + (np.arange(r) + 0.5) * dy
        return xs, ys


@dataclass(frozen=True)
class BoundaryPolyline:
    branches: tuple[np.ndarray, ...]
    asymptote_x: float | None = None
    asymptote_y: float | None = None

    def to_csv(self, path, model_id: int | None = None) -> None:
        with open(path, "w") as fh:
            fh.write(("model_id," if model_id is not None else "") + "branch_id,x1,x2\n")
            prefix = f"{model_id}," if model_id is not None else ""
            for b, pts in enumerate(self.branches):
                for x1, x2 in pts:
                    fh.write(f"{prefix}{b},{x1:.17g},{x2:.17g}\n")


@dataclass(frozen=True)
class RegionRaster:
    """``cell_labels[i, j]`` is the region of the cell at row ``i`` (y) and column ``j`` (x)."""

    cell_labels: np.ndarray
    sign_vectors: dict[int, tuple[int, ...]]
    region_count: int
    window: Window

    def to_pgm(self, path) -> None:
        """ASCII PGM, one gray level per region id, top row = ``y_max``."""
        rows, cols = self.cell_labels.shape
        maxval = max(self.region_count - 1, 1)
        img = self.cell_labels[::-1]
        with open(path, "w") as fh:
            fh.write(f"P2\n{cols} {rows}\n{maxval}\n")
            for row in img:
                fh.write(" ".join(map(str, row.tolist())))
                fh.write("\n")

    def sign_json(self) -> str:
        payload = {
            "region_count": self.region_count,
            "regions": {str(k): list(v) for k, v in sorted(self.sign_vectors.items())},
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def _boundary_coeffs(model: GatedModel):
    if model.n_inputs != 2:
        raise ConfigError("region geometry needs 2-input models")
    w1, w2 = model.input_weights
    g = model.gate_weight if model.gate_enabled else 0.0
    return float(w1), float(w2), float(g), model.bias


def boundary_curve(model: GatedModel, window: Window, samples: int = 1000) -> BoundaryPolyline:
    """Sample the zero set ``x2 = -(w1*x1 + b) / (g*x1 + w2)`` across the window.

    The curve is split into two branches at the vertical asymptote; samples
    closer to it than ``width / samples`` are dropped.
    """
    w1, w2, g, b = _boundary_coeffs(model)
    if w1 == 0.0 and w2 == 0.0 and g == 0.0:
        raise DegenerateGeometryError("all boundary weights are zero")
    if samples < 2:
        raise ConfigError("samples must be >= 2")
    xs = np.linspace(window.x_min, window.x_max, samples)

    if g == 0.0:
        if w2 == 0.0:
            ys = np.linspace(window.y_min, window.y_max, samples)
            pts = np.column_stack([np.full(samples, -b / w1), ys])
        else:
            pts = np.column_stack([xs, -(w1 * xs + b) / w2])
        return BoundaryPolyline((pts,))

    ax, ay = -w2 / g, -w1 / g
    radius = (window.x_max - window.x_min) / samples
    keep = np.abs(xs - ax) >= radius
    xs = xs[keep]
    ys = -(w1 * xs + b) / (g * xs + w2)
    branches = []
    for side in (xs < ax, xs > ax):
        if np.any(side):
            branches.append(np.column_stack([xs[side], ys[side]]))
    return BoundaryPolyline(tuple(branches), ax, ay)


def sign_codes(models: Sequence[GatedModel], window: Window) -> np.ndarray:
    """Bit ``k`` of each cell is set where model ``k``'s sum is >= 0 at the cell center."""
    if len(models) < 1:
        raise ConfigError("need at least one model")
    if len(models) > 32:
        raise ConfigError("at most 32 models per raster")
    xs, ys = window.centers()
    codes = np.zeros((ys.size, xs.size), dtype=np.uint32)
    for k, m in enumerate(models):
        w1, w2, g, b = _boundary_coeffs(m)
        # sum = (w1 + g*y) * x + (w2*y + b), evaluated row-wise
        s = (w1 + g * ys)[:, None] * xs[None, :] + (w2 * ys + b)[:, None]
        codes |= (s >= 0).astype(np.uint32) << np.uint32(k)
    return codes


def rasterize_signs(models: Sequence[GatedModel], window: Window) -> RegionRaster:
    codes = sign_codes(models, window)
    labels, count = kernels.label_components(codes)
    count = int(count)
    flat_labels = labels.ravel()
    _, first = np.unique(flat_labels, return_index=True)
    flat_codes = codes.ravel()
    k = len(models)
    vectors = {}
    for rid, idx in enumerate(first):
        code = int(flat_codes[idx])
        vectors[rid] = tuple(1 if (code >> j) & 1 else -1 for j in range(k))
    return RegionRaster(labels, vectors, count, window)


def count_regions(models: Sequence[GatedModel], window: Window, resolution: int | None = None) -> int:
    if resolution is not None:
        window = window.with_resolution(resolution)
    return rasterize_signs(models, window).region_count


# -- committed fixtures ------------------------------------------------------


def _model_from_json(obj) -> GatedModel:
    return GatedModel(obj["w"], obj.get("gate", 0.0), obj["bias"], obj.get("gate_enabled", True))


def load_fixtures() -> dict:
    path = resources.files("gated_perceptron") / "fixtures" / "regions.json"
    return json.loads(path.read_text())


def fixture_names() -> list[str]:
    return sorted(load_fixtures())


def load_fixture(name: str):
    """Return ``(models, window, expected_count)`` for a named fixture."""
    fixtures = load_fixtures()
    if name not in fixtures:
        raise ConfigError(f"unknown fixture {name!r}; available: {sorted(fixtures)}")
    fx = fixtures[name]
    window = Window(*fx["window"])
    return [_model_from_json(m) for m in fx["models"]], window, fx["expected"]
