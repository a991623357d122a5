"""Random search for generic gated/plain configurations in the unit window.

Hyperbolas are drawn as ``(x1 - a)(x2 - c) = k``, i.e. gate 1, w1 = -c,
w2 = -a, bias = a*c - k. A candidate is kept when its region count reaches
the target at every resolution in CHECK, and every region covers at least
MIN_AREA of the window.
Prints JSON ready for ``src/gated_perceptron/fixtures/regions.json``.
"""

import json
import sys

import numpy as np

from gated_perceptron.model import GatedModel
from gated_perceptron.regions import Window, count_regions, rasterize_signs

CHECK = (100, 150, 200, 300, 400, 500, 700, 1000, 1234, 1500, 1777, 2000, 2500, 3000, 3333, 4000)
MIN_AREA = 0.005


def hyperbola(rng):
    a, c = rng.uniform(0.2, 0.8, size=2)
    k = rng.choice([-1, 1]) * rng.uniform(0.01, 0.06)
    return GatedModel([-c, -a], 1.0, a * c - k, True)


def line(rng):
    p = rng.uniform(0.25, 0.75, size=2)
    t = rng.uniform(0, np.pi)
    n = np.array([np.cos(t), np.sin(t)])
    return GatedModel(n, 0.0, -n @ p, False)


def rounded(m):
    # fixtures are committed at 4 decimals, so check the rounded weights
    return GatedModel(np.round(m.input_weights, 4), round(m.gate_weight, 4),
                      round(m.bias, 4), m.gate_enabled)


def search(make, k, target, seed, tries=20000):
    rng = np.random.default_rng(seed)
    win = Window(0, 1, 0, 1, 100)
    for _ in range(tries):
        models = [rounded(make(rng)) for _ in range(k)]
        raster = rasterize_signs(models, win.with_resolution(400))
        if raster.region_count != target:
            continue
        if np.bincount(raster.cell_labels.ravel()).min() < MIN_AREA * 400 * 400:
            continue
        if all(count_regions(models, win, r) == target for r in CHECK):
            return models
    raise RuntimeError("no configuration found")


def as_json(models):
    return [
        {"w": [float(v) for v in m.input_weights], "gate": m.gate_weight,
         "bias": m.bias, "gate_enabled": m.gate_enabled}
        for m in models
    ]


if __name__ == "__main__":
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
    out = {}
    for name, make, k, target in [
        ("gated-1", hyperbola, 1, 3),
        ("plain-2", line, 2, 4),
        ("plain-3", line, 3, 7),
        ("gated-2", hyperbola, 2, 7),
        ("gated-3", hyperbola, 3, 13),
    ]:
        out[name] = {"window": [0, 1, 0, 1], "expected": target,
                     "models": as_json(search(make, k, target, seed))}
    print(json.dumps(out, indent=1))
