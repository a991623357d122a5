"""Time the numba and pure-numpy paths of each kernel on representative inputs.

    python3 benchmarks/bench_backends.py [--repeat N]

The numba path is compiled once before timing; the best of ``--repeat``
runs is reported.
"""

import argparse
import timeit

import numpy as np

from gated_perceptron import kernels
from gated_perceptron._accel import HAVE_NUMBA
from gated_perceptron.data import SplitSpec, load_bundled, prepare
from gated_perceptron.regions import load_fixture, sign_codes


def _cases():
    rng = np.random.default_rng(0)

    prep = prepare(load_bundled("wdbc"), "wdbc", SplitSpec(0.2, 0))
    X = prep.train.features
    A = np.hstack([X, np.prod(X, axis=1, keepdims=True), np.ones((X.shape[0], 1))])
    t = prep.train.labels.astype(float)
    order = rng.permutation(A.shape[0])
    theta = rng.uniform(-0.5, 0.5, A.shape[1])
    yield ("delta epoch (wdbc train, 456x32)",
           lambda f: f(A, t, order, theta.copy(), 0.5), "_delta_epoch")

    B = np.hstack([rng.uniform(-1, 1, (150, 2)), np.zeros((150, 1)), np.ones((150, 1))])
    B[:, 2] = B[:, 0] * B[:, 1]
    s = np.where(rng.uniform(size=150) < 0.5, -1.0, 1.0)
    o2 = rng.permutation(150)
    th2 = rng.uniform(-0.5, 0.5, 4)
    yield ("region epoch (150x4)", lambda f: f(B, s, o2, th2.copy(), 0.05), "_region_epoch")

    C = np.hstack([rng.uniform(size=(120, 5)), np.ones((120, 1))])
    lab = rng.integers(0, 3, 120)
    o3 = rng.permutation(120)
    W = rng.uniform(-0.5, 0.5, (3, 6))
    yield ("softmax epoch (120x6, 3 classes)", lambda f: f(C, lab, o3, W.copy(), 0.01), "_softmax_epoch")

    models, window, _ = load_fixture("gated-3")
    codes = sign_codes(models, window.with_resolution(2000))
    yield ("label components (2000x2000)", lambda f: f(codes), "_label_components")


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)

    print(f"{'kernel':36s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}")
    for label, call, name in _cases():
        np_fn = getattr(kernels, name + "_np")
        t_np = min(timeit.repeat(lambda: call(np_fn), number=1, repeat=args.repeat)) * 1e3
        if HAVE_NUMBA:
            nb_fn = getattr(kernels, name + "_nb")
            call(nb_fn)  # compile
            t_nb = min(timeit.repeat(lambda: call(nb_fn), number=1, repeat=args.repeat)) * 1e3
            print(f"{label:36s} {t_np:10.3f} {t_nb:10.3f} {t_np / t_nb:7.1f}x")
        else:
            print(f"{label:36s} {t_np:10.3f} {'n/a':>10s} {'':>8s}")


if __name__ == "__main__":
    main()
