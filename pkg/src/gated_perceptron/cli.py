"""Command-line entry point: ``gated-perceptron <subcommand> ...``.

Exit codes: 0 success, 1 check failed (xor), 2 usage error, 3 data error,
4 training divergence, 5 degenerate geometry.
"""

from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import experiments as ex
from . import metrics
from ._accel import backend_name
from .errors import ConfigError, DataError, GatedPerceptronError
from .model import GatedModel, load_model, save_model, weighted_sum
from .regions import DEFAULT_RESOLUTION, Window, boundary_curve, load_fixture, rasterize_signs


class _Stage:
    name = "setup"


@contextmanager
def stage(state: _Stage, name: str):
    state.name = name
    yield


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {v}")
    return v


def _seed(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _dump_json(obj, path: Path):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _outdir(args) -> Path | None:
    if args.out is None:
        return None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _hyper(args, kind):
    lr = args.lr if args.lr is not None else ex.DEFAULTS[kind]["lr"]
    epochs = args.epochs if args.epochs is not None else ex.DEFAULTS[kind]["epochs"]
    return lr, epochs


# -- subcommands -------------------------------------------------------------


def cmd_train(args, st):
    kind = args.model
    schema = args.schema or ("iris-multiclass" if kind == "softmax" else "wdbc")
    with stage(st, "config"):
        ex.check_pair(schema, kind)
        lr, epochs = _hyper(args, kind)
    with stage(st, "load"):
        data = ex.load_data(schema, args.data)
    with stage(st, "train"):
        if kind == "softmax":
            run = ex.run_softmax(data, lr, epochs, args.seed, args.test_fraction)
            payload = run.to_dict()
        else:
            run = ex.run_binary(data, schema, kind == "gated", lr, epochs, args.seed,
                                args.test_fraction)
            payload = run.report.to_dict()
    with stage(st, "write"):
        out = _outdir(args)
        if out is not None:
            save_model(run.model, out / "model.txt")
            run.trace.to_csv(out / "loss.csv")
            _dump_json(payload, out / "metrics.json")
            if kind != "softmax":
                run.roc.to_csv(out / "roc.csv")
    print(json.dumps(payload, sort_keys=True))
    return 0


def cmd_repro(args, st):
    kind = args.model
    schema = args.schema or ("iris-multiclass" if kind == "softmax" else "wdbc")
    with stage(st, "config"):
        ex.check_pair(schema, kind)
        lr, epochs = _hyper(args, kind)
        sweep = [lr]
        if args.lr_sweep:
            try:
                sweep = [float(t) for t in args.lr_sweep.split(",")]
            except ValueError:
                raise ConfigError(f"bad --lr-sweep list {args.lr_sweep!r}") from None
    with stage(st, "load"):
        data = ex.load_data(schema, args.data)
    results = {}
    for rate in sweep:
        with stage(st, f"repro lr={rate}"):
            rep = ex.repro(data, schema, kind, rate, epochs, args.seed, args.reps,
                           args.test_fraction, args.jobs)
        print(f"# {schema} {kind} lr={rate:g} epochs={epochs} seeds={args.seed}..{args.seed + args.reps - 1}")
        print(rep.table())
        results[f"{rate:g}"] = rep.to_dict()
    with stage(st, "write"):
        out = _outdir(args)
        if out is not None:
            payload = results if args.lr_sweep else results[f"{lr:g}"]
            _dump_json(payload, out / "repro.json")
    return 0


def _models_for_regions(args):
    if args.fixture:
        models, window, _ = load_fixture(args.fixture)
    else:
        models = [load_model(p) for p in args.weights]
        if not all(isinstance(m, GatedModel) for m in models):
            raise ConfigError("region weights must be gatedmodel files")
        window = Window()
    if args.window:
        window = Window.parse(args.window, args.resolution)
    else:
        window = window.with_resolution(args.resolution)
    return models, window


def cmd_regions(args, st):
    with stage(st, "load"):
        if not args.fixture and not args.weights:
            raise ConfigError("give --fixture NAME or at least one --weights FILE")
        models, window = _models_for_regions(args)
    with stage(st, "geometry"):
        curves = [boundary_curve(m, window) for m in models]
        raster = rasterize_signs(models, window)
    with stage(st, "write"):
        out = _outdir(args)
        if out is not None:
            raster.to_pgm(out / "regions.pgm")
            (out / "regions.json").write_text(raster.sign_json() + "\n")
            with open(out / "boundary.csv", "w") as fh:
                fh.write("model_id,branch_id,x1,x2\n")
                for k, curve in enumerate(curves):
                    for b, pts in enumerate(curve.branches):
                        for x1, x2 in pts:
                            fh.write(f"{k},{b},{x1:.17g},{x2:.17g}\n")
    print(raster.region_count)
    return 0


def _corner_report(model: GatedModel) -> str:
    s = weighted_sum(model, ex.XOR_POINTS)
    parts = []
    for (x1, x2), v in zip(ex.XOR_POINTS, s):
        parts.append(f"  y({x1:g},{x2:g}) = {v:+.6f}  sign {'+' if v >= 0 else '-'}")
    return "\n".join(parts)


def _weights_line(model: GatedModel) -> str:
    w1, w2 = model.input_weights
    return f"w1={w1:.6g} w2={w2:.6g} w3={model.gate_weight:.6g} b={model.bias:.6g}"


def cmd_xor(args, st):
    lr, epochs = _hyper(args, "xor")
    with stage(st, "train"):
        model = ex.run_xor(args.model != "plain", lr, epochs, args.seed)
    ok = ex.xor_satisfied(model)
    print(f"{args.model} perceptron on XOR (targets + at (0,0),(1,1); - at (1,0),(0,1))")
    print("learned " + _weights_line(model))
    print(_corner_report(model))
    print(f"constraints: {'PASS' if ok else 'FAIL'}")
    print()
    pub = ex.PUBLISHED_XOR_WEIGHTS
    print("published " + _weights_line(pub))
    print(_corner_report(pub))
    print(
        "note: the published weights give signs (-,+,-,+) at (0,0),(1,0),(0,1),(1,1); "
        "they separate on x1 alone and do not satisfy the XOR sign constraints"
    )
    return 0 if ok else 1


def cmd_iris_regression(args, st):
    if args.model == "softmax":
        raise ConfigError("iris-regression supports gated or plain models")
    lr, epochs = _hyper(args, "region")
    with stage(st, "train"):
        run = ex.run_iris_region(tuple(args.columns), args.classes, lr, epochs, args.seed,
                                 gated=args.model != "plain", path=args.data)
    names = run.raw_names
    print(f"columns {args.columns[0]},{args.columns[1]} ({names[0]}, {names[1]}), "
          f"{args.classes} classes, lr={lr:g}, epochs={epochs}")
    print("raw-unit " + _weights_line(run.raw_model))
    for name, n in run.misclassified.items():
        print(f"  {name}: {n} misclassified")
    print(f"total misclassified: {run.total_misclassified} of {run.data.n_rows}")
    with stage(st, "write"):
        out = _outdir(args)
        if out is not None:
            stats = run.data.norm_stats
            pad = 0.05 * (stats[:, 1] - stats[:, 0])
            window = Window(stats[0, 0] - pad[0], stats[0, 1] + pad[0],
                            stats[1, 0] - pad[1], stats[1, 1] + pad[1], 2)
            boundary_curve(run.raw_model, window).to_csv(out / "boundary.csv")
            save_model(run.raw_model, out / "model.txt")
            _dump_json({"misclassified": run.misclassified,
                        "total": run.total_misclassified}, out / "misclassified.json")
    return 0


def cmd_roc(args, st):
    with stage(st, "load"):
        path = Path(args.scores)
        if not path.exists():
            raise DataError(f"scores file not found: {path}")
        try:
            arr = np.genfromtxt(path, delimiter=",", names=True)
            labels, scores = arr["label"].astype(int), arr["score"]
        except (ValueError, KeyError, IndexError):
            raise DataError(f"{path}: expected CSV with header columns label,score") from None
    with stage(st, "roc"):
        report, roc = metrics.evaluate_binary(np.atleast_1d(labels), np.atleast_1d(scores),
                                              args.threshold)
    with stage(st, "write"):
        out = _outdir(args)
        if out is not None:
            roc.to_csv(out / "roc.csv")
            _dump_json(report.to_dict(), out / "metrics.json")
    print(json.dumps(report.to_dict(), sort_keys=True))
    return 0


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--data", metavar="PATH", help="CSV file (default: bundled copy)")
    common.add_argument("--schema", choices=["iris-2class", "iris-3class-regression",
                                             "iris-multiclass", "wdbc", "pima", "generic"])
    common.add_argument("--model", choices=["gated", "plain", "softmax"], default="gated")
    common.add_argument("--lr", type=_positive_float, help="learning rate")
    common.add_argument("--epochs", type=_positive_int)
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--test-fraction", type=float, default=0.2)
    common.add_argument("--reps", type=_positive_int, default=10)
    common.add_argument("--out", metavar="DIR")
    common.add_argument("--window", metavar="x0,x1,y0,y1")
    common.add_argument("--resolution", type=_positive_int, default=DEFAULT_RESOLUTION)

    p = argparse.ArgumentParser(prog="gated-perceptron", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s ({backend_name()} backend)")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("train", parents=[common], help="train once and evaluate")
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("repro", parents=[common], help="repeat over seeds and tabulate")
    sp.add_argument("--lr-sweep", metavar="LR,LR,...", help="repeat the table for each rate")
    sp.add_argument("--jobs", type=_positive_int, default=1)
    sp.set_defaults(func=cmd_repro)

    sp = sub.add_parser("regions", parents=[common], help="rasterize and count decision regions")
    sp.add_argument("--fixture", help="committed weight set, e.g. gated-3")
    sp.add_argument("--weights", action="append", metavar="FILE", help="gatedmodel v1 file (repeatable)")
    sp.set_defaults(func=cmd_regions)

    sp = sub.add_parser("xor", parents=[common], help="fit the 4-point XOR set")
    sp.set_defaults(func=cmd_xor)

    sp = sub.add_parser("iris-regression", parents=[common], help="region regression on two Iris columns")
    sp.add_argument("--columns", type=int, nargs=2, default=[3, 4], metavar=("I", "J"))
    sp.add_argument("--classes", type=int, choices=[2, 3], default=3)
    sp.set_defaults(func=cmd_iris_regression)

    sp = sub.add_parser("roc", parents=[common], help="ROC curve and metrics from a label,score CSV")
    sp.add_argument("--scores", required=True, metavar="PATH")
    sp.add_argument("--threshold", type=float, default=0.5)
    sp.set_defaults(func=cmd_roc)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    st = _Stage()
    try:
        return args.func(args, st)
    except GatedPerceptronError as exc:
        print(f"error [{st.name}]: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
