"""Materialize the bundled UCI-format CSVs from locally installed packages.

Iris and WDBC come from scikit-learn's bundled copies; PIMA comes from the
``common-datasets`` wheel (KEEL mirror of the 768-row UCI table). Run once;
the outputs are committed under ``src/gated_perceptron/datasets``.

    pip install --no-deps common-datasets
    python scripts/build_datasets.py
"""

import csv
from importlib import resources
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "gated_perceptron" / "datasets"
IRIS_NAMES = ["Iris-setosa", "Iris-versicolor", "Iris-virginica"]


def _sklearn_rows(name):
    path = resources.files("sklearn.datasets") / "data" / name
    with path.open() as fh:
        rows = list(csv.reader(fh))
    return rows[1:]


def build_iris():
    with open(OUT / "iris.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        for row in _sklearn_rows("iris.csv"):
            w.writerow(row[:4] + [IRIS_NAMES[int(row[4])]])


def build_wdbc():
    # sklearn target: 0 = malignant, 1 = benign; ids are not shipped, so use row number
    with open(OUT / "wdbc.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        for i, row in enumerate(_sklearn_rows("breast_cancer.csv"), start=1):
            w.writerow([i, "M" if row[30] == "0" else "B"] + row[:30])


def build_pima():
    path = resources.files("common_datasets") / "data" / "classification" / "pima" / "pima.dat"
    lines = path.read_text().splitlines()
    start = next(i for i, ln in enumerate(lines) if ln.strip().lower() == "@data") + 1
    with open(OUT / "pima.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        for ln in lines[start:]:
            if not ln.strip():
                continue
            parts = [p.strip() for p in ln.split(",")]
            w.writerow(parts[:8] + ["1" if parts[8] == "positive" else "0"])


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    build_iris()
    build_wdbc()
    build_pima()
    for f in sorted(OUT.glob("*.csv")):
        print(f.name, sum(1 for _ in f.open()))
