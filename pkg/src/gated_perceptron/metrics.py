"""Confusion counts, threshold metrics, ROC/AUC and losses."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from .errors import DataError
from .model import PROB_CLIP


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


@dataclass(frozen=True)
class MetricReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    counts: ConfusionCounts
    auc: float = math.nan

    def to_dict(self) -> dict:
        d = asdict(self.counts)
        d.update(
            accuracy=self.accuracy,
            precision=self.precision,
            recall=self.recall,
            f1=self.f1,
            auc=self.auc,
        )
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class RocCurve:
    """``points`` rows are ``(fpr, tpr, threshold)``; the first row uses threshold +inf."""

    points: np.ndarray
    auc: float

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("fpr,tpr,threshold\n")
            for fpr, tpr, thr in self.points:
                fh.write(f"{fpr:.17g},{tpr:.17g},{thr:.17g}\n")


def _pair(labels, scores):
    y = np.asarray(labels)
    s = np.asarray(scores, dtype=np.float64)
    if y.shape != s.shape or y.ndim != 1:
        raise DataError(f"labels and scores differ in shape: {y.shape} vs {s.shape}")
    return y, s


def confusion(labels, scores, threshold: float = 0.5) -> ConfusionCounts:
    """Predicted positive iff ``score >= threshold``."""
    y, s = _pair(labels, scores)
    pred = s >= threshold
    pos = y == 1
    return ConfusionCounts(
        tp=int(np.sum(pred & pos)),
        tn=int(np.sum(~pred & ~pos)),
        fp=int(np.sum(pred & ~pos)),
        fn=int(np.sum(~pred & pos)),
    )


def _ratio(num, den):
    return num / den if den else 0.0


def derive_metrics(c: ConfusionCounts) -> MetricReport:
    """Accuracy, precision, recall and F1; zero denominators give 0."""
    if c.total <= 0:
        raise DataError("no samples in confusion counts")
    precision = _ratio(c.tp, c.tp + c.fp)
    recall = _ratio(c.tp, c.tp + c.fn)
    f1 = _ratio(2 * precision * recall, precision + recall)
    return MetricReport((c.tp + c.tn) / c.total, precision, recall, f1, c)


def roc_auc(labels, scores) -> RocCurve:
    """ROC over the distinct score values in descending order.

    Tied scores form a single threshold step, so the trapezoid AUC gives half
    credit to tied positive/negative pairs. The area is accumulated in
    integers and divided once.
    """
    y, s = _pair(labels, scores)
    pos = y == 1
    P = int(pos.sum())
    N = y.size - P
    if P == 0 or N == 0:
        raise DataError("ROC needs at least one positive and one negative label")
    order = np.argsort(-s, kind="stable")
    s_sorted = s[order]
    pos_sorted = pos[order]
    # last index of each run of equal scores
    ends = np.flatnonzero(np.append(s_sorted[1:] != s_sorted[:-1], True))
    tp = np.concatenate([[0], np.cumsum(pos_sorted)[ends]]).astype(np.int64)
    fp = np.concatenate([[0], np.cumsum(~pos_sorted)[ends]]).astype(np.int64)
    thresholds = np.concatenate([[np.inf], s_sorted[ends]])
    twice_area = int(np.sum(np.diff(fp) * (tp[1:] + tp[:-1])))
    points = np.column_stack([fp / N, tp / P, thresholds])
    return RocCurve(points, twice_area / (2 * P * N))


def bce_loss(labels, scores) -> float:
    y, s = _pair(labels, scores)
    p = np.clip(s, PROB_CLIP, 1.0 - PROB_CLIP)
    y = y.astype(np.float64)
    return float(np.mean(-(y * np.log(p) + (1.0 - y) * np.log1p(-p))))


def multiclass_confusion(labels, predictions, n_classes: int) -> np.ndarray:
    """``m[i, j]`` counts samples of true class ``i`` predicted as ``j``."""
    y = np.asarray(labels, dtype=np.int64)
    p = np.asarray(predictions, dtype=np.int64)
    if y.shape != p.shape:
        raise DataError("labels and predictions differ in length")
    if y.size and (min(y.min(), p.min()) < 0 or max(y.max(), p.max()) >= n_classes):
        raise DataError(f"class index outside 0..{n_classes - 1}")
    m = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(m, (y, p), 1)
    return m


def confusion_accuracy(matrix) -> float:
    m = np.asarray(matrix)
    return float(np.trace(m) / m.sum())


def evaluate_binary(labels, scores, threshold: float = 0.5) -> tuple[MetricReport, RocCurve]:
    report = derive_metrics(confusion(labels, scores, threshold))
    roc = roc_auc(labels, scores)
    return replace(report, auc=roc.auc), roc


MEAN_KEYS = ("tp", "tn", "fp", "fn", "accuracy", "precision", "recall", "f1", "auc")


def mean_row(reports) -> dict:
    rows = [r.to_dict() if isinstance(r, MetricReport) else r for r in reports]
    if not rows:
        raise DataError("no reports to average")
    return {k: float(np.mean([r[k] for r in rows])) for k in MEAN_KEYS}
