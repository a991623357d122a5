import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gated_perceptron.errors import DataError
from gated_perceptron.metrics import (
    ConfusionCounts,
    bce_loss,
    confusion,
    confusion_accuracy,
    derive_metrics,
    evaluate_binary,
    mean_row,
    multiclass_confusion,
    roc_auc,
)


def pairwise_auc(labels, scores):
    """Mann-Whitney oracle: fraction of (pos, neg) pairs ordered correctly, ties count 1/2."""
    pos = [s for y, s in zip(labels, scores) if y == 1]
    neg = [s for y, s in zip(labels, scores) if y == 0]
    wins = Fraction(0)
    for p in pos:
        for n in neg:
            if p > n:
                wins += 1
            elif p == n:
                wins += Fraction(1, 2)
    return wins / (len(pos) * len(neg))


class TestConfusion:
    def test_perfect(self):
        assert confusion([1, 0], [0.9, 0.1]) == ConfusionCounts(1, 1, 0, 0)

    def test_inverted(self):
        assert confusion([1, 0], [0.1, 0.9]) == ConfusionCounts(0, 0, 1, 1)

    def test_threshold_inclusive(self):
        assert confusion([1], [0.5]).tp == 1

    def test_length_mismatch(self):
        with pytest.raises(DataError):
            confusion([1, 0], [0.5])

    @given(st.lists(st.tuples(st.integers(0, 1), st.floats(0, 1)), min_size=1, max_size=60),
           st.floats(0, 1), st.floats(0, 1))
    def test_raising_threshold_is_monotone(self, rows, t1, t2):
        lo, hi = sorted((t1, t2))
        y, s = zip(*rows)
        a, b = confusion(y, s, lo), confusion(y, s, hi)
        assert b.tp <= a.tp and b.tn >= a.tn
        assert a.total == b.total == len(rows)


class TestDeriveMetrics:
    def test_first_wdbc_row(self):
        r = derive_metrics(ConfusionCounts(39, 73, 1, 1))
        assert r.accuracy == pytest.approx(112 / 114)
        assert round(r.accuracy, 3) == 0.982

    def test_second_wdbc_row(self):
        r = derive_metrics(ConfusionCounts(43, 70, 0, 1))
        assert r.precision == 1.0
        assert round(r.recall, 3) == 0.977
        assert r.f1 == pytest.approx(0.988, abs=1e-3)  # 0.98851: accept either 3-digit rounding

    def test_first_pima_row(self):
        r = derive_metrics(ConfusionCounts(29, 87, 17, 21))
        assert round(r.accuracy, 3) == 0.753
        assert round(r.precision, 3) == 0.630

    def test_zero_denominators(self):
        r = derive_metrics(ConfusionCounts(0, 5, 0, 0))
        assert (r.precision, r.recall, r.f1) == (0.0, 0.0, 0.0)

    def test_empty(self):
        with pytest.raises(DataError):
            derive_metrics(ConfusionCounts(0, 0, 0, 0))

    @given(st.integers(0, 500), st.integers(0, 500), st.integers(0, 500), st.integers(0, 500))
    def test_consistency(self, tp, tn, fp, fn):
        if tp + tn + fp + fn == 0:
            return
        r = derive_metrics(ConfusionCounts(tp, tn, fp, fn))
        pr = tp / (tp + fp) if tp + fp else 0.0
        rc = tp / (tp + fn) if tp + fn else 0.0
        assert abs(r.accuracy - (tp + tn) / (tp + tn + fp + fn)) <= 1e-9
        assert abs(r.precision - pr) <= 1e-9
        assert abs(r.recall - rc) <= 1e-9
        assert abs(r.f1 - (2 * pr * rc / (pr + rc) if pr + rc else 0.0)) <= 1e-9
        for v in (r.accuracy, r.precision, r.recall, r.f1):
            assert 0.0 <= v <= 1.0

    def test_json_keys(self):
        r, _ = evaluate_binary([1, 0, 1, 0], [0.9, 0.2, 0.4, 0.6])
        d = json.loads(r.to_json())
        assert set(d) == {"tp", "tn", "fp", "fn", "accuracy", "precision", "recall", "f1", "auc"}


class TestRoc:
    def test_separated(self):
        assert roc_auc([0, 0, 1, 1], [0.1, 0.2, 0.8, 0.9]).auc == 1.0

    def test_all_tied(self):
        assert roc_auc([0, 1, 0, 1, 1], [0.3] * 5).auc == 0.5

    def test_endpoints_and_monotone(self):
        rng = np.random.default_rng(0)
        roc = roc_auc(rng.integers(0, 2, 50), rng.uniform(size=50))
        pts = roc.points
        assert tuple(pts[0, :2]) == (0.0, 0.0)
        assert tuple(pts[-1, :2]) == (1.0, 1.0)
        assert np.all(np.diff(pts[:, 0]) >= 0) and np.all(np.diff(pts[:, 1]) >= 0)

    def test_twenty_sample_case(self):
        rng = np.random.default_rng(20)
        y = rng.integers(0, 2, 20)
        s = np.round(rng.uniform(size=20), 1)
        assert roc_auc(y, s).auc == float(pairwise_auc(y, s))

    def test_matches_pairwise_oracle_200_instances(self):
        rng = np.random.default_rng(1234)
        for _ in range(200):
            n = int(rng.integers(2, 201))
            y = rng.integers(0, 2, n)
            y[0], y[1] = 0, 1
            # coarse grid forces ties
            s = rng.integers(0, int(rng.integers(2, 50)), n) / 7.0
            assert roc_auc(y, s).auc == float(pairwise_auc(y, s))

    @given(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 20)), min_size=2, max_size=80))
    def test_flip_symmetry(self, rows):
        y, s = map(np.array, zip(*rows))
        if y.min() == y.max():
            return
        s = s / 20.0
        a = roc_auc(y, s).auc
        assert 0.0 <= a <= 1.0
        assert abs(roc_auc(1 - y, s).auc - (1.0 - a)) < 1e-12
        assert abs(roc_auc(y, 1 - s).auc - (1.0 - a)) < 1e-12
        assert abs(roc_auc(1 - y, 1 - s).auc - a) < 1e-12

    def test_single_class(self):
        with pytest.raises(DataError):
            roc_auc([1, 1, 1], [0.1, 0.2, 0.3])

    def test_csv(self, tmp_path):
        roc = roc_auc([0, 1], [0.2, 0.7])
        roc.to_csv(tmp_path / "roc.csv")
        lines = (tmp_path / "roc.csv").read_text().splitlines()
        assert lines[0] == "fpr,tpr,threshold"
        assert len(lines) == 1 + len(roc.points)


class TestFlipSymmetryExact:
    def test_auc_of_complement_scores_with_flipped_labels_is_equal(self):
        # flipping labels and negating scores reverses every pair twice, so AUC is unchanged;
        # flipping only one of them gives 1 - AUC
        rng = np.random.default_rng(7)
        y = rng.integers(0, 2, 60)
        s = rng.integers(0, 10, 60) / 10
        a = roc_auc(y, s).auc
        assert roc_auc(1 - y, 1 - s).auc == pytest.approx(a, abs=1e-15)
        assert roc_auc(1 - y, s).auc == pytest.approx(1 - a, abs=1e-15)


class TestBce:
    def test_near_perfect(self):
        assert bce_loss([1], [1 - 1e-12]) == pytest.approx(1e-12, rel=1e-3)

    def test_half(self):
        assert bce_loss([1, 0], [0.5, 0.5]) == pytest.approx(0.6931471805599453, abs=1e-15)

    def test_three_sample_oracle(self):
        # (-ln .9 - ln .8 - ln .8) / 3 at 40 digits: 0.18388253942874860425...
        assert bce_loss([1, 0, 1], [0.9, 0.2, 0.8]) == pytest.approx(0.1838825394287486, abs=1e-15)

    def test_saturated_scores_finite(self):
        assert np.isfinite(bce_loss([1, 0], [0.0, 1.0]))

    def test_length_mismatch(self):
        with pytest.raises(DataError):
            bce_loss([1], [0.5, 0.5])


class TestMulticlass:
    def test_perfect(self):
        m = multiclass_confusion([0, 1, 2, 2], [0, 1, 2, 2], 3)
        assert np.array_equal(m, np.diag([1, 1, 2]))
        assert confusion_accuracy(m) == 1.0

    def test_one_swap_in_thirty(self):
        y = np.repeat([0, 1, 2], 10)
        p = y.copy()
        p[12] = 2
        m = multiclass_confusion(y, p, 3)
        assert m[1, 2] == 1
        assert round(confusion_accuracy(m), 4) == 0.9667

    def test_constant_predictor(self):
        y = np.repeat([0, 1, 2], 5)
        assert confusion_accuracy(multiclass_confusion(y, np.zeros(15, int), 3)) == pytest.approx(1 / 3)

    def test_out_of_range(self):
        with pytest.raises(DataError):
            multiclass_confusion([0, 3], [0, 1], 3)


def test_mean_row():
    reports = [evaluate_binary([1, 0, 1, 0], s)[0] for s in ([0.9, 0.1, 0.8, 0.2], [0.4, 0.6, 0.7, 0.3])]
    m = mean_row(reports)
    assert m["accuracy"] == pytest.approx((1.0 + 0.5) / 2)
    assert m["fp"] == pytest.approx(0.5)
