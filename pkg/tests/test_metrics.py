"""Unit tests for F1 scoring, diagnostics, table rendering and the fold protocol."""

import math

import numpy as np
import pytest
from sklearn.metrics import f1_score

from bpd_har.data import generate_synthetic, plan_splits
from bpd_har.errors import EmptyDatasetError, ShapeMismatchError
from bpd_har.metrics import (
    ConfusionMatrix,
    classwise_f1,
    confusion,
    diagnostics,
    macro_f1,
    render_classwise,
    render_comparison,
    score_f1,
    weighted_f1,
)
from bpd_har.metrics.protocol import build_model, evaluate, run_protocol, run_protocol_detailed
from bpd_har.schemas.common import F1Average, ModelKind, SplitKind
from bpd_har.schemas.report import EpochLog, MetricsReport, SubjectScore


def _brute_force_classwise(counts: np.ndarray) -> list[float | None]:
    scores: list[float | None] = []
    for k in range(counts.shape[0]):
        tp = counts[k, k]
        fp = counts[:, k].sum() - tp
        fn = counts[k, :].sum() - tp
        if tp + fp + fn == 0:
            scores.append(None)
        elif tp == 0:
            scores.append(0.0)
        else:
            precision, recall = tp / (tp + fp), tp / (tp + fn)
            scores.append(2 * precision * recall / (precision + recall))
    return scores


def _brute_force_macro(counts: np.ndarray) -> float:
    present = [s for s in _brute_force_classwise(counts) if s is not None]
    return sum(present) / len(present)


def _log(epoch: int, mine: float, entropy: float, recon: float) -> EpochLog:
    return EpochLog(epoch=epoch, ce=1.0, ne=-entropy, recon=recon, mine=mine, entropy=entropy, batches=3)


def _report(model: ModelKind, rows: dict[str, float], classwise=None) -> MetricsReport:
    scores = [SubjectScore(subjects=[s], f1=f, segments=10) for s, f in rows.items()]
    return MetricsReport(
        model=model,
        rows=scores,
        overall=sum(rows.values()) / len(rows),
        classwise=classwise or [0.5, None],
        confusion=[[[1, 0], [0, 1]] for _ in rows],
        label_names={1: "walking", 2: "running"},
    )


# ============================================================================
# F1 SCORES
# ============================================================================


class TestF1:
    """Confusion counts and per-class, macro and weighted F1."""

    def test_matches_brute_force(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            k = int(rng.integers(2, 7))
            counts = rng.integers(0, 20, size=(k, k))
            if counts.sum() == 0:
                continue
            assert macro_f1(ConfusionMatrix(counts)) == pytest.approx(_brute_force_macro(counts), abs=1e-12)

    def test_classwise_matches_brute_force(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            k = int(rng.integers(2, 7))
            counts = rng.integers(0, 4, size=(k, k)) * rng.integers(0, 2, size=(k, 1))
            if counts.sum() == 0:
                continue
            expected = _brute_force_classwise(counts)
            scores = classwise_f1(ConfusionMatrix(counts))
            assert [s is None for s in scores] == [e is None for e in expected]
            present = [e for e in expected if e is not None]
            assert [s for s in scores if s is not None] == pytest.approx(present)

    def test_relabelling_keeps_macro(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            k = int(rng.integers(2, 7))
            counts = rng.integers(0, 20, size=(k, k))
            if counts.sum() == 0:
                continue
            order = rng.permutation(k)
            relabelled = counts[np.ix_(order, order)]
            expected = macro_f1(ConfusionMatrix(counts))
            assert macro_f1(ConfusionMatrix(relabelled)) == pytest.approx(expected, abs=1e-12)

    def test_half_correct(self):
        assert macro_f1(ConfusionMatrix([[5, 5], [5, 5]])) == pytest.approx(0.5)

    def test_diagonal_is_one(self):
        assert macro_f1(ConfusionMatrix(np.diag([3, 7, 1]))) == 1.0

    def test_zero_diagonal_is_zero(self):
        assert macro_f1(ConfusionMatrix([[0, 4], [6, 0]])) == 0.0

    def test_absent_class_excluded(self):
        cm = ConfusionMatrix([[4, 0, 0], [0, 0, 0], [1, 0, 3]])
        scores = classwise_f1(cm)
        assert scores[1] is None
        assert macro_f1(cm) == pytest.approx((scores[0] + scores[2]) / 2)

    def test_class_without_true_positives_scores_zero(self):
        assert classwise_f1(ConfusionMatrix([[2, 1], [0, 0]]))[1] == 0.0

    def test_confusion_layout(self):
        cm = confusion([1, 1, 2, 3], [1, 2, 2, 1], 3)
        assert cm.tolist() == [[1, 1, 0], [0, 1, 0], [1, 0, 0]]
        assert cm.total == 4

    def test_confusion_of_nothing(self):
        cm = confusion([], [], 2)
        assert cm.tolist() == [[0, 0], [0, 0]]
        with pytest.raises(EmptyDatasetError):
            macro_f1(cm)

    def test_weighted_matches_sklearn(self):
        rng = np.random.default_rng(5)
        true = rng.integers(1, 5, size=200)
        pred = np.where(rng.random(200) < 0.6, true, rng.integers(1, 5, size=200))
        cm = confusion(true, pred, 4)
        expected = f1_score(true, pred, labels=[1, 2, 3, 4], average="weighted")
        assert weighted_f1(cm) == pytest.approx(expected, abs=1e-12)
        assert score_f1(cm, F1Average.WEIGHTED) == weighted_f1(cm)
        assert score_f1(cm) == macro_f1(cm)

    def test_matrices_add(self):
        total = ConfusionMatrix([[1, 0], [0, 1]]) + ConfusionMatrix([[0, 2], [0, 0]])
        assert total.tolist() == [[1, 2], [0, 1]]

    def test_rejects_bad_matrices(self):
        with pytest.raises(ShapeMismatchError):
            ConfusionMatrix([[1, 2, 3]])
        with pytest.raises(ValueError):
            ConfusionMatrix([[1, -1], [0, 0]])


# ============================================================================
# DIAGNOSTICS
# ============================================================================


class TestDiagnostics:
    """First/last trajectory comparisons."""

    def test_single_epoch(self):
        summary = diagnostics([_log(1, 0.3, 0.5, 2.0)])
        assert summary.epochs == 1
        assert summary.mine_first == summary.mine_last == 0.3
        assert not summary.mine_decreased and not summary.entropy_increased

    def test_trends(self):
        logs = [_log(1, 0.5, 0.4, 3.0), _log(2, 0.3, 0.9, 2.5), _log(3, 0.1, 1.2, 1.0)]
        summary = diagnostics(logs, class_count=4)
        assert summary.mine == [0.5, 0.3, 0.1]
        assert summary.mine_decreased and summary.entropy_increased and summary.recon_improved
        assert summary.max_entropy == pytest.approx(math.log(4))
        assert all(0.0 <= e <= summary.max_entropy for e in summary.entropy)

    def test_no_logs(self):
        with pytest.raises(EmptyDatasetError):
            diagnostics([])


# ============================================================================
# TABLE RENDERING
# ============================================================================


class TestRender:
    """Per-subject tables with an Avg. row."""

    def test_rows_and_average(self):
        text = render_comparison([_report(ModelKind.BPD, {"s1": 0.9, "s2": 0.7})])
        lines = text.splitlines()
        assert lines[0].split() == ["Subject", "bpd"]
        assert lines[2].split() == ["s1", "0.9000"]
        assert lines[3].split() == ["s2", "0.7000"]
        assert lines[-1].split() == ["Avg.", "0.8000"]

    def test_two_models_side_by_side(self):
        text = render_comparison(
            [_report(ModelKind.BASELINE, {"s1": 0.5, "s2": 0.6}), _report(ModelKind.BPD, {"s1": 0.8, "s2": 0.6})]
        )
        assert text.splitlines()[0].split() == ["Subject", "baseline", "bpd"]
        assert text.splitlines()[-1].split() == ["Avg.", "0.5500", "0.7000"]

    def test_mismatched_folds(self):
        with pytest.raises(ValueError, match="same folds"):
            render_comparison([_report(ModelKind.BPD, {"s1": 1.0}), _report(ModelKind.BASELINE, {"s2": 1.0})])

    def test_classwise_marks_absent_classes(self):
        text = render_classwise([_report(ModelKind.BPD, {"s1": 1.0}, classwise=[0.25, None])])
        lines = text.splitlines()
        assert lines[2].split() == ["walking", "0.2500"]
        assert lines[3].split() == ["running", "N/A"]


# ============================================================================
# FOLD PROTOCOL
# ============================================================================


class TestProtocol:
    """Per-fold training and scoring on a small synthetic set."""

    @pytest.fixture
    def dataset(self, tiny_synth):
        return generate_synthetic(tiny_synth)

    def test_loso_rows(self, dataset, tiny_config):
        plan = plan_splits(dataset, SplitKind.LOSO)
        result = run_protocol_detailed(dataset, plan, tiny_config)
        report = result.report
        assert [row.subjects for row in report.rows] == [["s1"], ["s2"], ["s3"]]
        assert report.overall == pytest.approx(sum(r.f1 for r in report.rows) / 3)
        assert all(0.0 <= r.f1 <= 1.0 for r in report.rows)
        assert [sum(map(sum, cm)) for cm in report.confusion] == [12, 12, 12]
        assert len(report.classwise) == 3
        assert all(len(fold.logs) == 1 for fold in result.folds)
        assert report.split is SplitKind.LOSO

    def test_holdout_single_row(self, dataset, tiny_config):
        plan = plan_splits(dataset, SplitKind.HOLDOUT, ["s2", "s3"])
        report = run_protocol(dataset, plan, tiny_config, ModelKind.BASELINE)
        assert len(report.rows) == 1
        assert report.rows[0].subjects == ["s2", "s3"]
        assert report.rows[0].segments == 24
        assert report.overall == report.rows[0].f1

    def test_models_share_folds(self, dataset, tiny_config):
        plan = plan_splits(dataset, SplitKind.LOSO)
        reports = [run_protocol(dataset, plan, tiny_config, kind) for kind in (ModelKind.BASELINE, ModelKind.BPD)]
        assert "Avg." in render_comparison(reports)

    def test_repeatable(self, dataset, tiny_config):
        plan = plan_splits(["s1", "s2"], SplitKind.LOSO)
        data = dataset.subset(["s1", "s2"])
        first = run_protocol(data, plan, tiny_config)
        second = run_protocol(data, plan, tiny_config)
        assert first.confusion == second.confusion

    def test_evaluate_one_row_per_subject(self, dataset, tiny_config):
        nets = build_model(ModelKind.BPD, dataset, tiny_config)
        report = evaluate(nets, dataset, seed=tiny_config.seed)
        assert [row.subjects for row in report.rows] == [["s1"], ["s2"], ["s3"]]
        assert sum(row.segments for row in report.rows) == len(dataset)
        assert report.seed == 3
