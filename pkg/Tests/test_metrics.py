import numpy as np
import pytest

from GlobalUtils.globalUtils import ArgumentError
from DataHandler.Dataset import LabelSpace
from Metrics.ConfusionMatrix import ConfusionMatrix, MetricsReport, confusion, report
from Metrics.MetricsExport import (
    TABLE_COLUMNS, load_confusion_csv, load_report_json, render_table, save_confusion_csv, save_report_json, table_frame,
)

TWO_CLASSES = LabelSpace(("negative", "positive"))


def matrix(counts, label_space=None) -> ConfusionMatrix:
    counts = np.asarray(counts, dtype=np.int64)
    return ConfusionMatrix(counts, label_space or LabelSpace(tuple(f"c{i}" for i in range(counts.shape[0]))))


class TestConfusion:

    def test_perfect_predictions_are_diagonal(self):
        cm = confusion([0, 1, 2, 3, 3], [0, 1, 2, 3, 3], LabelSpace())
        np.testing.assert_array_equal(cm.counts, np.diag([1, 1, 1, 2]))
        assert cm.total == 5

    def test_hand_tally(self):
        cm = confusion([0, 0, 1], [0, 1, 1], LabelSpace())
        assert cm.counts[0, 0] == 1 and cm.counts[0, 1] == 1 and cm.counts[1, 1] == 1
        assert cm.total == 3

    def test_empty(self):
        cm = confusion([], [], LabelSpace())
        np.testing.assert_array_equal(cm.counts, np.zeros((4, 4)))

    def test_length_mismatch(self):
        with pytest.raises(ArgumentError):
            confusion([0, 1], [0], LabelSpace())


class TestReport:

    def test_diagonal_is_perfect(self):
        metrics = report(matrix(np.diag([3, 4, 5, 6])))
        assert (metrics.accuracy, metrics.precision, metrics.recall, metrics.f1) == (1.0, 1.0, 1.0, 1.0)

    def test_two_class_arithmetic(self):
        metrics = report(matrix([[8, 2], [1, 9]], TWO_CLASSES))
        assert metrics.accuracy == pytest.approx(0.85)
        assert metrics.per_class_precision[0] == pytest.approx(8 / 9)
        assert metrics.per_class_recall[0] == pytest.approx(0.8)
        assert metrics.per_class_f1[0] == pytest.approx(0.8421, abs=1e-4)

    def test_absent_class_is_flagged(self):
        metrics = report(matrix([[5, 0, 1], [0, 4, 0], [0, 0, 0]]))
        assert metrics.per_class_precision[2] == 0.0
        assert metrics.per_class_recall[2] == 0.0
        assert metrics.per_class_f1[2] == 0.0
        assert 'c2' in metrics.zero_division_classes

    def test_empty_matrix(self):
        metrics = report(matrix(np.zeros((4, 4))))
        assert metrics.is_empty
        assert metrics.accuracy == metrics.precision == metrics.recall == metrics.f1 == 0.0

    def test_random_matrix_properties(self):
        rng = np.random.default_rng(99)
        for _ in range(200):
            N = int(rng.integers(2, 6))
            counts = rng.integers(0, 20, size=(N, N))
            if counts.sum() == 0:
                continue
            metrics = report(matrix(counts))
            prevalence = counts.sum(axis=1) / counts.sum()
            assert metrics.accuracy == pytest.approx(float(np.dot(prevalence, metrics.per_class_recall)))
            for p, r, f in zip(metrics.per_class_precision, metrics.per_class_recall, metrics.per_class_f1):
                assert f == pytest.approx(0.0 if p + r == 0 else 2 * p * r / (p + r))
            values = [metrics.accuracy, metrics.precision, metrics.recall, metrics.f1]
            assert all(0.0 <= value <= 1.0 for value in values)

            order = rng.permutation(N)
            permuted = report(ConfusionMatrix(counts[np.ix_(order, order)],
                                              LabelSpace(tuple(f"c{i}" for i in order))))
            assert permuted.accuracy == pytest.approx(metrics.accuracy)
            assert permuted.f1 == pytest.approx(metrics.f1)
            assert permuted.per_class_f1 == pytest.approx(tuple(metrics.per_class_f1[i] for i in order))


class TestTable:

    def perfect(self) -> MetricsReport:
        return report(matrix(np.diag([5, 5, 5, 5])))

    def test_column_order(self):
        frame = table_frame([("Global Model (FL)", self.perfect(), self.perfect())])
        assert list(frame.columns) == ['Algorithms'] + list(TABLE_COLUMNS)
        assert TABLE_COLUMNS == ('Precision (%)', 'Recall (%)', 'F1-Score (%)', 'Training Accuracy (%)',
                                 'Training loss', 'Validation Accuracy (%)', 'Validation loss')

    def test_perfect_row(self):
        row = table_frame([("LINEAR", self.perfect(), self.perfect())]).iloc[0]
        assert [row[column] for column in TABLE_COLUMNS] == ['100.00', '100.00', '100.00', '100.00', '0.00', '100.00', '0.00']

    def test_percentages(self):
        metrics = report(matrix([[8, 2], [1, 9]], TWO_CLASSES), mean_loss=0.4567)
        row = table_frame([("Ensemble Model", metrics, metrics)]).iloc[0]
        assert row['Validation Accuracy (%)'] == '85.00'
        assert row['Validation loss'] == '0.46'

    def test_deterministic_rendering(self):
        rows = [("Global Model (FL)", self.perfect(), self.perfect()), ("MLP", self.perfect(), self.perfect())]
        assert render_table(rows) == render_table(list(rows))
        assert render_table(rows).endswith("\n")

    def test_needs_a_row(self):
        with pytest.raises(ArgumentError):
            render_table([])


class TestExport:

    def test_report_json_round_trip(self, tmp_path):
        metrics = report(matrix([[5, 0, 1], [0, 4, 0], [2, 0, 3]]), mean_loss=0.3)
        save_report_json(metrics, tmp_path / 'report.json')
        assert load_report_json(tmp_path / 'report.json') == metrics

    def test_report_schema_is_strict(self):
        data = report(matrix(np.eye(2))).to_dict()
        data['extra'] = 1
        with pytest.raises(ArgumentError):
            MetricsReport.from_dict(data)

    def test_confusion_csv(self, tmp_path):
        cm = matrix([[8, 2], [1, 9]], TWO_CLASSES)
        path = save_confusion_csv(cm, tmp_path / 'confusion.csv')
        assert path.read_text().splitlines()[0] == 'true\\predicted,negative,positive'
        frame = load_confusion_csv(path)
        assert frame.loc['positive', 'negative'] == 1
        np.testing.assert_array_equal(frame.to_numpy(), cm.counts)
