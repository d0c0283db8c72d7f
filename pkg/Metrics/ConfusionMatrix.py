from dataclasses import dataclass, field
import numpy as np
from GlobalUtils.globalUtils import ArgumentError
from DataHandler.Dataset import LabelSpace


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """counts[t][p]: samples of true class t predicted as class p."""
    counts: np.ndarray
    label_space: LabelSpace

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConfusionMatrix):
            return NotImplemented
        return self.label_space == other.label_space and np.array_equal(self.counts, other.counts)


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    per_class_precision: tuple
    per_class_recall: tuple
    per_class_f1: tuple
    mean_loss: float
    class_names: tuple
    num_samples: int = 0
    is_empty: bool = False
    # classes whose precision or recall hit a zero denominator and were reported as 0
    zero_division_classes: tuple = field(default=())

    def to_dict(self) -> dict:
        return {
            'accuracy': self.accuracy,
            'precision': self.precision,
            'recall': self.recall,
            'f1': self.f1,
            'per_class_precision': list(self.per_class_precision),
            'per_class_recall': list(self.per_class_recall),
            'per_class_f1': list(self.per_class_f1),
            'mean_loss': self.mean_loss,
            'class_names': list(self.class_names),
            'num_samples': self.num_samples,
            'is_empty': self.is_empty,
            'zero_division_classes': list(self.zero_division_classes),
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'MetricsReport':
        expected = set(cls.__dataclass_fields__)
        unknown = set(data) - expected
        missing = expected - set(data)
        if unknown or missing:
            raise ArgumentError(f"MetricsReport - schema mismatch, unknown fields {sorted(unknown)}, missing fields {sorted(missing)}")
        return cls(
            accuracy=float(data['accuracy']),
            precision=float(data['precision']),
            recall=float(data['recall']),
            f1=float(data['f1']),
            per_class_precision=tuple(float(v) for v in data['per_class_precision']),
            per_class_recall=tuple(float(v) for v in data['per_class_recall']),
            per_class_f1=tuple(float(v) for v in data['per_class_f1']),
            mean_loss=float(data['mean_loss']),
            class_names=tuple(data['class_names']),
            num_samples=int(data['num_samples']),
            is_empty=bool(data['is_empty']),
            zero_division_classes=tuple(data['zero_division_classes']),
        )


def confusion(true_labels, predicted_labels, label_space: LabelSpace) -> ConfusionMatrix:
    true_labels = np.asarray(true_labels, dtype=np.int64).reshape(-1)
    predicted_labels = np.asarray(predicted_labels, dtype=np.int64).reshape(-1)
    if true_labels.size != predicted_labels.size:
        raise ArgumentError(f"ConfusionMatrix - {true_labels.size} true labels but {predicted_labels.size} predictions")
    N = label_space.N
    for name, labels in (('true', true_labels), ('predicted', predicted_labels)):
        if labels.size and (labels.min() < 0 or labels.max() >= N):
            raise ArgumentError(f"ConfusionMatrix - {name} labels must lie in [0, {N})")
    counts = np.zeros((N, N), dtype=np.int64)
    np.add.at(counts, (true_labels, predicted_labels), 1)
    return ConfusionMatrix(counts, label_space)

def _safe_ratio(numerator: float, denominator: float) -> float:
    return float(numerator / denominator) if denominator > 0 else 0.0

def report(cm: ConfusionMatrix, mean_loss: float = 0.0) -> MetricsReport:
    counts = cm.counts.astype(np.float64)
    true_positives = np.diag(counts)
    predicted_totals = counts.sum(axis=0)
    actual_totals = counts.sum(axis=1)
    names = cm.label_space.class_names

    precision, recall, f1, zero_division = [], [], [], []
    for index, name in enumerate(names):
        class_precision = _safe_ratio(true_positives[index], predicted_totals[index])
        class_recall = _safe_ratio(true_positives[index], actual_totals[index])
        if predicted_totals[index] == 0 or actual_totals[index] == 0:
            zero_division.append(name)
        precision.append(class_precision)
        recall.append(class_recall)
        f1.append(_safe_ratio(2 * class_precision * class_recall, class_precision + class_recall))

    total = cm.total
    return MetricsReport(
        accuracy=_safe_ratio(true_positives.sum(), total),
        precision=float(np.mean(precision)),
        recall=float(np.mean(recall)),
        f1=float(np.mean(f1)),
        per_class_precision=tuple(precision),
        per_class_recall=tuple(recall),
        per_class_f1=tuple(f1),
        mean_loss=float(mean_loss),
        class_names=tuple(names),
        num_samples=total,
        is_empty=total == 0,
        zero_division_classes=tuple(zero_division),
    )
