from dataclasses import dataclass, field
import numpy as np
from GlobalUtils.globalUtils import ArgumentError, ShapeError, format_shape

DEFAULT_CLASS_NAMES = ("glioma", "meningioma", "pituitary", "notumor")


@dataclass(frozen=True)
class LabelSpace:
    class_names: tuple = DEFAULT_CLASS_NAMES

    def __post_init__(self):
        names = tuple(str(name) for name in self.class_names)
        object.__setattr__(self, 'class_names', names)
        if len(names) < 2:
            raise ArgumentError(f"LabelSpace - at least 2 classes are required, got {len(names)}")
        if len(set(names)) != len(names):
            raise ArgumentError(f"LabelSpace - class names must be unique, got {list(names)}")

    @property
    def N(self) -> int:
        return len(self.class_names)


@dataclass(frozen=True, eq=False)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    label_space: LabelSpace = field(default_factory=LabelSpace)

    def __post_init__(self):
        features = np.array(self.features, dtype=np.float64)
        labels = np.array(self.labels, dtype=np.int64).reshape(-1)
        if features.ndim < 1:
            raise ShapeError("Dataset - features need a leading sample axis")
        if features.shape[0] != labels.shape[0]:
            raise ShapeError(f"Dataset - {features.shape[0]} feature rows but {labels.shape[0]} labels")
        if labels.size and (labels.min() < 0 or labels.max() >= self.label_space.N):
            raise ArgumentError(f"Dataset - labels must lie in [0, {self.label_space.N})")
        if not np.all(np.isfinite(features)):
            raise ArgumentError("Dataset - features must be finite")
        features.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, 'features', features)
        object.__setattr__(self, 'labels', labels)

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.label_space == other.label_space
                and self.features.shape == other.features.shape
                and np.array_equal(self.features, other.features)
                and np.array_equal(self.labels, other.labels))

    @property
    def feature_shape(self) -> tuple:
        return tuple(self.features.shape[1:])

    def subset(self, indices) -> 'Dataset':
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(self.features[indices], self.labels[indices], self.label_space)

    def class_indices(self, class_index: int) -> np.ndarray:
        return np.flatnonzero(self.labels == class_index)

    def class_counts(self) -> list:
        return np.bincount(self.labels, minlength=self.label_space.N).tolist()

    def describe(self) -> str:
        return f"{len(self)} samples of shape {format_shape(self.feature_shape)}, class counts {self.class_counts()}"
