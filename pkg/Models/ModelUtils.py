from dataclasses import dataclass, field
from enum import Enum
from math import isqrt
import numpy as np
from GlobalUtils.globalUtils import ArgumentError, CompatibilityError, ShapeError, format_shape

PROBABILITY_FLOOR = 1e-12
INIT_WEIGHT_STD = 0.05


class ArchitectureKind(Enum):
    LINEAR = "LINEAR"
    MLP = "MLP"
    CNN = "CNN"


@dataclass(frozen=True)
class Architecture:
    kind: ArchitectureKind
    input_shape: tuple
    num_classes: int = 4
    hidden_width: int = 32
    conv_filters: int = 4
    kernel_size: int = 3

    def __post_init__(self):
        object.__setattr__(self, 'kind', ArchitectureKind(self.kind))
        object.__setattr__(self, 'input_shape', tuple(int(extent) for extent in self.input_shape))
        if not self.input_shape or any(extent < 1 for extent in self.input_shape):
            raise ArgumentError(f"Architecture - input shape must have positive extents, got {self.input_shape}")
        if self.num_classes < 2:
            raise ArgumentError(f"Architecture - need at least 2 output classes, got {self.num_classes}")
        if self.hidden_width < 1 or self.conv_filters < 1 or self.kernel_size < 1:
            raise ArgumentError("Architecture - hidden width, filter count and kernel size must be positive")

    @property
    def input_size(self) -> int:
        return int(np.prod(self.input_shape))

    def to_dict(self) -> dict:
        return {
            'kind': self.kind.value,
            'input_shape': list(self.input_shape),
            'num_classes': self.num_classes,
            'hidden_width': self.hidden_width,
            'conv_filters': self.conv_filters,
            'kernel_size': self.kernel_size,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'Architecture':
        return cls(
            kind=ArchitectureKind(data['kind']),
            input_shape=tuple(data['input_shape']),
            num_classes=int(data['num_classes']),
            hidden_width=int(data.get('hidden_width', 32)),
            conv_filters=int(data.get('conv_filters', 4)),
            kernel_size=int(data.get('kernel_size', 3)),
        )


def image_shape(input_shape: tuple) -> tuple:
    if len(input_shape) == 3:
        return tuple(input_shape)
    if len(input_shape) == 2:
        return (input_shape[0], input_shape[1], 1)
    if len(input_shape) == 1:
        size = input_shape[0]
        height = max(divisor for divisor in range(1, isqrt(size) + 1) if size % divisor == 0)
        return (height, size // height, 1)
    raise ArgumentError(f"ModelUtils - cannot view input shape {input_shape} as an image")

def cnn_input_problem(input_shape: tuple, kernel_size: int = 3):
    """None when the CNN can take samples of this shape, else the reason it cannot."""
    try:
        height, width, _ = image_shape(tuple(input_shape))
    except ArgumentError as e:
        return str(e)
    if height - kernel_size + 1 < 2 or width - kernel_size + 1 < 2:
        return (f"input shape {format_shape(input_shape)} is viewed as a {height}x{width} image, too small for "
                f"a {kernel_size}x{kernel_size} kernel followed by 2x2 pooling")
    return None


@dataclass(frozen=True, eq=False)
class ParameterVector:
    """Flat view of every weight and bias: layer-major, weights before biases, row-major within a layer."""
    arch_kind: ArchitectureKind
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64).reshape(-1)
        values.setflags(write=False)
        object.__setattr__(self, 'arch_kind', ArchitectureKind(self.arch_kind))
        object.__setattr__(self, 'values', values)

    def __len__(self) -> int:
        return int(self.values.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ParameterVector):
            return NotImplemented
        return self.arch_kind == other.arch_kind and np.array_equal(self.values, other.values)

    def check_averageable(self, other: 'ParameterVector'):
        if self.arch_kind != other.arch_kind:
            raise CompatibilityError(f"ParameterVector - cannot combine {self.arch_kind.value} with {other.arch_kind.value}")
        if len(self) != len(other):
            raise CompatibilityError(f"ParameterVector - length mismatch for {self.arch_kind.value}: {len(self)} vs {len(other)}")


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.05
    epochs: int = 20
    batch_size: int = 32
    seed: int = 0

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise ArgumentError("TrainConfig - " + "; ".join(problems))

    def problems(self) -> list:
        problems = []
        if not self.learning_rate >= 0:
            problems.append(f"learning_rate must be >= 0, got {self.learning_rate}")
        if self.epochs < 1:
            problems.append(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            problems.append(f"batch_size must be >= 1, got {self.batch_size}")
        if not 0 <= self.seed < 2**64:
            problems.append(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        return problems


@dataclass(frozen=True, eq=False)
class BaseLearner:
    architecture: Architecture
    params: ParameterVector
    loss_history: tuple = field(default=())

    @property
    def kind(self) -> ArchitectureKind:
        return self.architecture.kind


def cross_entropy(probs: np.ndarray, labels) -> float:
    """Mean multiclass cross-entropy; probabilities are clamped to 1e-12 before the log."""
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    if probs.ndim != 2:
        raise ShapeError(f"ModelUtils - cross_entropy expects an (m, N) probability matrix, got shape {probs.shape}")
    if probs.shape[0] == 0:
        raise ArgumentError("ModelUtils - cross_entropy of an empty batch is undefined")
    if probs.shape[0] != labels.size:
        raise ShapeError(f"ModelUtils - {probs.shape[0]} probability rows but {labels.size} labels")
    picked = probs[np.arange(labels.size), labels]
    return float(-np.mean(np.log(np.maximum(picked, PROBABILITY_FLOOR))))

def one_hot(labels, num_classes: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    encoded = np.zeros((labels.size, num_classes))
    encoded[np.arange(labels.size), labels] = 1.0
    return encoded

def argmax_lowest(scores: np.ndarray) -> np.ndarray:
    # np.argmax returns the first maximum, i.e. the lowest class index on ties
    return np.argmax(scores, axis=-1)
