from dataclasses import dataclass
from enum import Enum
import numpy as np
from GlobalUtils.globalUtils import ArgumentError

WEIGHT_FLOOR = 1e-6
# relative to the summed weight; absorbs rounding in sums like 0.1 + 0.2
TIE_TOLERANCE = 1e-9


class VoteMethod(Enum):
    VOTE = "vote"
    WEIGHTED_VOTE = "weighted_vote"

class VoteWeighting(Enum):
    VALIDATION = "validation"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class VoteWeights:
    w: tuple

    def __post_init__(self):
        weights = tuple(float(weight) for weight in self.w)
        object.__setattr__(self, 'w', weights)
        if not weights:
            raise ArgumentError("VoteWeights - at least one weight is required")
        if any(not np.isfinite(weight) or weight < 0 for weight in weights):
            raise ArgumentError(f"VoteWeights - weights must be finite and nonnegative, got {list(weights)}")
        if not any(weight > 0 for weight in weights):
            raise ArgumentError("VoteWeights - at least one weight must be positive")

    @classmethod
    def uniform(cls, K: int) -> 'VoteWeights':
        return cls((1.0,) * K)

    def __len__(self) -> int:
        return len(self.w)


def _check_votes(votes) -> np.ndarray:
    votes = np.asarray(votes, dtype=np.int64).reshape(-1)
    if votes.size == 0:
        raise ArgumentError("EnsembleUtils - cannot vote over an empty vote list")
    if votes.min() < 0:
        raise ArgumentError(f"EnsembleUtils - class indices must be nonnegative, got {votes.tolist()}")
    return votes

def _lowest_best(scores: np.ndarray) -> np.ndarray:
    """Index of the best score along the last axis; scores within TIE_TOLERANCE of the total weight count as tied."""
    slack = TIE_TOLERANCE * scores.sum(axis=-1, keepdims=True)
    return np.argmax(scores >= scores.max(axis=-1, keepdims=True) - slack, axis=-1)

def majority_vote(votes) -> int:
    """Most frequent class; ties go to the lowest class index."""
    votes = _check_votes(votes)
    return int(np.argmax(np.bincount(votes)))

def weighted_vote(votes, weights: VoteWeights) -> int:
    """argmax_i sum_j w_j [h_j == i]; ties go to the lowest class index."""
    votes = _check_votes(votes)
    if len(weights) != votes.size:
        raise ArgumentError(f"EnsembleUtils - {votes.size} votes but {len(weights)} weights")
    return int(_lowest_best(np.bincount(votes, weights=np.asarray(weights.w))))

def vote_matrix(predictions: np.ndarray, weights: VoteWeights, num_classes: int) -> np.ndarray:
    scores = np.zeros((predictions.shape[1], num_classes))
    for member_predictions, weight in zip(predictions, weights.w):
        scores[np.arange(predictions.shape[1]), member_predictions] += weight
    return _lowest_best(scores)
