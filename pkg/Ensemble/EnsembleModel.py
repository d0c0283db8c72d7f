import json
from dataclasses import dataclass, field
from pathlib import Path
import numpy as np
from GlobalUtils.globalUtils import ArgumentError, CompatibilityError, FileFormatError
from GlobalUtils.logger import logger
from DataHandler.Dataset import Dataset
from Ensemble.EnsembleUtils import WEIGHT_FLOOR, VoteMethod, VoteWeighting, VoteWeights, vote_matrix
from Models.Checkpoint.ModelCheckpoint import load_model, save_model
from Models.Master.MasterLearner import forward, predict_classes
from Models.ModelUtils import cross_entropy

ENSEMBLE_MANIFEST = 'ensemble.json'


@dataclass(frozen=True, eq=False)
class EnsembleModel:
    members: tuple
    weights: VoteWeights = None
    method: VoteMethod = VoteMethod.VOTE
    # ties between classes always resolve to the lowest class index
    tie_rule: str = field(default='lowest_class_index', init=False)

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise ArgumentError("EnsembleModel - an ensemble needs at least one member")
        class_counts = {member.architecture.num_classes for member in members}
        if len(class_counts) != 1:
            raise CompatibilityError(f"EnsembleModel - members disagree on the class count: {sorted(class_counts)}")
        weights = self.weights or VoteWeights.uniform(len(members))
        if len(weights) != len(members):
            raise ArgumentError(f"EnsembleModel - {len(members)} members but {len(weights)} weights")
        object.__setattr__(self, 'members', members)
        object.__setattr__(self, 'weights', weights)
        object.__setattr__(self, 'method', VoteMethod(self.method))

    @property
    def K(self) -> int:
        return len(self.members)

    @property
    def num_classes(self) -> int:
        return self.members[0].architecture.num_classes


def member_predictions(ensemble: EnsembleModel, batch: np.ndarray) -> np.ndarray:
    return np.stack([predict_classes(member, batch) for member in ensemble.members])

def ensemble_predict(ensemble: EnsembleModel, batch: np.ndarray, method: VoteMethod = None) -> np.ndarray:
    method = VoteMethod(method or ensemble.method)
    predictions = member_predictions(ensemble, batch)
    weights = ensemble.weights if method == VoteMethod.WEIGHTED_VOTE else VoteWeights.uniform(ensemble.K)
    return vote_matrix(predictions, weights, ensemble.num_classes)

def ensemble_loss(ensemble: EnsembleModel, data: Dataset) -> float:
    """Mean of the members' cross-entropies; the vote itself stays hard-label."""
    return float(np.mean([cross_entropy(forward(member, data.features), data.labels) for member in ensemble.members]))

def weights_from_validation(members, val: Dataset) -> VoteWeights:
    if len(val) == 0:
        raise ArgumentError("EnsembleModel - validation weights need a non-empty validation set")
    accuracies = [float(np.mean(predict_classes(member, val.features) == val.labels)) for member in members]
    return VoteWeights(tuple(max(accuracy, WEIGHT_FLOOR) for accuracy in accuracies))

def build_ensemble(members, val: Dataset, method: VoteMethod, weighting: VoteWeighting) -> EnsembleModel:
    if VoteWeighting(weighting) == VoteWeighting.VALIDATION and len(val) > 0:
        weights = weights_from_validation(members, val)
    else:
        weights = VoteWeights.uniform(len(members))
    return EnsembleModel(tuple(members), weights, method)

def save_ensemble(ensemble: EnsembleModel, path) -> Path:
    directory = Path(path)
    directory.mkdir(parents=True, exist_ok=True)
    member_dirs = []
    for index, member in enumerate(ensemble.members):
        name = f"member_{index:02d}_{member.kind.value.lower()}"
        save_model(member, directory / name)
        member_dirs.append(name)
    manifest = {
        'format_version': 1,
        'members': member_dirs,
        'weights': list(ensemble.weights.w),
        'method': ensemble.method.value,
    }
    with open(directory / ENSEMBLE_MANIFEST, 'w', encoding='utf-8') as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write('\n')
    logger.info(f"EnsembleModel - Saved {ensemble.K}-member ensemble to {directory}.")
    return directory

def is_ensemble_checkpoint(path) -> bool:
    return (Path(path) / ENSEMBLE_MANIFEST).is_file()

def load_ensemble(path) -> EnsembleModel:
    directory = Path(path)
    try:
        with open(directory / ENSEMBLE_MANIFEST, 'r', encoding='utf-8') as f:
            manifest = json.load(f)
        members = tuple(load_model(directory / name) for name in manifest['members'])
        return EnsembleModel(members, VoteWeights(tuple(manifest['weights'])), VoteMethod(manifest['method']))
    except FileNotFoundError as e:
        raise FileFormatError(f"EnsembleModel - ensemble.json: {e}")
    except (KeyError, TypeError, json.JSONDecodeError) as e:
        raise FileFormatError(f"EnsembleModel - ensemble.json: malformed manifest ({e})")
