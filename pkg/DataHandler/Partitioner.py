from dataclasses import dataclass
from math import floor
import numpy as np
from GlobalUtils.globalUtils import ArgumentError
from GlobalUtils.logger import logger
from DataHandler.Dataset import Dataset
from Numerics.rngStream import RngStream


@dataclass(frozen=True)
class Partition:
    client_shards: tuple

    @property
    def P(self) -> int:
        return len(self.client_shards)


def stratified_split(dataset: Dataset, train_fraction: float, rng: RngStream, require_all_classes: bool = True):
    """Per class, floor(train_fraction * count) shuffled samples go to train, the rest to test."""
    if not 0 < train_fraction < 1:
        raise ArgumentError(f"Partitioner - train_fraction must lie strictly between 0 and 1, got {train_fraction}")
    train_indices, test_indices = [], []
    for class_index, class_name in enumerate(dataset.label_space.class_names):
        members = dataset.class_indices(class_index)
        if members.size == 0:
            if require_all_classes:
                raise ArgumentError(f"Partitioner - class '{class_name}' has no samples to split")
            continue
        shuffled = members[rng.permutation(members.size)]
        cut = floor(train_fraction * members.size)
        train_indices.append(shuffled[:cut])
        test_indices.append(shuffled[cut:])
    train = dataset.subset(np.concatenate(train_indices) if train_indices else [])
    test = dataset.subset(np.concatenate(test_indices) if test_indices else [])
    return train, test

def _deal_round_robin(members: np.ndarray, P: int) -> list:
    return [members[shard::P] for shard in range(P)]

def _deal_dirichlet(members: np.ndarray, P: int, alpha: float, rng: RngStream) -> list:
    proportions = rng.generator.dirichlet([alpha] * P)
    cuts = np.floor(np.cumsum(proportions)[:-1] * members.size).astype(np.int64)
    return np.split(members, cuts)

def partition_clients(dataset: Dataset, P: int, rng: RngStream, dirichlet_alpha: float = None) -> Partition:
    """Deal every class over P client shards.

    Default: per-class shuffle then round-robin, giving stratified shards whose per-class
    sizes differ by at most one. With dirichlet_alpha set, each class is cut by
    Dirichlet(alpha) proportions instead (label-skewed shards, no balance guarantee).
    """
    if P < 1:
        raise ArgumentError(f"Partitioner - client count must be >= 1, got {P}")
    if dirichlet_alpha is not None and not dirichlet_alpha > 0:
        raise ArgumentError(f"Partitioner - dirichlet_alpha must be > 0, got {dirichlet_alpha}")

    shard_indices = [[] for _ in range(P)]
    for class_index, class_name in enumerate(dataset.label_space.class_names):
        members = dataset.class_indices(class_index)
        if members.size < P:
            raise ArgumentError(f"Partitioner - class '{class_name}' has {members.size} samples, fewer than {P} clients")
        shuffled = members[rng.permutation(members.size)]
        if dirichlet_alpha is None:
            dealt = _deal_round_robin(shuffled, P)
        else:
            dealt = _deal_dirichlet(shuffled, P, dirichlet_alpha, rng)
        for shard, indices in enumerate(dealt):
            shard_indices[shard].append(indices)

    shards = tuple(dataset.subset(np.concatenate(indices)) for indices in shard_indices)
    logger.info(f"Partitioner - Dealt {len(dataset)} samples to {P} clients: {[len(shard) for shard in shards]}.")
    return Partition(shards)
