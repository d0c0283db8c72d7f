import numpy as np
from GlobalUtils.globalUtils import ArgumentError
from GlobalUtils.logger import logger
from DataHandler.Dataset import Dataset, LabelSpace
from Numerics.rngStream import RngStream


def blob_centers(rng: RngStream, num_classes: int, dim: int, separation: float) -> np.ndarray:
    """Cluster centers with pairwise distance >= separation.

    dim >= num_classes: random orthonormal directions scaled by separation/sqrt(2), so
    every pair sits exactly `separation` apart. Otherwise the centers are spaced
    `separation` apart along the first axis.
    """
    if dim >= num_classes:
        basis, _ = np.linalg.qr(rng.normal(dim * dim).reshape(dim, dim))
        return basis[:, :num_classes].T * (separation / np.sqrt(2.0))
    centers = np.zeros((num_classes, dim))
    centers[:, 0] = separation * np.arange(num_classes)
    return centers

def generate_blobs(rng: RngStream, per_class: int, dim: int, separation: float, label_space: LabelSpace = None) -> Dataset:
    label_space = label_space or LabelSpace()
    if per_class < 1:
        raise ArgumentError(f"SyntheticData - per_class must be >= 1, got {per_class}")
    if dim < 1:
        raise ArgumentError(f"SyntheticData - dim must be >= 1, got {dim}")
    if not separation > 0:
        raise ArgumentError(f"SyntheticData - separation must be > 0, got {separation}")

    centers = blob_centers(rng, label_space.N, dim, separation)
    labels = np.repeat(np.arange(label_space.N), per_class)
    noise = rng.normal(labels.size * dim).reshape(labels.size, dim)
    features = centers[labels] + noise
    dataset = Dataset(features, labels, label_space)
    logger.info(f"SyntheticData - Generated blobs: {dataset.describe()}, separation {separation}.")
    return dataset
