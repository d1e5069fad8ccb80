"""
Synthetic open-set datasets - isotropic Gaussian classes around well separated means.
"""
import numpy as np
from numpy import ndarray
from scipy.spatial.distance import pdist, squareform
from .table import FeatureTable
from ..constants.data import REPULSION_MAX_ITERATIONS, REPULSION_MARGIN
from ..exceptions import ParameterError
from ..utils import logger


def _class_means(n_classes: int, dim: int, separation: float, rng: np.random.Generator) -> ndarray:
    """
    Sample class means on a scaled hypersphere, then repel pairs closer than the separation.

    Each repulsion round moves both members of every violating pair half of the missing distance apart (with a small
    margin), which only ever increases the violating distances.
    """
    directions = rng.standard_normal((n_classes, dim))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    means = directions * separation

    for _ in range(REPULSION_MAX_ITERATIONS):
        distances = squareform(pdist(means))
        np.fill_diagonal(distances, np.inf)
        if distances.min() >= separation:
            return means

        deficit = np.clip(separation * REPULSION_MARGIN - distances, 0, None)
        offsets = means[:, None, :] - means[None, :, :]
        push = (deficit / (2 * np.maximum(distances, np.finfo(float).tiny)))[:, :, None] * offsets
        means = means + push.sum(axis=1)

    raise ParameterError(f"Failed to separate {n_classes} class means by {separation} in {dim} dimensions")


def generate_synthetic(n_classes: int, dim: int, n_per_class: int, separation: float, noise_sigma: float,
                       seed: int) -> FeatureTable:
    """
    Generate a fully labeled table of `n_classes` Gaussian classes with exactly `n_per_class` records each.

    Class means are at least `separation` apart, and each record is its class mean plus isotropic Gaussian noise of
    scale `noise_sigma`. Records are ordered by class, with ids 0..n-1. The same seed always gives the same table.
    """
    if n_classes < 2 or dim < 2 or n_per_class < 1:
        raise ParameterError(f"Invalid counts - n_classes={n_classes}, dim={dim}, n_per_class={n_per_class}")
    if not separation > 0 or not noise_sigma > 0:
        raise ParameterError(f"Separation and noise must be positive, got {separation} and {noise_sigma}")

    means_rng, noise_rng = (np.random.default_rng(sequence) for sequence in np.random.SeedSequence(seed).spawn(2))
    means = _class_means(n_classes, dim, separation, means_rng)

    labels = np.repeat(np.arange(n_classes), n_per_class)
    features = means[labels] + noise_sigma * noise_rng.standard_normal((labels.size, dim))

    logger.info(f"Generated {labels.size} records of {n_classes} classes in {dim} dimensions")
    return FeatureTable(np.arange(labels.size), labels, features)


def generated_means(n_classes: int, dim: int, separation: float, seed: int) -> ndarray:
    """
    Recover the class means `generate_synthetic` uses for the given parameters.
    """
    means_rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(2)[0])
    return _class_means(n_classes, dim, separation, means_rng)
