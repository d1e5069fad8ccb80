"""
Clustering metrics - Hungarian accuracy, normalised mutual information and adjusted Rand index.
"""
from typing import Dict, Tuple
import numpy as np
from numpy import ndarray
from scipy.optimize import linear_sum_assignment
from sklearn.metrics import adjusted_rand_score, normalized_mutual_info_score
from sklearn.metrics.cluster import contingency_matrix
from ..exceptions import ParameterError


def _check_labels(pred: ndarray, truth: ndarray) -> Tuple[ndarray, ndarray]:
    pred = np.asarray(pred, dtype=np.int64).ravel()
    truth = np.asarray(truth, dtype=np.int64).ravel()
    if not pred.size or pred.shape != truth.shape:
        raise ParameterError(f"Expected two non-empty label vectors of equal length, got {pred.size} and {truth.size}")
    return pred, truth


def hungarian_mapping(pred: ndarray, truth: ndarray) -> Dict[int, int]:
    """
    Find the one-to-one cluster to class mapping matching the most items.

    Clusters left without a class (when there are more clusters than classes) are absent from the mapping.
    """
    pred, truth = _check_labels(pred, truth)
    clusters, classes = np.unique(pred), np.unique(truth)
    confusion = contingency_matrix(pred, truth)

    # Rectangular matrices are solved as if padded with zero-weight dummies
    rows, columns = linear_sum_assignment(confusion, maximize=True)
    return {int(clusters[row]): int(classes[column]) for row, column in zip(rows, columns)}


def mapped_accuracy(pred: ndarray, truth: ndarray, mapping: Dict[int, int]) -> float:
    """
    Fraction of items whose cluster maps to their class.
    """
    pred, truth = _check_labels(pred, truth)
    mapped = np.array([mapping.get(cluster, -1) for cluster in pred.tolist()], dtype=np.int64)
    return float(np.mean(mapped == truth))


def hungarian_accuracy(pred: ndarray, truth: ndarray) -> Tuple[float, Dict[int, int]]:
    """
    Clustering accuracy under the optimal one-to-one cluster to class mapping, together with that mapping.

    `ParameterError` will be thrown for empty or unequal inputs.
    """
    mapping = hungarian_mapping(pred, truth)
    return mapped_accuracy(pred, truth, mapping), mapping


def nmi(pred: ndarray, truth: ndarray) -> float:
    """
    Normalised mutual information, normalised by the arithmetic mean of both entropies.

    Two single-cluster partitions score 1, a single-cluster partition against any other partition scores 0.
    """
    pred, truth = _check_labels(pred, truth)
    return float(normalized_mutual_info_score(truth, pred, average_method="arithmetic"))


def ari(pred: ndarray, truth: ndarray) -> float:
    """
    Adjusted Rand index, 1 exactly when both partitions are identical (also in the degenerate cases).
    """
    pred, truth = _check_labels(pred, truth)
    return float(adjusted_rand_score(truth, pred))
