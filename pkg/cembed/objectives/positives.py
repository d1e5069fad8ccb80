"""
Estimation of positive pairs within a batch, from the combinatorial embeddings of its items.
"""
from typing import List
import numpy as np
from numpy import ndarray
from ..constants.data import UNLABELED
from ..constants.embedding import SIMILARITY_TOLERANCE
from ..embedding import l2_normalize
from ..evaluation.clustering import kmeans
from ..exceptions import ParameterError


def _same_label(labels: ndarray) -> ndarray:
    """
    Pairwise mask of labeled items sharing a base class.
    """
    labeled = labels != UNLABELED
    return (labels[:, None] == labels[None, :]) & labeled[:, None] & labeled[None, :]


def select_positives(anchor_index: int, embeddings: ndarray, threshold: float, labels: ndarray = None) -> ndarray:
    """
    Select the positives of one anchor, in ascending index order.

    Positives are the other batch members whose normalised combinatorial embedding has a cosine similarity of at least
    `threshold` with the anchor's. Labeled anchors also get every other labeled member of their base class when
    `labels` (with -1 for unlabeled items) are given. The anchor itself is never selected.
    """
    unit = l2_normalize(np.atleast_2d(embeddings))
    if not 0 <= anchor_index < unit.shape[0]:
        raise ParameterError(f"Anchor {anchor_index} is outside of a batch of {unit.shape[0]}")

    mask = unit @ unit[anchor_index] >= threshold - SIMILARITY_TOLERANCE
    if labels is not None:
        mask |= _same_label(np.asarray(labels))[anchor_index]
    mask[anchor_index] = False
    return np.flatnonzero(mask)


def select_all_positives(embeddings: ndarray, threshold: float, labels: ndarray = None) -> List[ndarray]:
    """
    Select the positives of every batch member, see `select_positives`.
    """
    unit = l2_normalize(np.atleast_2d(embeddings))
    mask = unit @ unit.T >= threshold - SIMILARITY_TOLERANCE
    if labels is not None:
        mask |= _same_label(np.asarray(labels))
    np.fill_diagonal(mask, False)
    return [np.flatnonzero(row) for row in mask]


def cluster_positives(embeddings: ndarray, clusters: int, seed: int, labels: ndarray = None) -> List[ndarray]:
    """
    Select positives as the other members of the anchor's k-means cluster over the normalised embeddings.

    Labeled anchors also get the other labeled members of their base class, as in `select_all_positives`.
    """
    unit = l2_normalize(np.atleast_2d(embeddings))
    clusters = min(clusters, unit.shape[0])
    assignments = kmeans(unit, clusters, seed).assignments
    mask = assignments[:, None] == assignments[None, :]
    if labels is not None:
        mask |= _same_label(np.asarray(labels))
    np.fill_diagonal(mask, False)
    return [np.flatnonzero(row) for row in mask]
