"""
Meta-classification, similarity and consistency losses with their analytic gradients.
"""
from typing import Dict, List, Sequence, Tuple
import numpy as np
from numpy import ndarray
from ..embedding import PredictionHead, comb_embed, comb_embed_backward, l2_normalize, l2_normalize_backward, softmax
from ..embedding import cosine_similarities, cosine_similarities_backward
from ..exceptions import LabelError, ShapeError


def meta_loss(z_slices: Sequence[ndarray], meta_labels: ndarray, thetas: Sequence[ndarray],
              temperature: float) -> Tuple[float, List[ndarray], List[ndarray]]:
    """
    Meta-classification loss of labeled items.

    For every item and meta-class set, the cosine similarities of the subvector with the set's prototypes, divided by
    the temperature, feed a softmax whose negative log-likelihood of the item's meta-class is taken. Values are summed
    over the sets and averaged over the items.

    Returns the loss, the gradients of the subvectors and the gradients of the prototype matrices.

    `LabelError` will be thrown for meta-class labels outside of a set.
    """
    meta_labels = np.atleast_2d(np.asarray(meta_labels, dtype=np.int64))
    n = meta_labels.shape[0]
    if meta_labels.shape[1] != len(thetas) or len(z_slices) != len(thetas):
        raise ShapeError(f"Expected {len(thetas)} meta-class sets, got {len(z_slices)} slices and "
                         f"{meta_labels.shape[1]} labels per item")

    loss, grad_slices, grad_thetas = 0.0, [], []
    for index, (z_m, theta_m) in enumerate(zip(z_slices, thetas)):
        labels = meta_labels[:, index]
        if ((labels < 0) | (labels >= theta_m.shape[1])).any():
            raise LabelError(f"Meta-class labels of set {index} must be in 0..{theta_m.shape[1] - 1}")

        weights = softmax(np.atleast_2d(cosine_similarities(z_m, theta_m)) / temperature)
        loss -= np.sum(np.log(weights[np.arange(n), labels]))

        grad_logits = weights.copy()
        grad_logits[np.arange(n), labels] -= 1
        grad_z, grad_theta = cosine_similarities_backward(z_m, theta_m, grad_logits / (temperature * n))
        grad_slices.append(grad_z)
        grad_thetas.append(grad_theta)

    return float(loss / n), grad_slices, grad_thetas


def sim_loss(z: ndarray, embeddings: ndarray, positives: Sequence[ndarray]) -> Tuple[float, ndarray, ndarray]:
    """
    Similarity loss pulling every anchor towards the combinatorial embeddings of its positives.

    For an anchor with positive set P, the loss is the mean over P of the negative log-softmax of the inner products
    between the normalised anchor z and the normalised combinatorial embeddings of all other batch members. Anchors
    without positives are skipped and the loss is averaged over the remaining ones (0 when there are none).

    Returns the loss and the gradients of z and of the combinatorial embeddings.
    """
    z = np.atleast_2d(z)
    embeddings = np.atleast_2d(embeddings)
    n = z.shape[0]
    anchors = [index for index in range(n) if np.any(np.asarray(positives[index]) != index)]
    if not anchors:
        return 0.0, np.zeros_like(z), np.zeros_like(embeddings)

    unit_z = l2_normalize(z)
    unit_embeddings = l2_normalize(embeddings)
    logits = unit_z @ unit_embeddings.T
    np.fill_diagonal(logits, -np.inf)

    loss = 0.0
    grad_logits = np.zeros((n, n))
    for anchor in anchors:
        members = np.asarray(positives[anchor], dtype=np.int64)
        members = members[members != anchor]
        shifted = logits[anchor] - np.max(logits[anchor])
        log_weights = shifted - np.log(np.sum(np.exp(shifted)))
        loss -= np.mean(log_weights[members])

        grad_logits[anchor] = np.exp(log_weights)
        grad_logits[anchor, members] -= 1 / members.size

    grad_logits /= len(anchors)
    grad_z = l2_normalize_backward(z, grad_logits @ unit_embeddings)
    grad_embeddings = l2_normalize_backward(embeddings, grad_logits.T @ unit_z)
    return float(loss / len(anchors)), grad_z, grad_embeddings


def consistency(predicted: ndarray, target: ndarray) -> Tuple[float, ndarray, ndarray]:
    """
    Negative cosine similarity between predictions and targets, averaged over the items.

    The target is treated as a constant - its gradient is returned as exact zeros.
    """
    predicted = np.atleast_2d(predicted)
    target = np.atleast_2d(target)
    n = predicted.shape[0]
    unit_target = l2_normalize(target)
    loss = -np.sum(l2_normalize(predicted) * unit_target) / n
    grad_predicted = l2_normalize_backward(predicted, -unit_target / n)
    return float(loss), grad_predicted, np.zeros_like(target)


def cons_loss(z: ndarray, z_prime: ndarray, thetas: Sequence[ndarray], scale: float, head: PredictionHead,
              target: ndarray = None) -> Tuple[float, Dict[str, object]]:
    """
    Consistency loss between the prediction head applied to the combinatorial embedding of one view and the
    combinatorial embedding of the other view.

    No gradient flows through the other view. A precomputed `target` replaces its combinatorial embedding.

    Returns the loss and a dictionary of gradients - `z`, `z_prime` (always zeros), `thetas` (one per set) and `head`
    (by parameter name).
    """
    z = np.atleast_2d(z)
    embeddings = comb_embed(z, thetas, scale)
    predicted, cache = head.forward(embeddings)
    if target is None:
        target = comb_embed(np.atleast_2d(z_prime), thetas, scale)

    loss, grad_predicted, _ = consistency(predicted, target)
    grad_embeddings, grad_head = head.backward(cache, grad_predicted)
    grad_z, grad_thetas = comb_embed_backward(z, thetas, scale, grad_embeddings)
    return loss, {
        "z": grad_z,
        "z_prime": np.zeros_like(np.atleast_2d(z_prime)),
        "thetas": grad_thetas,
        "head": grad_head,
    }
