"""
Soft assignment to meta-class prototypes and the combinatorial embedding, with their backward passes.

All functions accept a single vector or a batch of row vectors. Prototype matrices hold one prototype per column, and
both the inputs and the prototypes are l2-normalised before any inner product.
"""
from typing import List, Sequence, Tuple
import numpy as np
from numpy import ndarray
from ..constants.common import NORM_EPSILON
from ..exceptions import NormalizationError, ShapeError


def l2_normalize(v: ndarray, axis: int = -1) -> ndarray:
    """
    Scale vectors (along `axis`) to unit length.

    `NormalizationError` will be thrown if any of the vectors has a norm below 1e-12.
    """
    v = np.asarray(v, dtype=np.float64)
    norms = np.linalg.norm(v, axis=axis, keepdims=True)
    if (norms < NORM_EPSILON).any():
        raise NormalizationError("Can't normalise a vector of (near) zero length")
    return v / norms


def l2_normalize_backward(v: ndarray, grad: ndarray, axis: int = -1) -> ndarray:
    """
    Propagate the gradient of the normalised vectors back to the raw vectors.
    """
    v = np.asarray(v, dtype=np.float64)
    norms = np.linalg.norm(v, axis=axis, keepdims=True)
    unit = v / norms
    return (grad - unit * np.sum(unit * grad, axis=axis, keepdims=True)) / norms


def softmax(logits: ndarray) -> ndarray:
    """
    Row-wise softmax, shifted by the row maximum for stability.
    """
    shifted = logits - logits.max(axis=-1, keepdims=True)
    weights = np.exp(shifted)
    return weights / weights.sum(axis=-1, keepdims=True)


def _rows(v: ndarray) -> Tuple[ndarray, bool]:
    v = np.asarray(v, dtype=np.float64)
    return np.atleast_2d(v), v.ndim == 1


def cosine_similarities(z_m: ndarray, theta_m: ndarray) -> ndarray:
    """
    Cosine similarity of each subvector with each prototype column, shape (n, K).
    """
    rows, single = _rows(z_m)
    if rows.shape[1] != theta_m.shape[0]:
        raise ShapeError(f"Subvector dimension {rows.shape[1]} doesn't match prototypes of dimension "
                         f"{theta_m.shape[0]}")
    similarities = l2_normalize(rows) @ l2_normalize(theta_m, axis=0)
    return similarities[0] if single else similarities


def cosine_similarities_backward(z_m: ndarray, theta_m: ndarray, grad: ndarray) -> Tuple[ndarray, ndarray]:
    """
    Propagate the gradient of the (n, K) similarities to the subvectors and to the prototypes.
    """
    rows, single = _rows(z_m)
    grad = np.atleast_2d(grad)
    unit = l2_normalize(rows)
    prototypes = l2_normalize(theta_m, axis=0)
    grad_z = l2_normalize_backward(rows, grad @ prototypes.T)
    grad_theta = l2_normalize_backward(theta_m, unit.T @ grad, axis=0)
    return (grad_z[0] if single else grad_z), grad_theta


def assignment_weights(z_m: ndarray, theta_m: ndarray, scale: float) -> ndarray:
    """
    Softmax weights of the soft assignment, each row sums to 1.
    """
    return softmax(scale * np.atleast_2d(cosine_similarities(z_m, theta_m)))


def soft_assign(z_m: ndarray, theta_m: ndarray, scale: float) -> ndarray:
    """
    Softmax-weighted combination of the normalised prototypes, approaching the most similar prototype as the scale grows.
    """
    rows, single = _rows(z_m)
    assigned = assignment_weights(rows, theta_m, scale) @ l2_normalize(theta_m, axis=0).T
    return assigned[0] if single else assigned


def soft_assign_backward(z_m: ndarray, theta_m: ndarray, scale: float, grad: ndarray) -> Tuple[ndarray, ndarray]:
    """
    Propagate the gradient of the soft assignment output to the subvectors and to the prototypes.
    """
    rows, single = _rows(z_m)
    grad = np.atleast_2d(grad)
    prototypes = l2_normalize(theta_m, axis=0)
    weights = assignment_weights(rows, theta_m, scale)

    # Output is weights @ prototypes.T - both factors depend on the prototypes
    grad_weights = grad @ prototypes
    grad_prototypes = grad.T @ weights
    grad_similarities = scale * weights * (grad_weights - np.sum(weights * grad_weights, axis=1, keepdims=True))

    grad_z, grad_theta = cosine_similarities_backward(rows, theta_m, grad_similarities)
    grad_theta = grad_theta + l2_normalize_backward(theta_m, grad_prototypes, axis=0)
    return (grad_z[0] if single else grad_z), grad_theta


def split_subvectors(z: ndarray, num_sets: int) -> List[ndarray]:
    """
    Split vectors into `num_sets` contiguous, equally sized subvectors.
    """
    z = np.asarray(z, dtype=np.float64)
    if z.shape[-1] % num_sets:
        raise ShapeError(f"Dimension {z.shape[-1]} can't be split into {num_sets} equal subvectors")
    return np.split(z, num_sets, axis=-1)


def comb_embed(z: ndarray, thetas: Sequence[ndarray], scale: float) -> ndarray:
    """
    Concatenate the soft assignments of each subvector to its own meta-class set.
    """
    subvectors = split_subvectors(z, len(thetas))
    return np.concatenate([soft_assign(z_m, theta_m, scale) for z_m, theta_m in zip(subvectors, thetas)], axis=-1)


def comb_embed_backward(z: ndarray, thetas: Sequence[ndarray], scale: float,
                        grad: ndarray) -> Tuple[ndarray, List[ndarray]]:
    """
    Propagate the gradient of the combinatorial embedding to the encoder output and to every prototype matrix.
    """
    subvectors = split_subvectors(z, len(thetas))
    grads = split_subvectors(grad, len(thetas))
    grad_z, grad_thetas = [], []
    for z_m, theta_m, grad_m in zip(subvectors, thetas, grads):
        grad_z_m, grad_theta_m = soft_assign_backward(z_m, theta_m, scale, grad_m)
        grad_z.append(grad_z_m)
        grad_thetas.append(grad_theta_m)
    return np.concatenate(grad_z, axis=-1), grad_thetas


def hard_assign(z: ndarray, thetas: Sequence[ndarray]) -> ndarray:
    """
    Index of the most similar prototype for every subvector, shape (n, M). Ties go to the lowest index.
    """
    subvectors = split_subvectors(np.atleast_2d(z), len(thetas))
    return np.stack([np.argmax(cosine_similarities(z_m, theta_m), axis=1)
                     for z_m, theta_m in zip(subvectors, thetas)], axis=1)
