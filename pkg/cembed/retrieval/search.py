"""
Asymmetric search - raw query subvectors scored against the prototypes the database codes point to.
"""
from typing import List, Optional, Sequence, Tuple
import numpy as np
from numpy import ndarray
from .codes import CodeIndex
from ..embedding import cosine_similarities, split_subvectors
from ..exceptions import CodeError, ParameterError


def _subvectors(z_q: ndarray, codebook: Sequence[ndarray]) -> List[ndarray]:
    z_q = np.asarray(z_q, dtype=np.float64)
    if z_q.ndim != 1 or z_q.shape[0] != sum(theta.shape[0] for theta in codebook):
        raise CodeError(f"Query of shape {z_q.shape} doesn't fit a codebook of {len(codebook)} sets")
    return split_subvectors(z_q, len(codebook))


def asymmetric_distance(z_q: ndarray, code: ndarray, codebook: Sequence[ndarray]) -> float:
    """
    Sum over the meta-class sets of the cosine distance between the query subvector and the coded prototype, in
    [0, 2M].

    `CodeError` will be thrown for indices outside of the codebook.
    """
    code = np.asarray(code, dtype=np.int64)
    if code.shape != (len(codebook),):
        raise CodeError(f"Expected a code of {len(codebook)} indices, got shape {code.shape}")

    distance = 0.0
    for z_m, theta_m, index in zip(_subvectors(z_q, codebook), codebook, code.tolist()):
        if not 0 <= index < theta_m.shape[1]:
            raise CodeError(f"Index {index} is outside of a meta-class set of size {theta_m.shape[1]}")
        distance += 1 - float(cosine_similarities(z_m, theta_m[:, [index]])[0])
    return distance


def distance_table(z_q: ndarray, codebook: Sequence[ndarray]) -> List[ndarray]:
    """
    Cosine distances of each query subvector to every prototype of its set, one (K_m,) vector per set.
    """
    return [1 - cosine_similarities(z_m, theta_m) for z_m, theta_m in zip(_subvectors(z_q, codebook), codebook)]


def search(z_q: ndarray, index: CodeIndex, topk: Optional[int] = None) -> Tuple[ndarray, ndarray]:
    """
    Rank the database by ascending asymmetric distance to a raw query vector, ties going to the lower id.

    The distance table is computed once, after which every item costs M lookups. Returns the ranked ids and their
    distances, limited to `topk` items (all of them when not given).

    `ParameterError` will be thrown for an empty index or a negative `topk`, `CodeError` without a codebook.
    """
    if not len(index):
        raise ParameterError("Can't search an empty index")
    if topk is not None and topk < 0:
        raise ParameterError(f"Number of results must be non-negative, got {topk}")
    if index.codebook is None:
        raise CodeError("The index has no codebook attached")

    table = distance_table(z_q, index.codebook)
    distances = np.zeros(len(index))
    for set_index, distances_m in enumerate(table):
        distances += distances_m[index.codes[:, set_index]]

    order = np.lexsort((index.ids, distances))[:topk]
    return index.ids[order], distances[order]
