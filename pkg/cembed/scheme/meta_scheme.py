"""
Meta-class schemes - M partitions of the seen classes into meta-classes, built by k-means over class embeddings.
"""
import math
from dataclasses import dataclass
from typing import Dict, Tuple
import numpy as np
from numpy import ndarray
from .embeddings import ClassEmbeddingMatrix
from ..constants.data import UNLABELED
from ..constants.scheme import KMEANS_MAX_ITER, KMEANS_TOLERANCE, KMEANS_RESTARTS, MAX_ATTEMPTS, SUBSPACE_DIVISOR
from ..evaluation.clustering import kmeans
from ..exceptions import FormatError, ParameterError, SchemeConstructionError, UnknownClassError
from ..utils import logger, as_seed


@dataclass(frozen=True)
class MetaClassScheme:
    """
    Partitions of the seen classes into meta-classes, one per meta-class set.

        - classes, the seen classes in ascending order
        - sizes, the number of meta-classes K_m of each set
        - assignment, for each set, the meta-class of each class (in the order of `classes`)
        - subspace_dims, for each set, the Q class embedding coordinates it was clustered on
        - seed, the seed the scheme was built with

    Every meta-class of every set holds at least one base class.
    """

    classes: Tuple[int, ...]
    sizes: Tuple[int, ...]
    assignment: Tuple[Tuple[int, ...], ...]
    subspace_dims: Tuple[Tuple[int, ...], ...]
    seed: int = 0

    def __post_init__(self):
        if not self.sizes or len(self.assignment) != len(self.sizes) or len(self.subspace_dims) != len(self.sizes):
            raise ParameterError("A scheme needs sizes, assignments and subspaces for every meta-class set")
        for size, assignment in zip(self.sizes, self.assignment):
            if len(assignment) != len(self.classes):
                raise ParameterError("Every meta-class set must assign every seen class")
            if sorted(set(assignment)) != list(range(size)):
                raise ParameterError(f"Meta-classes of a set of size {size} must all be used, got {assignment}")

    @property
    def num_sets(self) -> int:
        """
        Get the number of meta-class sets (M).
        """
        return len(self.sizes)

    @property
    def subspace_dim(self) -> int:
        """
        Get the number of sampled class embedding coordinates (Q).
        """
        return len(self.subspace_dims[0])

    @property
    def _rank(self) -> Dict[int, int]:
        return {class_index: rank for rank, class_index in enumerate(self.classes)}


def _canonical(labels: ndarray) -> Tuple[int, ...]:
    """
    Renumber cluster labels in the order of their first appearance.
    """
    order: Dict[int, int] = {}
    for label in labels.tolist():
        order.setdefault(label, len(order))
    return tuple(order[label] for label in labels.tolist())


def build_scheme(embs: ClassEmbeddingMatrix, num_sets: int, meta_classes: int, subspace_dim: int,
                 seed: int) -> MetaClassScheme:
    """
    Build M meta-class sets by clustering the class embeddings in random coordinate subspaces.

    For each set, Q distinct coordinates are sampled and k-means (k = meta_classes, k-means++ seeding) clusters the
    projected class embeddings, the cluster of each class being its meta-class. A clustering with an empty cluster is
    re-run with the next sub-seed, up to 32 attempts. A subspace dimension of 0 picks ceil(d1 / 4).

    `ParameterError` will be thrown for invalid sizes, `SchemeConstructionError` if every attempt leaves a meta-class
    empty.
    """
    n_classes, dim = embs.rows.shape
    subspace_dim = subspace_dim or math.ceil(dim / SUBSPACE_DIVISOR)
    if num_sets < 1:
        raise ParameterError(f"At least one meta-class set is needed, got {num_sets}")
    if not 1 <= meta_classes <= n_classes:
        raise ParameterError(f"Can't split {n_classes} seen classes into {meta_classes} meta-classes")
    if not 1 <= subspace_dim <= dim:
        raise ParameterError(f"Subspace dimension must be between 1 and {dim}, got {subspace_dim}")

    assignments, subspaces = [], []
    for set_index in range(num_sets):
        for attempt in range(MAX_ATTEMPTS):
            rng = np.random.default_rng([seed, set_index, attempt])
            dims = np.sort(rng.choice(dim, size=subspace_dim, replace=False))
            result = kmeans(embs.rows[:, dims], meta_classes, as_seed(seed, set_index, attempt),
                            max_iter=KMEANS_MAX_ITER, tolerance=KMEANS_TOLERANCE, restarts=KMEANS_RESTARTS,
                            fill_empty=False)
            if not result.empty_clusters.size:
                break
            logger.debug(f"Meta-class set {set_index} left {result.empty_clusters.size} meta-classes empty on attempt "
                         f"{attempt}, retrying")
        else:
            raise SchemeConstructionError(f"Failed to build meta-class set {set_index} without empty meta-classes in "
                                          f"{MAX_ATTEMPTS} attempts")

        assignments.append(_canonical(result.assignments))
        subspaces.append(tuple(int(value) for value in dims))

    scheme = MetaClassScheme(embs.classes, (meta_classes,) * num_sets, tuple(assignments), tuple(subspaces), seed)
    logger.info(f"Built {num_sets} meta-class sets of {meta_classes} meta-classes over {n_classes} seen classes, "
                f"{code_bits(scheme)} bits per code")
    return scheme


def meta_label(scheme: MetaClassScheme, set_index: int, base_class: int) -> int:
    """
    Look up the meta-class of a seen class in one meta-class set.

    `UnknownClassError` will be thrown for classes the scheme was not built over (e.g. novel classes).
    """
    if not 0 <= set_index < scheme.num_sets:
        raise ParameterError(f"Meta-class set {set_index} doesn't exist, the scheme has {scheme.num_sets}")
    rank = scheme._rank.get(int(base_class))
    if rank is None:
        raise UnknownClassError(f"Class {base_class} is not a seen class of the scheme")
    return scheme.assignment[set_index][rank]


def meta_labels(scheme: MetaClassScheme, labels: ndarray) -> ndarray:
    """
    Look up the meta-classes of many records at once, shape (n, M).

    Unlabeled records (label -1) get -1 in every set, any other unknown class raises `UnknownClassError`.
    """
    labels = np.asarray(labels, dtype=np.int64)
    table = np.asarray(scheme.assignment, dtype=np.int64).T
    rank = scheme._rank
    result = np.full((labels.size, scheme.num_sets), UNLABELED, dtype=np.int64)
    for row, label in enumerate(labels.tolist()):
        if label == UNLABELED:
            continue
        if label not in rank:
            raise UnknownClassError(f"Class {label} is not a seen class of the scheme")
        result[row] = table[rank[label]]
    return result


def set_bits(size: int) -> int:
    """
    Number of bits needed to store one meta-class index of a set of the given size, ceil(log2 K).
    """
    return (int(size) - 1).bit_length()


def code_bits(scheme: MetaClassScheme) -> int:
    """
    Storage budget of one compact code, the sum of ceil(log2 K_m) over the meta-class sets.
    """
    return sum(set_bits(size) for size in scheme.sizes)


def save_scheme(scheme: MetaClassScheme, path: str):
    """
    Save a scheme in the text form.

    Line 1 is `M Q seed`, line 2 the sizes K_1..K_M, then one line per set with the meta-class of each seen class (in
    ascending class order), then one line per set with its subspace coordinates.
    """
    if scheme.classes != tuple(range(len(scheme.classes))):
        raise FormatError(f"Scheme files require seen classes 0..{len(scheme.classes) - 1}, got {scheme.classes}")

    lines = [f"{scheme.num_sets} {scheme.subspace_dim} {scheme.seed}", " ".join(str(size) for size in scheme.sizes)]
    lines += [" ".join(str(value) for value in assignment) for assignment in scheme.assignment]
    lines += [" ".join(str(value) for value in dims) for dims in scheme.subspace_dims]
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write("\n".join(lines) + "\n")
    except OSError as ex:
        raise FormatError(f"Failed to write scheme {path} - {ex}") from ex


def load_scheme(path: str) -> MetaClassScheme:
    """
    Load a scheme saved by `save_scheme`.
    """
    try:
        with open(path, encoding="utf-8") as f:
            lines = [line.split() for line in f.read().splitlines() if line.strip()]
    except OSError as ex:
        raise FormatError(f"Failed to read scheme {path} - {ex}") from ex

    try:
        num_sets, subspace_dim, seed = (int(value) for value in lines[0])
        sizes = tuple(int(value) for value in lines[1])
        assignment = tuple(tuple(int(value) for value in line) for line in lines[2:2 + num_sets])
        subspaces = tuple(tuple(int(value) for value in line) for line in lines[2 + num_sets:2 + 2 * num_sets])
    except (ValueError, IndexError) as ex:
        raise FormatError(f"Malformed scheme file {path} - {ex}") from ex

    if len(sizes) != num_sets or len(assignment) != num_sets or len(subspaces) != num_sets \
            or len(lines) != 2 + 2 * num_sets:
        raise FormatError(f"Scheme file {path} must hold {num_sets} sizes, assignments and subspaces",
                          f"line {min(len(lines), 2 + 2 * num_sets)}")
    if any(len(dims) != subspace_dim for dims in subspaces):
        raise FormatError(f"Every subspace of {path} must have {subspace_dim} coordinates")

    try:
        return MetaClassScheme(tuple(range(len(assignment[0]))), sizes, assignment, subspaces, seed)
    except ParameterError as ex:
        raise FormatError(f"Invalid scheme in {path} - {ex}") from ex
