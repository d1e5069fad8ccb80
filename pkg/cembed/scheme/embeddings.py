"""
Class embeddings - one vector per seen class, the input of the meta-class scheme construction.
"""
import warnings
from dataclasses import dataclass
from typing import Callable, Tuple
import numpy as np
from numpy import ndarray
from sklearn.exceptions import ConvergenceWarning
from sklearn.linear_model import LogisticRegression
from ..constants.scheme import CLASSIFIER_C, CLASSIFIER_MAX_ITER
from ..data import FeatureTable, OpenSetSplit
from ..embedding import l2_normalize
from ..enums import EmbeddingMode
from ..exceptions import DataError
from ..utils import logger


@dataclass(frozen=True, eq=False)
class ClassEmbeddingMatrix:
    """
    One l2-normalised row per seen class, in ascending class order.
    """

    classes: Tuple[int, ...]
    rows: ndarray

    def __post_init__(self):
        if self.rows.ndim != 2 or self.rows.shape[0] != len(self.classes):
            raise DataError(f"Expected one row per class ({len(self.classes)}), got shape {self.rows.shape}")
        if not np.isfinite(self.rows).all():
            raise DataError("Class embeddings must be finite")

    @property
    def dim(self) -> int:
        """
        Get the class embedding dimension (d1).
        """
        return self.rows.shape[1]


def _classifier_weights(vectors: ndarray, labels: ndarray, classes: ndarray) -> ndarray:
    """
    Fit a bias-free softmax classifier on normalised vectors and return its weight rows, in class order.
    """
    classifier = LogisticRegression(C=CLASSIFIER_C, fit_intercept=False, max_iter=CLASSIFIER_MAX_ITER)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        classifier.fit(l2_normalize(vectors), labels)

    # Two classes are fitted as a single logit, which splits symmetrically into two softmax rows
    if classes.size == 2:
        return np.vstack([-classifier.coef_[0], classifier.coef_[0]]) / 2
    return classifier.coef_


def class_embeddings(table: FeatureTable, split: OpenSetSplit, encoder: Callable[[ndarray], ndarray],
                     mode: EmbeddingMode = EmbeddingMode.CLASSIFIER_WEIGHTS) -> ClassEmbeddingMatrix:
    """
    Compute one embedding per seen class from the encoded labeled records.

    In the classifier weights mode, a normalised softmax classifier is trained on the encoder outputs and its weight
    rows are returned. The class means mode averages the encoder outputs of each class. Rows are l2-normalised.

    `DataError` will be thrown if a seen class has no labeled records.
    """
    classes = np.array(sorted(split.seen_classes), dtype=np.int64)
    labeled = table.subset(sorted(split.labeled_ids))
    missing = sorted(set(classes.tolist()) - set(labeled.labels.tolist()))
    if missing:
        raise DataError(f"Seen classes {missing} have no labeled records")

    vectors = encoder(labeled.features)
    if mode == EmbeddingMode.CLASSIFIER_WEIGHTS and classes.size == 1:
        logger.warning("A single seen class can't train a classifier, falling back to the class mean")
        mode = EmbeddingMode.CLASS_MEANS

    if mode == EmbeddingMode.CLASSIFIER_WEIGHTS:
        rows = _classifier_weights(vectors, labeled.labels, classes)
    else:
        rows = np.vstack([vectors[labeled.labels == class_index].mean(axis=0) for class_index in classes])

    logger.info(f"Computed {mode.value} embeddings of dimension {rows.shape[1]} for {classes.size} seen classes")
    return ClassEmbeddingMatrix(tuple(int(value) for value in classes), l2_normalize(rows))
