"""
Mini-batches of labeled and unlabeled items, each seen through two augmented views.
"""
from dataclasses import dataclass
import numpy as np
from numpy import ndarray
from ..constants.data import UNLABELED
from ..exceptions import LabelError, ShapeError
from ..scheme import MetaClassScheme, meta_labels


@dataclass(frozen=True, eq=False)
class Batch:
    """
    Two views of n items, with base-class labels (-1 for unlabeled items) and the (n, M) meta-class labels.
    """

    view1: ndarray
    view2: ndarray
    labels: ndarray
    meta_labels: ndarray

    def __post_init__(self):
        n = self.labels.shape[0]
        if self.view1.ndim != 2 or self.view1.shape != self.view2.shape or self.view1.shape[0] != n:
            raise ShapeError(f"Both views must hold one row per item ({n}), got {self.view1.shape} and "
                             f"{self.view2.shape}")
        if self.meta_labels.ndim != 2 or self.meta_labels.shape[0] != n:
            raise ShapeError(f"Expected one row of meta-class labels per item ({n}), got {self.meta_labels.shape}")
        if (self.meta_labels[~self.labeled] != UNLABELED).any():
            raise LabelError("Unlabeled items can't have meta-class labels")

    @property
    def size(self) -> int:
        """
        Get the number of items.
        """
        return self.labels.shape[0]

    @property
    def labeled(self) -> ndarray:
        """
        Get the mask of labeled items.
        """
        return self.labels != UNLABELED

    def check(self, scheme: MetaClassScheme):
        """
        Verify that the meta-class labels of the labeled items are the scheme's.

        `LabelError` will be thrown on a disagreement.
        """
        if self.meta_labels.shape[1] != scheme.num_sets or \
                not np.array_equal(self.meta_labels, meta_labels(scheme, self.labels)):
            raise LabelError("Meta-class labels of the batch disagree with the scheme")


def make_batch(view1: ndarray, view2: ndarray, labels: ndarray, scheme: MetaClassScheme) -> Batch:
    """
    Assemble a batch, looking the meta-class labels up in the scheme.
    """
    labels = np.asarray(labels, dtype=np.int64)
    return Batch(np.atleast_2d(np.asarray(view1, dtype=np.float64)), np.atleast_2d(np.asarray(view2, dtype=np.float64)),
                 labels, meta_labels(scheme, labels))
