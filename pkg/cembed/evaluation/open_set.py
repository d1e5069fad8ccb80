"""
Open-set clustering evaluation - one k-means over all test items, scored on the seen, unseen and total scopes.
"""
from dataclasses import dataclass
from typing import Dict, Iterable, Optional
import numpy as np
from numpy import ndarray
from .clustering import kmeans
from .metrics import hungarian_mapping, mapped_accuracy, nmi, ari
from ..enums import Scope
from ..exceptions import ParameterError
from ..utils import logger


@dataclass(frozen=True)
class ScopeMetrics:
    """
    Accuracy, NMI and ARI of one scope, and the number of items it holds.
    """

    acc: float
    nmi: float
    ari: float
    count: int

    def to_dict(self) -> dict:
        return {"acc": self.acc, "nmi": self.nmi, "ari": self.ari, "count": self.count}


@dataclass(frozen=True)
class OpenSetMetrics:
    """
    Metrics of the seen, unseen and total scopes - a scope without items is absent (None).
    """

    seen: Optional[ScopeMetrics]
    unseen: Optional[ScopeMetrics]
    total: ScopeMetrics

    def scope(self, scope: Scope) -> Optional[ScopeMetrics]:
        """
        Get the metrics of a scope.
        """
        return getattr(self, scope.value)

    def to_dict(self) -> Dict[str, dict]:
        """
        Get a JSON-ready representation, leaving absent scopes out.
        """
        return {scope.value: self.scope(scope).to_dict() for scope in Scope if self.scope(scope) is not None}


def _score(pred: ndarray, truth: ndarray, mapping: Dict[int, int]) -> Optional[ScopeMetrics]:
    if not truth.size:
        return None
    return ScopeMetrics(mapped_accuracy(pred, truth, mapping), nmi(pred, truth), ari(pred, truth), int(truth.size))


def score_open_set(pred: ndarray, truth: ndarray, seen_classes: Iterable[int]) -> OpenSetMetrics:
    """
    Score cluster assignments against the ground truth.

    A single Hungarian mapping is solved over all items. Accuracy of the seen (resp. unseen) scope applies that mapping
    to the items of seen (resp. novel) classes, while NMI and ARI are recomputed on the scope's items alone.
    """
    pred = np.asarray(pred, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    mapping = hungarian_mapping(pred, truth)
    seen = np.isin(truth, list(seen_classes))
    return OpenSetMetrics(
        seen=_score(pred[seen], truth[seen], mapping),
        unseen=_score(pred[~seen], truth[~seen], mapping),
        total=_score(pred, truth, mapping),
    )


def eval_open_set(embeddings: ndarray, truth: ndarray, seen_classes: Iterable[int], k: int,
                  seed: int) -> OpenSetMetrics:
    """
    Cluster the test embeddings into k groups with seeded k-means and score them, see `score_open_set`.

    `ParameterError` will be thrown without test items or for k above their count.
    """
    truth = np.asarray(truth, dtype=np.int64)
    if not truth.size:
        raise ParameterError("Open-set evaluation needs at least one test item")

    result = kmeans(embeddings, k, seed)
    metrics = score_open_set(result.assignments, truth, seen_classes)
    logger.info(f"Clustered {truth.size} items into {k} groups, total accuracy {metrics.total.acc:.4f}")
    return metrics
