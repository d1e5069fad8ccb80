"""
Clustering evaluation - seeded k-means, clustering metrics and the open-set breakdown.
"""
from .clustering import ClusteringResult, kmeans
from .metrics import hungarian_mapping, mapped_accuracy, hungarian_accuracy, nmi, ari
from .open_set import ScopeMetrics, OpenSetMetrics, score_open_set, eval_open_set

__all__ = [
    "ClusteringResult",
    "kmeans",
    "hungarian_mapping",
    "mapped_accuracy",
    "hungarian_accuracy",
    "nmi",
    "ari",
    "ScopeMetrics",
    "OpenSetMetrics",
    "score_open_set",
    "eval_open_set",
]
