"""
Training objectives - meta-classification, similarity and consistency losses, positive estimation and the total loss.
"""
from .batch import Batch, make_batch
from .losses import meta_loss, sim_loss, cons_loss, consistency
from .positives import select_positives, select_all_positives, cluster_positives
from .total import LossBreakdown, weighted_total, total_loss, stop_gradient_targets

__all__ = [
    "Batch",
    "make_batch",
    "meta_loss",
    "sim_loss",
    "cons_loss",
    "consistency",
    "select_positives",
    "select_all_positives",
    "cluster_positives",
    "LossBreakdown",
    "weighted_total",
    "total_loss",
    "stop_gradient_targets",
]
