"""
Training - augmentation, the AdamW optimiser and the training loop.
"""
from .augment import augment
from .optimizer import AdamW
from .trainer import TrainingResult, train, save_trace

__all__ = [
    "augment",
    "AdamW",
    "TrainingResult",
    "train",
    "save_trace",
]
