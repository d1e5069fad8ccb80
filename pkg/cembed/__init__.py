"""
Combinatorial embedding toolkit for open-set learning.
"""
from . import data, scheme, embedding, objectives, training, retrieval, evaluation
from .exceptions import CembedException

__all__ = [
    "data",
    "scheme",
    "embedding",
    "objectives",
    "training",
    "retrieval",
    "evaluation",
    "CembedException",
]
