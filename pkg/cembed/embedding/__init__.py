"""
Combinatorial embedding model - encoder, soft assignment to meta-class prototypes and prediction head.
"""
from .assignment import l2_normalize, l2_normalize_backward, soft_assign, soft_assign_backward, assignment_weights
from .assignment import comb_embed, comb_embed_backward, cosine_similarities, cosine_similarities_backward
from .assignment import hard_assign, split_subvectors, softmax
from .layers import Perceptron, Encoder, IdentityEncoder, PredictionHead, encode
from .model import Hyperparams, Model, save_model, load_model

__all__ = [
    "l2_normalize",
    "l2_normalize_backward",
    "soft_assign",
    "soft_assign_backward",
    "assignment_weights",
    "comb_embed",
    "comb_embed_backward",
    "cosine_similarities",
    "cosine_similarities_backward",
    "hard_assign",
    "split_subvectors",
    "softmax",
    "Perceptron",
    "Encoder",
    "IdentityEncoder",
    "PredictionHead",
    "encode",
    "Hyperparams",
    "Model",
    "save_model",
    "load_model",
]
