"""
Encoder and prediction head - two affine layers with a tanh in between, with explicit backward passes.
"""
from typing import Dict, List, Tuple
import numpy as np
from numpy import ndarray
from .assignment import split_subvectors
from ..exceptions import ShapeError


class Perceptron:
    """
    One-hidden-layer perceptron `tanh(x @ w1 + b1) @ w2 + b2`.

    Parameters are kept in a dictionary, so that the optimiser can update them in place, and are exposed under the
    names `w1`, `b1`, `w2`, `b2`. Forward passes return a cache which the backward pass consumes.
    """

    def __init__(self, w1: ndarray, b1: ndarray, w2: ndarray, b2: ndarray):
        self.params: Dict[str, ndarray] = {
            "w1": np.asarray(w1, dtype=np.float64),
            "b1": np.asarray(b1, dtype=np.float64),
            "w2": np.asarray(w2, dtype=np.float64),
            "b2": np.asarray(b2, dtype=np.float64),
        }
        hidden = self.params["w1"].shape[1]
        if self.params["b1"].shape != (hidden,) or self.params["w2"].shape[0] != hidden \
                or self.params["b2"].shape != (self.params["w2"].shape[1],):
            raise ShapeError("Inconsistent perceptron parameter shapes")

    @classmethod
    def initialise(cls, in_dim: int, hidden: int, out_dim: int, rng: np.random.Generator, **kwargs):
        """
        Create a perceptron with weights scaled by the inverse square root of the fan-in and zero biases.
        """
        return cls(
            rng.standard_normal((in_dim, hidden)) / np.sqrt(in_dim),
            np.zeros(hidden),
            rng.standard_normal((hidden, out_dim)) / np.sqrt(hidden),
            np.zeros(out_dim),
            **kwargs
        )

    @property
    def in_dim(self) -> int:
        """
        Get the input dimension.
        """
        return self.params["w1"].shape[0]

    @property
    def hidden(self) -> int:
        """
        Get the hidden layer width.
        """
        return self.params["w1"].shape[1]

    @property
    def out_dim(self) -> int:
        """
        Get the output dimension.
        """
        return self.params["w2"].shape[1]

    def forward(self, x: ndarray) -> Tuple[ndarray, Tuple[ndarray, ndarray]]:
        """
        Map a batch of row vectors, returning the outputs and the cache for `backward`.
        """
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if x.shape[1] != self.in_dim:
            raise ShapeError(f"Expected inputs of dimension {self.in_dim}, got {x.shape[1]}")
        activations = np.tanh(x @ self.params["w1"] + self.params["b1"])
        return activations @ self.params["w2"] + self.params["b2"], (x, activations)

    def backward(self, cache: Tuple[ndarray, ndarray], grad: ndarray) -> Tuple[ndarray, Dict[str, ndarray]]:
        """
        Propagate the output gradient, returning the input gradient and the parameter gradients.
        """
        x, activations = cache
        grad_pre = (grad @ self.params["w2"].T) * (1 - activations ** 2)
        grads = {
            "w1": x.T @ grad_pre,
            "b1": grad_pre.sum(axis=0),
            "w2": activations.T @ grad,
            "b2": grad.sum(axis=0),
        }
        return grad_pre @ self.params["w1"].T, grads

    def __call__(self, x: ndarray) -> ndarray:
        return self.forward(x)[0]


class Encoder(Perceptron):
    """
    Feature extractor mapping input features of dimension d to z of dimension d1 = M * d2.
    """

    def __init__(self, w1: ndarray, b1: ndarray, w2: ndarray, b2: ndarray, num_sets: int = 1):
        super().__init__(w1, b1, w2, b2)
        if self.out_dim % num_sets:
            raise ShapeError(f"Encoder output {self.out_dim} isn't a multiple of {num_sets} meta-class sets")
        self.num_sets = num_sets


class IdentityEncoder:
    """
    Parameter-free encoder returning the input features unchanged.

    Used to build meta-class schemes straight from the raw features.
    """

    def __init__(self, dim: int):
        self.in_dim = dim
        self.out_dim = dim
        self.num_sets = 1

    def __call__(self, x: ndarray) -> ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if x.shape[1] != self.in_dim:
            raise ShapeError(f"Expected inputs of dimension {self.in_dim}, got {x.shape[1]}")
        return x


class PredictionHead(Perceptron):
    """
    Prediction head applied to the combinatorial embedding in the consistency loss, width d2 * M on both ends.
    """

    @classmethod
    def initialise(cls, in_dim: int, hidden: int, out_dim: int, rng: np.random.Generator, **kwargs):
        if not in_dim == hidden == out_dim:
            raise ShapeError("Prediction head must keep the embedding width")
        return super().initialise(in_dim, hidden, out_dim, rng, **kwargs)


def encode(encoder: Encoder, x: ndarray) -> Tuple[ndarray, List[ndarray]]:
    """
    Encode a feature vector (or a batch) into z, together with its M contiguous subvectors.
    """
    single = np.ndim(x) == 1
    z = encoder(x)
    z = z[0] if single else z
    return z, split_subvectors(z, encoder.num_sets)
