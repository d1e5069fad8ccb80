"""
Feature-space augmentation producing the views of a batch.
"""
import numpy as np
from numpy import ndarray
from ..constants.training import DEFAULT_AUG_SIGMA, DEFAULT_AUG_DROPOUT
from ..exceptions import ParameterError


def augment(x: ndarray, rng: np.random.Generator, sigma: float = DEFAULT_AUG_SIGMA,
            dropout: float = DEFAULT_AUG_DROPOUT) -> ndarray:
    """
    Add zero-mean Gaussian noise of scale `sigma`, then zero every coordinate with probability `dropout` and rescale
    the survivors by 1 / (1 - dropout), so that the expected output is the input.

    The noise is always drawn before the dropout mask, so the same generator state gives the same output.
    """
    if not 0 <= dropout < 1 or sigma < 0:
        raise ParameterError(f"Augmentation needs dropout in [0, 1) and a non-negative sigma, got {dropout} and {sigma}")

    x = np.asarray(x, dtype=np.float64)
    noisy = x + rng.normal(0.0, sigma, size=x.shape)
    keep = rng.random(size=x.shape) >= dropout
    return noisy * keep / (1 - dropout)
