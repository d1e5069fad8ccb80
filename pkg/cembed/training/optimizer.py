"""
Adaptive moment estimation with decoupled weight decay, updating named parameters in place.
"""
from typing import Dict
import numpy as np
from numpy import ndarray
from ..constants.training import ADAM_BETA_1, ADAM_BETA_2, ADAM_EPSILON, DEFAULT_LEARNING_RATE, DEFAULT_WEIGHT_DECAY
from ..exceptions import ConfigurationError


class AdamW:
    """
    Optimiser keeping first and second moment estimates for every parameter.

    Each step first shrinks every parameter by `learning_rate * weight_decay` (the decay is decoupled from the
    gradient), then applies the bias-corrected moment update.
    """

    def __init__(self, parameters: Dict[str, ndarray], learning_rate: float = DEFAULT_LEARNING_RATE,
                 weight_decay: float = DEFAULT_WEIGHT_DECAY, beta_1: float = ADAM_BETA_1, beta_2: float = ADAM_BETA_2,
                 epsilon: float = ADAM_EPSILON):
        self._parameters = parameters
        self._learning_rate = learning_rate
        self._weight_decay = weight_decay
        self._beta_1 = beta_1
        self._beta_2 = beta_2
        self._epsilon = epsilon
        self._first = {name: np.zeros_like(value) for name, value in parameters.items()}
        self._second = {name: np.zeros_like(value) for name, value in parameters.items()}
        self._steps = 0

    @property
    def steps(self) -> int:
        """
        Get the number of updates applied so far.
        """
        return self._steps

    def step(self, grads: Dict[str, ndarray]):
        """
        Update every parameter in place from its gradient.
        """
        if set(grads) != set(self._parameters):
            raise ConfigurationError(f"Gradients {sorted(grads)} don't match the parameters {sorted(self._parameters)}")

        self._steps += 1
        first_correction = 1 - self._beta_1 ** self._steps
        second_correction = 1 - self._beta_2 ** self._steps

        for name, value in self._parameters.items():
            grad = grads[name]
            self._first[name] = self._beta_1 * self._first[name] + (1 - self._beta_1) * grad
            self._second[name] = self._beta_2 * self._second[name] + (1 - self._beta_2) * grad ** 2

            value *= 1 - self._learning_rate * self._weight_decay
            first = self._first[name] / first_correction
            second = self._second[name] / second_correction
            value -= self._learning_rate * first / (np.sqrt(second) + self._epsilon)
