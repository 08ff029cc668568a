#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""Adam optimizer and the step learning rate schedule."""

import math
from dataclasses import dataclass, field

import numpy as np

from mpcnn.mp_constants import DEFAULT_LR, LR_DECAY_EVERY, LR_DECAY_FACTOR, LR_HOLD_EPOCHS
from mpcnn.mp_nn.model import SequentialNet


@dataclass
class AdamMoments:
    """First and second moment estimates of one parameter array."""

    m: np.ndarray
    v: np.ndarray

    @classmethod
    def zeros_like(cls, param: np.ndarray) -> "AdamMoments":
        """Fresh float64 moments."""
        return cls(np.zeros(param.shape, dtype=np.float64), np.zeros(param.shape, dtype=np.float64))


def adam_step(
    param: np.ndarray,
    grad: np.ndarray,
    moments: AdamMoments,
    t: int,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-7,
) -> np.ndarray:
    """adam_step applies one bias corrected Adam update.

    moments are updated in place.

    :param param: Current values
    :type param: np.ndarray
    :param grad: Gradient of the loss
    :type grad: np.ndarray
    :param moments: Moment estimates for param
    :type moments: AdamMoments
    :param t: 1 based step number
    :type t: int
    :param lr: Learning rate
    :type lr: float
    :return: Updated values in param's dtype
    :rtype: np.ndarray
    """
    grad = np.asarray(grad, dtype=np.float64)
    moments.m = beta1 * moments.m + (1.0 - beta1) * grad
    moments.v = beta2 * moments.v + (1.0 - beta2) * grad * grad
    m_hat = moments.m / (1.0 - beta1**t)
    v_hat = moments.v / (1.0 - beta2**t)
    updated = np.asarray(param, dtype=np.float64) - lr * m_hat / (np.sqrt(v_hat) + eps)
    return updated.astype(np.asarray(param).dtype)


def lr_schedule(
    epoch: int,
    lr0: float = DEFAULT_LR,
    hold_epochs: int = LR_HOLD_EPOCHS,
    decay_every: int = LR_DECAY_EVERY,
    decay_factor: float = LR_DECAY_FACTOR,
) -> float:
    """Learning rate for a 1 based epoch: lr0 through hold_epochs, then decay_factor per decay_every epochs."""
    if epoch < 1:
        raise ValueError(f"Epochs are 1 based, got {epoch}")
    if epoch <= hold_epochs:
        return lr0
    return lr0 * decay_factor ** math.ceil((epoch - hold_epochs) / decay_every)


@dataclass
class Adam:
    """Adam over every trainable array of a network."""

    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-7
    t: int = 0
    moments: dict[str, AdamMoments] = field(default_factory=dict)

    def step(self, model: SequentialNet, lr: float) -> None:
        """Update model parameters from the gradients of the last backward pass."""
        self.t += 1
        for qualified, layer, key in model.parameters():
            moments = self.moments.setdefault(qualified, AdamMoments.zeros_like(layer.params[key]))
            layer.params[key] = adam_step(
                layer.params[key], layer.grads[key], moments, self.t, lr, self.beta1, self.beta2, self.eps
            )
