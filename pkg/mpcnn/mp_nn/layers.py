#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""Network layers with forward and backward passes.

Activations are (batch, length, channels) or (batch, features). Parameters are
stored in the layer dtype (float32 for trained models) and every pass computes
in float64.
"""

import math
from abc import ABC, abstractmethod
from enum import IntEnum
from typing import Optional

import numpy as np

from mpcnn.mp_excepts import BadRate, DegenerateBatch, NonFiniteTensor, ShapeMismatch

Shape = tuple[int, ...]


class LayerTag(IntEnum):
    """Model file layer type tags."""

    CONV1D = 1
    BATCHNORM1D = 2
    MAXPOOL1D = 3
    DROPOUT = 4
    GLOBALMAXPOOL1D = 5
    DENSE = 6


class Activation(IntEnum):
    """Activations folded into conv and dense layers."""

    NONE = 0
    RELU = 1

    @classmethod
    def parse(cls, name: str) -> "Activation":
        """From `relu` or `none`."""
        return cls[name.upper()]


def check_finite(values: np.ndarray, where: str) -> np.ndarray:
    """Raise NonFiniteTensor when values hold NaN or Inf."""
    if not np.all(np.isfinite(values)):
        raise NonFiniteTensor(where)
    return values


class Layer(ABC):
    """Base layer.

    :ivar name: Layer name, unique within a model
    :ivar params: Trainable arrays by name
    :ivar grads: Gradients from the last backward pass, same keys as params
    :ivar buffers: Non trainable state saved with the model
    """

    tag: LayerTag

    def __init__(self, name: str, dtype: np.dtype = np.float32) -> None:
        """__init__ Initialize layer."""
        self.name = name
        self.dtype = np.dtype(dtype)
        self.params: dict[str, np.ndarray] = {}
        self.grads: dict[str, np.ndarray] = {}
        self.buffers: dict[str, np.ndarray] = {}
        self._cache: Optional[tuple] = None

    @abstractmethod
    def output_shape(self, input_shape: Shape) -> Shape:
        """Shape of one example after this layer."""

    def build(self, input_shape: Shape, rng: np.random.Generator) -> Shape:
        """Allocate parameters for input_shape and return the output shape."""
        return self.output_shape(input_shape)

    @abstractmethod
    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        """Output for a batch."""

    @abstractmethod
    def backward(self, dy: np.ndarray) -> np.ndarray:
        """Input gradient; parameter gradients are left in grads."""

    @property
    def state(self) -> dict[str, np.ndarray]:
        """Parameters then buffers, the arrays a model file stores."""
        return {**self.params, **self.buffers}

    @property
    def param_count(self) -> int:
        """Trainable scalars."""
        return sum(int(arr.size) for arr in self.params.values())

    def hyper(self) -> tuple:
        """Hyper parameters needed to rebuild the layer."""
        return ()

    def _p64(self, key: str) -> np.ndarray:
        """Parameter as float64."""
        return self.params[key].astype(np.float64)


def _glorot(rng: np.random.Generator, shape: Shape, fan_in: int, fan_out: int, dtype: np.dtype) -> np.ndarray:
    """Symmetric uniform initializer scaled by fan in and fan out."""
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape).astype(dtype)


def _strided_slots(length: int, window: int, stride: int) -> int:
    """Valid window positions."""
    return (length - window) // stride + 1


class Conv1D(Layer):
    """Valid (unpadded) 1D cross correlation, weights (kernel, in, filters)."""

    tag = LayerTag.CONV1D

    def __init__(
        self,
        name: str,
        filters: int,
        kernel: int,
        stride: int = 1,
        activation: str = "relu",
        dtype: np.dtype = np.float32,
    ) -> None:
        """__init__ Initialize layer."""
        super().__init__(name, dtype)
        self.filters = filters
        self.kernel = kernel
        self.stride = stride
        self.activation = Activation.parse(activation)

    def output_shape(self, input_shape: Shape) -> Shape:
        """(out_len, filters)."""
        length = input_shape[0]
        if length < self.kernel:
            raise ShapeMismatch(f"{self.name}: length {length} shorter than kernel {self.kernel}")
        return (_strided_slots(length, self.kernel, self.stride), self.filters)

    def build(self, input_shape: Shape, rng: np.random.Generator) -> Shape:
        """Glorot uniform weights, zero bias."""
        in_ch = input_shape[1]
        self.params = {
            "w": _glorot(
                rng, (self.kernel, in_ch, self.filters), self.kernel * in_ch, self.kernel * self.filters, self.dtype
            ),
            "b": np.zeros(self.filters, dtype=self.dtype),
        }
        return self.output_shape(input_shape)

    def _columns(self, x: np.ndarray) -> np.ndarray:
        """(batch, out_len, in, kernel) view of the input windows."""
        return np.lib.stride_tricks.sliding_window_view(x, self.kernel, axis=1)[:, :: self.stride]

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        """Cross correlation plus bias, then the activation."""
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 3 or x.shape[2] != self.params["w"].shape[1]:
            raise ShapeMismatch(f"{self.name}: expected (batch, length, {self.params['w'].shape[1]}), got {x.shape}")
        self.output_shape(x.shape[1:])
        cols = self._columns(x)
        # w (kernel, in, filters) -> (in, kernel, filters) to match cols
        z = np.tensordot(cols, self._p64("w").transpose(1, 0, 2), axes=([2, 3], [0, 1])) + self._p64("b")
        y = np.maximum(z, 0.0) if self.activation is Activation.RELU else z
        self._cache = (x.shape, cols, z)
        return y

    def backward(self, dy: np.ndarray) -> np.ndarray:
        """Gradients for the input, the weights and the bias."""
        in_shape, cols, z = self._cache
        dz = dy * (z > 0) if self.activation is Activation.RELU else dy
        self.grads = {
            "w": np.tensordot(cols, dz, axes=([0, 1], [0, 1])).transpose(1, 0, 2),
            "b": dz.sum(axis=(0, 1)),
        }
        dcols = np.tensordot(dz, self._p64("w").transpose(1, 0, 2), axes=([2], [2]))
        dx = np.zeros(in_shape, dtype=np.float64)
        span = self.stride * (dz.shape[1] - 1) + 1
        for k in range(self.kernel):
            dx[:, k : k + span : self.stride, :] += dcols[:, :, :, k]
        return dx

    def hyper(self) -> tuple:
        return (self.filters, self.kernel, self.stride, int(self.activation))


class BatchNorm1D(Layer):
    """Per channel normalization over batch and length."""

    tag = LayerTag.BATCHNORM1D

    def __init__(self, name: str, eps: float = 1e-3, momentum: float = 0.99, dtype: np.dtype = np.float32) -> None:
        """__init__ Initialize layer."""
        super().__init__(name, dtype)
        self.eps = eps
        self.momentum = momentum

    def output_shape(self, input_shape: Shape) -> Shape:
        return input_shape

    def build(self, input_shape: Shape, rng: np.random.Generator) -> Shape:
        """gamma 1, beta 0, running mean 0 and variance 1."""
        channels = input_shape[-1]
        self.params = {"gamma": np.ones(channels, dtype=self.dtype), "beta": np.zeros(channels, dtype=self.dtype)}
        self.buffers = {
            "running_mean": np.zeros(channels, dtype=self.dtype),
            "running_var": np.ones(channels, dtype=self.dtype),
        }
        return input_shape

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        """Batch statistics in training (updating the running ones), running statistics otherwise."""
        x = np.asarray(x, dtype=np.float64)
        axes = tuple(range(x.ndim - 1))
        if training:
            if x.shape[0] < 2:
                raise DegenerateBatch(f"{self.name}: batch norm training needs 2 or more examples, got {x.shape[0]}")
            mean = x.mean(axis=axes)
            var = x.var(axis=axes)
            keep = self.momentum
            self.buffers["running_mean"] = (
                keep * self.buffers["running_mean"].astype(np.float64) + (1.0 - keep) * mean
            ).astype(self.dtype)
            self.buffers["running_var"] = (
                keep * self.buffers["running_var"].astype(np.float64) + (1.0 - keep) * var
            ).astype(self.dtype)
        else:
            mean = self.buffers["running_mean"].astype(np.float64)
            var = self.buffers["running_var"].astype(np.float64)
        inv_std = 1.0 / np.sqrt(var + self.eps)
        x_hat = (x - mean) * inv_std
        self._cache = (x_hat, inv_std, axes)
        return self._p64("gamma") * x_hat + self._p64("beta")

    def backward(self, dy: np.ndarray) -> np.ndarray:
        """Training mode batch norm gradient."""
        x_hat, inv_std, axes = self._cache
        count = math.prod(x_hat.shape[:-1])
        self.grads = {"gamma": (dy * x_hat).sum(axis=axes), "beta": dy.sum(axis=axes)}
        dx_hat = dy * self._p64("gamma")
        return (
            inv_std
            / count
            * (count * dx_hat - dx_hat.sum(axis=axes) - x_hat * (dx_hat * x_hat).sum(axis=axes))
        )

    def hyper(self) -> tuple:
        return (self.eps, self.momentum)


class MaxPool1D(Layer):
    """Max over windows along length; gradient goes to the first maximum."""

    tag = LayerTag.MAXPOOL1D

    def __init__(self, name: str, size: int = 3, stride: int = 3, dtype: np.dtype = np.float32) -> None:
        """__init__ Initialize layer."""
        super().__init__(name, dtype)
        self.size = size
        self.stride = stride

    def output_shape(self, input_shape: Shape) -> Shape:
        length = input_shape[0]
        if length < self.size:
            raise ShapeMismatch(f"{self.name}: length {length} shorter than pool size {self.size}")
        return (_strided_slots(length, self.size, self.stride), *input_shape[1:])

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        self.output_shape(x.shape[1:])
        windows = np.lib.stride_tricks.sliding_window_view(x, self.size, axis=1)[:, :: self.stride]
        arg = windows.argmax(axis=-1)
        self._cache = (x.shape, arg)
        return np.take_along_axis(windows, arg[..., None], axis=-1)[..., 0]

    def backward(self, dy: np.ndarray) -> np.ndarray:
        in_shape, arg = self._cache
        dx = np.zeros(in_shape, dtype=np.float64)
        span = self.stride * (dy.shape[1] - 1) + 1
        for j in range(self.size):
            dx[:, j : j + span : self.stride, :] += dy * (arg == j)
        return dx

    def hyper(self) -> tuple:
        return (self.size, self.stride)


class GlobalMaxPool1D(Layer):
    """Max over the whole length, (batch, length, ch) to (batch, ch)."""

    tag = LayerTag.GLOBALMAXPOOL1D

    def output_shape(self, input_shape: Shape) -> Shape:
        return (input_shape[-1],)

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 3:
            raise ShapeMismatch(f"{self.name}: expected (batch, length, channels), got {x.shape}")
        arg = x.argmax(axis=1)
        self._cache = (x.shape, arg)
        return np.take_along_axis(x, arg[:, None, :], axis=1)[:, 0, :]

    def backward(self, dy: np.ndarray) -> np.ndarray:
        in_shape, arg = self._cache
        dx = np.zeros(in_shape, dtype=np.float64)
        np.put_along_axis(dx, arg[:, None, :], dy[:, None, :], axis=1)
        return dx


class Dropout(Layer):
    """Inverted dropout: survivors scaled by 1 / (1 - rate) while training."""

    tag = LayerTag.DROPOUT

    def __init__(
        self,
        name: str,
        rate: float = 0.5,
        rng: Optional[np.random.Generator] = None,
        dtype: np.dtype = np.float32,
    ) -> None:
        """__init__ Initialize layer.

        :raises BadRate: rate outside [0, 1)
        """
        super().__init__(name, dtype)
        if not 0.0 <= rate < 1.0:
            raise BadRate(f"{name}: dropout rate must be in [0, 1), got {rate}")
        self.rate = rate
        self.rng = rng or np.random.default_rng(0)

    def output_shape(self, input_shape: Shape) -> Shape:
        return input_shape

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if not training or self.rate == 0.0:
            self._cache = None
            return x
        keep = (self.rng.random(x.shape) >= self.rate) / (1.0 - self.rate)
        self._cache = (keep,)
        return x * keep

    def backward(self, dy: np.ndarray) -> np.ndarray:
        return dy if self._cache is None else dy * self._cache[0]

    def hyper(self) -> tuple:
        return (self.rate,)


class Dense(Layer):
    """Fully connected layer, weights (in, units)."""

    tag = LayerTag.DENSE

    def __init__(self, name: str, units: int, activation: str = "relu", dtype: np.dtype = np.float32) -> None:
        """__init__ Initialize layer."""
        super().__init__(name, dtype)
        self.units = units
        self.activation = Activation.parse(activation)

    def output_shape(self, input_shape: Shape) -> Shape:
        if len(input_shape) != 1:
            raise ShapeMismatch(f"{self.name}: expected flat input, got {input_shape}")
        return (self.units,)

    def build(self, input_shape: Shape, rng: np.random.Generator) -> Shape:
        """Glorot uniform weights, zero bias."""
        fan_in = input_shape[0]
        self.params = {
            "w": _glorot(rng, (fan_in, self.units), fan_in, self.units, self.dtype),
            "b": np.zeros(self.units, dtype=self.dtype),
        }
        return self.output_shape(input_shape)

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.params["w"].shape[0]:
            raise ShapeMismatch(f"{self.name}: expected (batch, {self.params['w'].shape[0]}), got {x.shape}")
        z = x @ self._p64("w") + self._p64("b")
        self._cache = (x, z)
        return np.maximum(z, 0.0) if self.activation is Activation.RELU else z

    def backward(self, dy: np.ndarray) -> np.ndarray:
        x, z = self._cache
        dz = dy * (z > 0) if self.activation is Activation.RELU else dy
        self.grads = {"w": x.T @ dz, "b": dz.sum(axis=0)}
        return dz @ self._p64("w").T

    def hyper(self) -> tuple:
        return (self.units, int(self.activation))


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row softmax with max shift."""
    shifted = np.asarray(logits, dtype=np.float64)
    shifted = shifted - shifted.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def softmax_cross_entropy(logits: np.ndarray, labels: np.ndarray) -> tuple[float, np.ndarray]:
    """softmax_cross_entropy returns the mean loss and its logit gradient.

    :param logits: (batch, classes)
    :type logits: np.ndarray
    :param labels: Class indices
    :type labels: np.ndarray
    :raises ShapeMismatch: labels do not match the batch
    :return: Loss averaged over the batch, (softmax - onehot) / batch
    :rtype: tuple[float, np.ndarray]
    """
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if logits.ndim != 2 or labels.shape != (logits.shape[0],):
        raise ShapeMismatch(f"logits {logits.shape} and labels {labels.shape} disagree")
    batch = logits.shape[0]
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    loss = -float(log_probs[np.arange(batch), labels].mean())
    grad = np.exp(log_probs)
    grad[np.arange(batch), labels] -= 1.0
    return loss, grad / batch
