#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""Sequential network and the modified LeNet-5 classifier."""

import copy
import logging
from typing import Iterator, Optional, Union

import numpy as np

from mpcnn.mp_constants import DEFAULT_LENGTH
from mpcnn.mp_excepts import ShapeMismatch
from mpcnn.mp_nn.layers import (
    BatchNorm1D,
    Conv1D,
    Dense,
    Dropout,
    GlobalMaxPool1D,
    Layer,
    MaxPool1D,
    Shape,
    check_finite,
    softmax,
)
from mpcnn.mp_types import FeatureSet

logger = logging.getLogger("mpcnn.model")
if not logging.getLogger().handlers:
    logger.addHandler(logging.NullHandler())
    logger.propagate = False

# Output lengths of conv1, pool1, conv2, pool2, conv3 then the flat widths of
# the global pool, fc1, fc2 and the output for a 900 sample input.
LENET_SHAPE_CHAIN: tuple[int, ...] = (448, 149, 73, 24, 10, 128, 128, 64, 2)


class SequentialNet:
    """Layers applied in order, built for a fixed (length, channels) input.

    :ivar layers: The layers
    :ivar input_shape: (L, C) of one example
    :ivar seed: Seed the parameters and dropout streams derive from
    :ivar shapes: Output shape of every layer
    """

    def __init__(
        self,
        layers: list[Layer],
        input_shape: Shape,
        seed: int = 0,
        build: bool = True,
    ) -> None:
        """__init__ Initialize and optionally build the network.

        :param layers: Unbuilt layers
        :type layers: list[Layer]
        :param input_shape: (L, C) of one example
        :type input_shape: Shape
        :param seed: Seed for initial weights, defaults to 0
        :type seed: int, optional
        :param build: Allocate parameters, False when they will be loaded, defaults to True
        :type build: bool, optional
        """
        self.layers = layers
        self.input_shape = tuple(input_shape)
        self.seed = seed
        self.shapes: list[Shape] = []
        init_rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(1)[0])
        shape: Shape = self.input_shape
        for layer in self.layers:
            shape = layer.build(shape, init_rng) if build else layer.output_shape(shape)
            self.shapes.append(shape)

    @property
    def output_shape(self) -> Shape:
        """Shape of one prediction."""
        return self.shapes[-1]

    @property
    def param_count(self) -> int:
        """Trainable scalars of all layers."""
        return sum(layer.param_count for layer in self.layers)

    def parameters(self) -> Iterator[tuple[str, Layer, str]]:
        """(qualified name, layer, key) for every trainable array."""
        for layer in self.layers:
            for key in layer.params:
                yield f"{layer.name}.{key}", layer, key

    def check_input(self, x: np.ndarray) -> None:
        """Raise ShapeMismatch unless x is (batch, L, C)."""
        if x.ndim != len(self.input_shape) + 1 or tuple(x.shape[1:]) != self.input_shape:
            raise ShapeMismatch(f"Input {tuple(x.shape[1:])} does not match the model input {self.input_shape}")

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        """Logits for a batch; NaN or Inf after any layer raises NonFiniteTensor."""
        self.check_input(np.asarray(x))
        out = np.asarray(x, dtype=np.float64)
        for layer in self.layers:
            out = check_finite(layer.forward(out, training), layer.name)
        return out

    def backward(self, dlogits: np.ndarray) -> np.ndarray:
        """Back propagate, leaving gradients in each layer."""
        grad = dlogits
        for layer in reversed(self.layers):
            grad = check_finite(layer.backward(grad), f"{layer.name} backward")
        return grad

    def predict_proba(self, x: np.ndarray, batch_size: int = 128) -> np.ndarray:
        """Class probabilities in inference mode."""
        x = np.asarray(x)
        self.check_input(x)
        if len(x) == 0:
            return np.zeros((0, self.output_shape[0]), dtype=np.float64)
        return np.concatenate(
            [softmax(self.forward(x[start : start + batch_size])) for start in range(0, len(x), batch_size)]
        )

    def snapshot(self) -> "SequentialNet":
        """Independent copy with the same parameters and running statistics."""
        twin = copy.deepcopy(self)
        for layer in twin.layers:
            layer._cache = None  # pylint: disable=protected-access
        return twin


def lenet_layers(
    dropout: float = 0.5,
    bn_eps: float = 1e-3,
    bn_momentum: float = 0.99,
    rng: Optional[np.random.Generator] = None,
    dtype: Union[np.dtype, type] = np.float32,
) -> list[Layer]:
    """Layer stack of the modified LeNet-5: three conv blocks and three dense layers."""
    rng = rng or np.random.default_rng(0)
    return [
        Conv1D("conv1", 64, 5, 2, "relu", dtype),
        BatchNorm1D("bn1", bn_eps, bn_momentum, dtype),
        MaxPool1D("pool1", 3, 3, dtype),
        Dropout("drop1", dropout, rng, dtype),
        Conv1D("conv2", 96, 5, 2, "relu", dtype),
        BatchNorm1D("bn2", bn_eps, bn_momentum, dtype),
        MaxPool1D("pool2", 3, 3, dtype),
        Dropout("drop2", dropout, rng, dtype),
        Conv1D("conv3", 128, 5, 2, "relu", dtype),
        BatchNorm1D("bn3", bn_eps, bn_momentum, dtype),
        GlobalMaxPool1D("gpool", dtype),
        Dropout("drop3", dropout, rng, dtype),
        Dense("fc1", 128, "relu", dtype),
        Dropout("drop4", dropout, rng, dtype),
        Dense("fc2", 64, "relu", dtype),
        Dropout("drop5", dropout, rng, dtype),
        Dense("output", 2, "none", dtype),
    ]


def shape_chain(model: SequentialNet) -> tuple[int, ...]:
    """Lengths after each conv and pool, then widths of the flat layers."""
    chain: list[int] = []
    for layer, shape in zip(model.layers, model.shapes):
        if isinstance(layer, (Conv1D, MaxPool1D)):
            chain.append(shape[0])
        elif isinstance(layer, (GlobalMaxPool1D, Dense)):
            chain.append(shape[-1])
    return tuple(chain)


def build_lenet(
    length: int = DEFAULT_LENGTH,
    channels: int = 3,
    seed: int = 0,
    dropout: float = 0.5,
    bn_eps: float = 1e-3,
    bn_momentum: float = 0.99,
    dtype: Union[np.dtype, type] = np.float32,
) -> SequentialNet:
    """build_lenet constructs the classifier for (length, channels) inputs.

    For a 900 sample input the conv and pool lengths must come out as
    448, 149, 73, 24, 10 and the flat widths as 128, 128, 64, 2.

    :param length: Input length L, defaults to 900
    :type length: int, optional
    :param channels: Input channels C, defaults to 3
    :type channels: int, optional
    :param seed: Seed for weights and dropout masks, defaults to 0
    :type seed: int, optional
    :param dropout: Dropout rate, defaults to 0.5
    :type dropout: float, optional
    :param bn_eps: Batch norm epsilon, defaults to 1e-3
    :type bn_eps: float, optional
    :param bn_momentum: Batch norm running average momentum, defaults to 0.99
    :type bn_momentum: float, optional
    :param dtype: Parameter storage type, defaults to np.float32
    :type dtype: Union[np.dtype, type], optional
    :raises ShapeMismatch: Input too short for the layer stack, or the 900 sample chain differs
    :return: Built network
    :rtype: SequentialNet
    """
    dropout_rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(2)[1])
    model = SequentialNet(
        lenet_layers(dropout, bn_eps, bn_momentum, dropout_rng, dtype), (length, channels), seed
    )
    if length == DEFAULT_LENGTH and shape_chain(model) != LENET_SHAPE_CHAIN:
        raise ShapeMismatch(f"Shape chain {shape_chain(model)} differs from {LENET_SHAPE_CHAIN}")
    logger.debug(f"Built network for ({length}, {channels}): chain {shape_chain(model)}")
    return model


def predict(model: SequentialNet, features: Union[FeatureSet, np.ndarray], batch_size: int = 128) -> np.ndarray:
    """predict returns per segment class probabilities, column 1 is P(A).

    :param model: Trained network
    :type model: SequentialNet
    :param features: Feature set or (n, L, C) array
    :type features: Union[FeatureSet, np.ndarray]
    :param batch_size: Inference batch size, defaults to 128
    :type batch_size: int, optional
    :raises ShapeMismatch: Feature L x C differs from the model input
    :return: (n, 2) probabilities, rows sum to 1
    :rtype: np.ndarray
    """
    x = features.x if isinstance(features, FeatureSet) else np.asarray(features)
    return model.predict_proba(x, batch_size)
