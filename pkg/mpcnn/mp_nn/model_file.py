#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""Model file (`.mpnn`) codec and model summary.

Layout, little endian::

    magic "MPNN" | u32 version | u32 L | u32 C | u64 seed | u32 layer count
    per layer: u8 tag | u8 name length | name | hyper parameters | u8 array count
               per array: u8 key length | key | u8 ndim | ndim x u32 dims | f32 values
    u32 n | n bytes of UTF-8 JSON provenance

Hyper parameters by tag: conv u32 filters, u32 kernel, u32 stride, u8 activation;
batch norm f64 eps, f64 momentum; max pool u32 size, u32 stride; dropout f64 rate;
dense u32 units, u8 activation; global max pool none.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
from deprecated.sphinx import versionadded

from mpcnn.bin_reader.reader import BinaryReader, BinaryWriter
from mpcnn.mp_constants import MODEL_MAGIC, MODEL_VERSION
from mpcnn.mp_excepts import ModelFileError
from mpcnn.mp_nn.layers import (
    Activation,
    BatchNorm1D,
    Conv1D,
    Dense,
    Dropout,
    GlobalMaxPool1D,
    Layer,
    LayerTag,
    MaxPool1D,
)
from mpcnn.mp_nn.model import SequentialNet

logger = logging.getLogger("mpcnn.model_file")
if not logging.getLogger().handlers:
    logger.addHandler(logging.NullHandler())
    logger.propagate = False


def _write_name(writer: BinaryWriter, name: str) -> None:
    raw = name.encode("ascii")
    writer.write_int(len(raw), 1).write(raw)


def _read_name(reader: BinaryReader) -> str:
    return reader.read(reader.read_as_int(1)).decode("ascii")


def _write_hyper(writer: BinaryWriter, layer: Layer) -> None:
    """Tag specific hyper parameters."""
    match layer.tag:
        case LayerTag.CONV1D:
            filters, kernel, stride, activation = layer.hyper()
            writer.write_int(filters, 4).write_int(kernel, 4).write_int(stride, 4).write_int(activation, 1)
        case LayerTag.BATCHNORM1D:
            writer.write_array(np.array(layer.hyper()), "<f8")
        case LayerTag.MAXPOOL1D:
            size, stride = layer.hyper()
            writer.write_int(size, 4).write_int(stride, 4)
        case LayerTag.DROPOUT:
            writer.write_array(np.array(layer.hyper()), "<f8")
        case LayerTag.DENSE:
            units, activation = layer.hyper()
            writer.write_int(units, 4).write_int(activation, 1)
        case LayerTag.GLOBALMAXPOOL1D:
            pass


def _read_layer(reader: BinaryReader, dropout_rng: np.random.Generator) -> Layer:
    """Rebuild an unbuilt layer from its tag and hyper parameters."""
    try:
        tag = LayerTag(reader.read_as_int(1))
    except ValueError as exc:
        raise ModelFileError(f"{reader.source}: {exc}") from exc
    name = _read_name(reader)
    match tag:
        case LayerTag.CONV1D:
            filters, kernel, stride = (reader.read_as_int(4) for _ in range(3))
            activation = Activation(reader.read_as_int(1)).name.lower()
            return Conv1D(name, filters, kernel, stride, activation)
        case LayerTag.BATCHNORM1D:
            eps, momentum = reader.read_array("<f8", 2)
            return BatchNorm1D(name, float(eps), float(momentum))
        case LayerTag.MAXPOOL1D:
            size, stride = reader.read_as_int(4), reader.read_as_int(4)
            return MaxPool1D(name, size, stride)
        case LayerTag.DROPOUT:
            return Dropout(name, float(reader.read_array("<f8", 1)[0]), dropout_rng)
        case LayerTag.DENSE:
            units = reader.read_as_int(4)
            return Dense(name, units, Activation(reader.read_as_int(1)).name.lower())
        case _:
            return GlobalMaxPool1D(name)


def encode_model(model: SequentialNet, provenance: str = "") -> bytes:
    """encode_model serializes architecture, parameters and running statistics.

    :param model: Network to write
    :type model: SequentialNet
    :param provenance: JSON text for the trailer, defaults to ""
    :type provenance: str, optional
    :return: File content
    :rtype: bytes
    """
    writer = BinaryWriter()
    length, channels = model.input_shape
    writer.write(MODEL_MAGIC).write_int(MODEL_VERSION, 4).write_int(length, 4).write_int(channels, 4)
    writer.write_int(model.seed, 8).write_int(len(model.layers), 4)
    for layer in model.layers:
        writer.write_int(int(layer.tag), 1)
        _write_name(writer, layer.name)
        _write_hyper(writer, layer)
        writer.write_int(len(layer.state), 1)
        for key, arr in layer.state.items():
            _write_name(writer, key)
            writer.write_int(arr.ndim, 1)
            for dim in arr.shape:
                writer.write_int(dim, 4)
            writer.write_array(arr, "<f4")
    trailer = provenance.encode("utf8")
    writer.write_int(len(trailer), 4).write(trailer)
    return writer.getvalue()


def decode_model(data: bytes, source: str = "<model>") -> tuple[SequentialNet, str]:
    """decode_model rebuilds a network from `.mpnn` content.

    :param data: File content
    :type data: bytes
    :param source: Name used in messages
    :type source: str
    :raises ModelFileError: Bad magic, unknown version, or arrays that do not fit the layers
    :return: The network and its provenance text
    :rtype: tuple[SequentialNet, str]
    """
    reader = BinaryReader(source, data)
    try:
        if reader.read(4) != MODEL_MAGIC:
            raise ModelFileError(f"{source}: not a model file")
        version = reader.read_as_int(4)
        if version != MODEL_VERSION:
            raise ModelFileError(f"{source}: version {version} not supported")
        length, channels = reader.read_as_int(4), reader.read_as_int(4)
        seed = reader.read_as_int(8)
        dropout_rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(2)[1])
        layers: list[Layer] = []
        states: list[dict[str, np.ndarray]] = []
        for _ in range(reader.read_as_int(4)):
            layers.append(_read_layer(reader, dropout_rng))
            state: dict[str, np.ndarray] = {}
            for _ in range(reader.read_as_int(1)):
                key = _read_name(reader)
                shape = tuple(reader.read_as_int(4) for _ in range(reader.read_as_int(1)))
                state[key] = reader.read_array("<f4", int(np.prod(shape))).reshape(shape).astype(np.float32)
            states.append(state)
        provenance = reader.read(reader.read_as_int(4)).decode("utf8") if reader.remaining() else ""
    except EOFError as exc:
        raise ModelFileError(f"{source}: truncated ({exc})") from exc
    model = SequentialNet(layers, (length, channels), seed)
    for layer, state in zip(model.layers, states):
        expected = layer.state
        if set(expected) != set(state) or any(expected[k].shape != state[k].shape for k in state):
            raise ModelFileError(f"{source}: arrays of {layer.name} do not fit its shape")
        for key, arr in state.items():
            target = layer.params if key in layer.params else layer.buffers
            target[key] = arr
    return model, provenance


def save_model(path: Union[str, Path], model: SequentialNet, provenance: str = "") -> int:
    """Write a model file, returning its size in bytes."""
    data = encode_model(model, provenance)
    Path(path).write_bytes(data)
    logger.info(f"Wrote model ({model.param_count} parameters, {len(data)} bytes) to {path}")
    return len(data)


def load_model(path: Union[str, Path]) -> tuple[SequentialNet, str]:
    """Read a model file and its provenance text."""
    try:
        reader = BinaryReader.read_from_file(path)
    except FileNotFoundError as exc:
        raise ModelFileError(str(exc)) from exc
    return decode_model(reader.read(reader.length), reader.source)


@dataclass(frozen=True)
class LayerSummary:
    """One summary row."""

    name: str
    kind: str
    output_shape: tuple[int, ...]
    params: int


@dataclass(frozen=True)
class ModelSummary:
    """Per layer shapes and sizes of a network."""

    rows: tuple[LayerSummary, ...]
    total_params: int
    model_bytes: int

    def as_text(self) -> str:
        """Table in the usual layer / output shape / params form."""
        lines = [f"{'Layer':<10s} {'Type':<16s} {'Output Shape':<20s} {'Param #':>9s}"]
        for row in self.rows:
            shape = "(None, " + ", ".join(str(dim) for dim in row.output_shape) + ")"
            lines.append(f"{row.name:<10s} {row.kind:<16s} {shape:<20s} {row.params:>9d}")
        lines.append(f"Total params: {self.total_params}")
        lines.append(f"Model size: {self.model_bytes} bytes")
        return "\n".join(lines) + "\n"


@versionadded(version="0.1.0", reason="Layer shape and size summary")
def summarize(model: SequentialNet) -> ModelSummary:
    """summarize tabulates output shape and parameter count per layer.

    :param model: Network to summarize
    :type model: SequentialNet
    :return: Rows, total trainable parameters and serialized size
    :rtype: ModelSummary
    """
    rows = tuple(
        LayerSummary(layer.name, type(layer).__name__, tuple(shape), layer.param_count)
        for layer, shape in zip(model.layers, model.shapes)
    )
    return ModelSummary(rows, model.param_count, len(encode_model(model)))
