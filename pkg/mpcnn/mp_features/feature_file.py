#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""Feature file (`.mpf`) codec.

Layout, little endian::

    magic "MPF1" | u32 L | u8 C | u8 channel mask | u32 count
    count x (8 byte space padded record id | u32 center minute | u8 label | L*C f32 channel major)
    u32 n | n bytes of UTF-8 JSON provenance (effective config and version)

The provenance trailer is optional when reading.
"""

import json
import logging
from pathlib import Path
from typing import Any, Union

import numpy as np

from mpcnn.bin_reader.reader import BinaryReader, BinaryWriter
from mpcnn.mp_constants import FEATURE_MAGIC, RECORD_ID_BYTES
from mpcnn.mp_excepts import FeatureFileError
from mpcnn.mp_types import Channel, FeatureSet

logger = logging.getLogger("mpcnn.feature_file")
if not logging.getLogger().handlers:
    logger.addHandler(logging.NullHandler())
    logger.propagate = False


def segment_dtype(length: int, num_channels: int) -> np.dtype:
    """Packed per segment record layout."""
    return np.dtype(
        [
            ("record_id", f"S{RECORD_ID_BYTES}"),
            ("center_minute", "<u4"),
            ("label", "u1"),
            ("values", "<f4", (num_channels * length,)),
        ]
    )


def encode_features(fset: FeatureSet, provenance: str = "") -> bytes:
    """encode_features serializes a feature set.

    :param fset: Segments to write, tensors L x C
    :type fset: FeatureSet
    :param provenance: JSON text for the trailer, defaults to ""
    :type provenance: str, optional
    :return: File content
    :rtype: bytes
    """
    count = len(fset)
    length, num_channels = (fset.x.shape[1], fset.x.shape[2]) if count else (0, fset.channels.count)
    if num_channels != fset.channels.count:
        raise FeatureFileError(f"Tensor has {num_channels} channels, mask says {fset.channels.count}")
    records = np.zeros(count, dtype=segment_dtype(length, num_channels))
    for i, rid in enumerate(fset.record_ids):
        try:
            raw = rid.encode("ascii")
        except UnicodeEncodeError as exc:
            raise FeatureFileError(f"Record id {rid!r} is not ASCII") from exc
        if len(raw) > RECORD_ID_BYTES:
            raise FeatureFileError(f"Record id {rid!r} longer than {RECORD_ID_BYTES} bytes")
        records["record_id"][i] = raw.ljust(RECORD_ID_BYTES, b" ")
    records["center_minute"] = fset.center_minutes
    records["label"] = fset.y
    if count:
        # Channel major: all L values of the first channel, then the next
        records["values"] = fset.x.transpose(0, 2, 1).reshape(count, -1)
    trailer = provenance.encode("utf8")
    writer = BinaryWriter()
    writer.write(FEATURE_MAGIC).write_int(length, 4).write_int(num_channels, 1)
    writer.write_int(int(fset.channels), 1).write_int(count, 4)
    writer.write(records.tobytes())
    writer.write_int(len(trailer), 4).write(trailer)
    return writer.getvalue()


def decode_features(data: bytes, source: str = "<features>") -> tuple[FeatureSet, str]:
    """decode_features parses `.mpf` content.

    :param data: File content
    :type data: bytes
    :param source: Name used in messages
    :type source: str
    :raises FeatureFileError: Bad magic, inconsistent header, bad label or record id, or truncated body
    :return: The feature set and the provenance text ("" when absent)
    :rtype: tuple[FeatureSet, str]
    """
    reader = BinaryReader(source, data)
    try:
        if reader.read(4) != FEATURE_MAGIC:
            raise FeatureFileError(f"{source}: not a feature file")
        length = reader.read_as_int(4)
        num_channels = reader.read_as_int(1)
        mask = reader.read_as_int(1)
        count = reader.read_as_int(4)
        channels = Channel(mask)
        if mask == 0 or mask > 7 or channels.count != num_channels:
            raise FeatureFileError(f"{source}: channel mask {mask:#x} does not match C={num_channels}")
        records = reader.read_array(segment_dtype(length, num_channels), count)
        provenance = ""
        if reader.remaining():
            provenance = reader.read(reader.read_as_int(4)).decode("utf8")
    except EOFError as exc:
        raise FeatureFileError(f"{source}: truncated ({exc})") from exc
    if np.any(records["label"] > 1):
        raise FeatureFileError(f"{source}: labels must be 0 or 1")
    try:
        record_ids = [rid.decode("ascii").rstrip(" ") for rid in records["record_id"]]
    except UnicodeDecodeError as exc:
        raise FeatureFileError(f"{source}: record id is not ASCII") from exc
    fset = FeatureSet(
        x=records["values"].reshape(count, num_channels, length).transpose(0, 2, 1).astype(np.float32),
        y=records["label"].astype(np.int64),
        record_ids=record_ids,
        center_minutes=records["center_minute"].astype(np.int64),
        channels=channels,
    )
    return fset, provenance


def write_features(path: Union[str, Path], fset: FeatureSet, provenance: str = "") -> None:
    """Write a feature file."""
    Path(path).write_bytes(encode_features(fset, provenance))
    logger.info(f"Wrote {len(fset)} segments ({fset.channels.display}) to {path}")


def read_features(path: Union[str, Path]) -> tuple[FeatureSet, str]:
    """Read a feature file and its provenance text."""
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise FeatureFileError(f"Cannot read {path}: {exc}") from exc
    return decode_features(data, str(path))


def provenance_config(provenance: str) -> dict[str, Any]:
    """Parsed provenance, {} when absent."""
    return json.loads(provenance) if provenance else {}
