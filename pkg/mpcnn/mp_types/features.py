#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""Feature extraction types."""

import dataclasses
from dataclasses import dataclass

import dataclasses_json
import numpy as np

from mpcnn.mp_types.common_types import Channel, Fiducial, Label


@dataclass
class WindowConfig(dataclasses_json.DataClassJsonMixin):
    """Where subsequences start and how long they are.

    :ivar start_fiducial: P anchors subsequences at P peaks, Q at R - q_offset
    :ivar m: Subsequence length in samples
    :ivar q_offset: Samples before R used as the Q point
    """

    start_fiducial: Fiducial = Fiducial.P
    m: int = 55
    q_offset: int = 5

    def __post_init__(self) -> None:
        """Check invariants."""
        self.start_fiducial = Fiducial(self.start_fiducial)
        if self.m < 2:
            raise ValueError(f"Subsequence length must be >= 2, got {self.m}")
        if self.q_offset < 0:
            raise ValueError(f"q_offset must be >= 0, got {self.q_offset}")


@dataclass(frozen=True)
class SubsequenceMatrix:
    """k rows of length m copied from a window."""

    rows: np.ndarray
    start_indices: np.ndarray
    m: int

    @property
    def k(self) -> int:
        """Subsequence count."""
        return self.rows.shape[0]


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric k x k Euclidean distances with zero diagonal."""

    d: np.ndarray

    @property
    def k(self) -> int:
        """Side length."""
        return self.d.shape[0]


@dataclass(frozen=True)
class FeatureSegment:
    """L x C feature tensor for one labeled minute.

    :ivar tensor: Values in [0, 1], columns in fixed channel order
    :ivar channels: Channels present
    :ivar label: Label of the center minute
    :ivar record_id: Source record
    :ivar center_minute: Minute index in the record
    """

    tensor: np.ndarray
    channels: Channel
    label: Label
    record_id: str
    center_minute: int

    def __post_init__(self) -> None:
        """Check shape against channels."""
        if self.tensor.ndim != 2 or self.tensor.shape[1] != self.channels.count:
            raise ValueError(
                f"Tensor shape {self.tensor.shape} does not match {self.channels.count} channels"
            )

    @property
    def channel_names(self) -> list[str]:
        """Channel names in tensor column order."""
        return self.channels.names

    @property
    def length(self) -> int:
        """L."""
        return self.tensor.shape[0]


@dataclass
class FeatureSet:
    """Stacked segments as arrays, the shape the trainer consumes."""

    x: np.ndarray
    y: np.ndarray
    record_ids: list[str] = dataclasses.field(default_factory=list)
    center_minutes: np.ndarray = dataclasses.field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    channels: Channel = Channel.MIN | Channel.MAX | Channel.MEAN

    @classmethod
    def from_segments(cls, segments: list[FeatureSegment]) -> "FeatureSet":
        """Stack segments (all with the same L and channels)."""
        if not segments:
            raise ValueError("No segments to stack")
        channels = segments[0].channels
        length = segments[0].length
        for seg in segments:
            if seg.channels != channels or seg.length != length:
                raise ValueError(f"Segment {seg.record_id}:{seg.center_minute} has a different shape")
        return cls(
            x=np.stack([seg.tensor for seg in segments]).astype(np.float32),
            y=np.array([seg.label.as_int for seg in segments], dtype=np.int64),
            record_ids=[seg.record_id for seg in segments],
            center_minutes=np.array([seg.center_minute for seg in segments], dtype=np.int64),
            channels=channels,
        )

    def __len__(self) -> int:
        """Segment count."""
        return self.x.shape[0]

    def subset(self, index: np.ndarray) -> "FeatureSet":
        """Rows at index."""
        return FeatureSet(
            x=self.x[index],
            y=self.y[index],
            record_ids=[self.record_ids[i] for i in index],
            center_minutes=self.center_minutes[index],
            channels=self.channels,
        )
