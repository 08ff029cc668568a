#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""Record, window and beat types."""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from mpcnn.mp_constants import SECONDS_PER_MINUTE, SUPPORTED_FORMATS
from mpcnn.mp_types.common_types import Label, LabelSource


def _frozen_array(values, dtype) -> np.ndarray:
    """Copy into a read only array."""
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SignalSpec:
    """One signal line of a record header."""

    file_name: str
    format_code: int
    gain: float
    baseline: int = 0
    description: str = ""


@dataclass(frozen=True)
class RecordHeader:
    """Parsed record header.

    :ivar record_id: Record name from the first header line
    :ivar num_signals: Signal count
    :ivar sampling_rate: Samples per second
    :ivar num_samples: Samples per signal
    :ivar signals: Per signal specs, may be empty when the header has only the record line
    """

    record_id: str
    num_signals: int
    sampling_rate: float
    num_samples: int
    signals: tuple[SignalSpec, ...] = ()

    def __post_init__(self) -> None:
        """Check invariants."""
        if self.sampling_rate <= 0 or self.num_signals < 1 or self.num_samples < 0:
            raise ValueError(
                f"Invalid header values fs={self.sampling_rate} signals={self.num_signals} samples={self.num_samples}"
            )
        for sig in self.signals:
            if sig.format_code not in SUPPORTED_FORMATS:
                raise ValueError(f"Format {sig.format_code} not supported")

    @property
    def gain(self) -> float:
        """First signal gain."""
        return self.signals[0].gain

    @property
    def format_code(self) -> int:
        """First signal storage format."""
        return self.signals[0].format_code


@dataclass(frozen=True)
class MinuteLabels:
    """Per minute labels and where they came from."""

    labels: tuple[Label, ...]
    source: LabelSource

    def __len__(self) -> int:
        """Label count."""
        return len(self.labels)

    def as_text(self) -> str:
        """One label per line."""
        return "".join(f"{lbl.value}\n" for lbl in self.labels)


@dataclass(frozen=True)
class EcgRecord:
    """Single lead record in mV with per minute labels."""

    record_id: str
    samples: np.ndarray
    sampling_rate: float
    minute_labels: tuple[Label, ...] = ()

    def __post_init__(self) -> None:
        """Freeze samples and check the label count."""
        object.__setattr__(self, "samples", _frozen_array(self.samples, np.float64))
        object.__setattr__(self, "minute_labels", tuple(Label(lbl) for lbl in self.minute_labels))
        if self.sampling_rate <= 0:
            raise ValueError(f"Invalid sampling rate {self.sampling_rate}")
        if len(self.minute_labels) > self.max_minutes:
            raise ValueError(
                f"{self.record_id}: {len(self.minute_labels)} labels exceed signal duration of {self.max_minutes} minutes"
            )

    @property
    def samples_per_minute(self) -> int:
        """Samples in one minute."""
        return int(round(SECONDS_PER_MINUTE * self.sampling_rate))

    @property
    def max_minutes(self) -> int:
        """Most labels the signal can carry."""
        return math.ceil(len(self.samples) / self.samples_per_minute)


@dataclass(frozen=True)
class AnalysisWindow:
    """Filtered samples centered on a labeled minute with adjacent context."""

    record_id: str
    center_minute: int
    samples: np.ndarray
    label: Label
    fs: float

    def __post_init__(self) -> None:
        """Freeze samples."""
        object.__setattr__(self, "samples", _frozen_array(self.samples, np.float64))

    @property
    def duration(self) -> float:
        """Window length in seconds."""
        return len(self.samples) / self.fs


@dataclass(frozen=True)
class BeatIndices:
    """Detected R and P peak sample indices."""

    r_peaks: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    p_peaks: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def __post_init__(self) -> None:
        """Freeze indices."""
        object.__setattr__(self, "r_peaks", _frozen_array(self.r_peaks, np.int64))
        object.__setattr__(self, "p_peaks", _frozen_array(self.p_peaks, np.int64))


@dataclass(frozen=True)
class Rejection:
    """Why a window was not turned into a feature segment."""

    record_id: str
    center_minute: int
    reason: str
    detail: Optional[str] = None
