#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""Common enums shared by every stage."""

from enum import Enum, IntFlag
from typing import Iterable

from mpcnn.mp_constants import CHANNEL_ORDER


class Label(str, Enum):
    """Per minute annotation."""

    N = "N"
    A = "A"

    @property
    def as_int(self) -> int:
        """0 for N, 1 for A (A is the positive class)."""
        return 1 if self is Label.A else 0


class LabelSource(str, Enum):
    """Where minute labels were read from."""

    ANNOTATION_FILE = "annotation_file"
    TEXT_FILE = "text_file"
    SYNTHETIC = "synthetic"


class Fiducial(str, Enum):
    """Subsequence start fiducial."""

    P = "P"
    Q = "Q"


class Channel(IntFlag):
    """Distance profile reductions, bit values match the feature file mask."""

    MIN = 1
    MAX = 2
    MEAN = 4

    @classmethod
    def from_names(cls, names: Iterable[str]) -> "Channel":
        """from_names builds a channel set from names like min, max, mean.

        :param names: Channel names, case insensitive, `MinDP` style accepted
        :type names: Iterable[str]
        :raises ValueError: On unknown or empty names
        :return: Combined channel flags
        :rtype: Channel
        """
        result = cls(0)
        for name in names:
            key = name.strip().lower().removesuffix("dp")
            if key not in CHANNEL_ORDER:
                raise ValueError(f"Unknown channel {name!r}, expected one of {CHANNEL_ORDER}")
            result |= cls[key.upper()]
        if not result:
            raise ValueError("At least one channel is required")
        return result

    @property
    def ordered(self) -> list["Channel"]:
        """Members in the fixed (min, max, mean) order."""
        return [chan for chan in (Channel.MIN, Channel.MAX, Channel.MEAN) if chan & self]

    @property
    def names(self) -> list[str]:
        """Short names in fixed order."""
        return [chan.name.lower() for chan in self.ordered]

    @property
    def display(self) -> str:
        """MinDP style names joined with +."""
        return "+".join(f"{nm.capitalize()}DP" for nm in self.names)

    @property
    def count(self) -> int:
        """Number of channels selected."""
        return len(self.ordered)
