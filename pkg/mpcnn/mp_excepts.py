#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""mpcnn Exceptions."""


class MpcnnException(Exception):
    """Base Exception."""


# Ingestion exceptions


class MalformedHeader(MpcnnException, ValueError):
    """Record header could not be parsed."""


class UnsupportedFormat(MpcnnException, ValueError):
    """Storage format is not 16 or 212."""

    def __init__(self, format_code: int) -> None:
        """Initialize unsupported format error."""
        self.format_code = format_code
        self.args = (f"Unsupported sample format {format_code}",)


class SizeMismatch(MpcnnException, ValueError):
    """Sample file size disagrees with the header."""

    def __init__(self, expected: int, found: int) -> None:
        """Initialize size mismatch error."""
        self.expected = expected
        self.found = found
        self.args = (f"Expected {expected} bytes of samples, found {found}",)


class EcgIoError(MpcnnException, OSError):
    """Record file missing or unreadable."""


class TruncatedFile(MpcnnException, ValueError):
    """Annotation stream ended before the terminating word."""


class UnknownCode(MpcnnException, ValueError):
    """Annotation code is neither mapped nor structural."""

    def __init__(self, code: int) -> None:
        """Initialize unknown code error."""
        self.code = code
        self.args = (f"Annotation code {code} has no label mapping",)


class BadLabelChar(MpcnnException, ValueError):
    """Text label file holds something other than A or N."""

    def __init__(self, line: int, found: str) -> None:
        """Initialize bad label error."""
        self.line = line
        self.args = (f"Invalid label {found!r} at line {line}",)


class NoRecords(MpcnnException, ValueError):
    """Data directory holds no readable records."""


class FileAccessError(MpcnnException, OSError):
    """Input or output path could not be opened."""


# Preprocessing exceptions


class BadBand(MpcnnException, ValueError):
    """Filter band violates 0 < low < high < fs/2."""


class EvenTaps(MpcnnException, ValueError):
    """Filter tap count must be odd and large enough."""


class SignalTooShort(MpcnnException, ValueError):
    """Signal is too short for the requested operation."""


# Feature exceptions


class TooFewSubsequences(MpcnnException, ValueError):
    """Fewer than two subsequences fit the window."""

    def __init__(self, found: int) -> None:
        """Initialize too few subsequences error."""
        self.found = found
        self.args = (f"Need at least 2 subsequences, found {found}",)


class FeatureFileError(MpcnnException, ValueError):
    """Feature file is corrupt or inconsistent."""


# Network exceptions


class ShapeMismatch(MpcnnException, ValueError):
    """Tensor shape is not what the layer expects."""


class NonFiniteTensor(MpcnnException, FloatingPointError):
    """A layer produced NaN or Inf."""

    def __init__(self, layer: str) -> None:
        """Initialize non finite error."""
        self.layer = layer
        self.args = (f"Non finite values produced by {layer}",)


class DegenerateBatch(MpcnnException, ValueError):
    """Batch norm training needs at least two samples."""


class BadRate(MpcnnException, ValueError):
    """Dropout rate outside [0, 1)."""


class EmptyClass(MpcnnException, ValueError):
    """Training needs at least two segments per class."""


class ModelFileError(MpcnnException, ValueError):
    """Model file is corrupt or inconsistent."""


# Evaluation exceptions


class EmptyInput(MpcnnException, ValueError):
    """Nothing to evaluate."""


class NeedTwoRecordings(MpcnnException, ValueError):
    """Correlation needs at least two recordings."""

    def __init__(self, found: int) -> None:
        """Initialize need two recordings error."""
        self.found = found
        self.args = (f"Pearson correlation needs 2 or more recordings, found {found}",)


# Configuration exceptions


class BadConfig(MpcnnException, ValueError):
    """Configuration value is invalid."""


class UnknownConfigKey(MpcnnException, KeyError):
    """Configuration key does not exist."""

    def __init__(self, key: str) -> None:
        """Initialize unknown key error."""
        self.key = key
        self.args = (f"Unknown configuration key {key!r}",)

    def __str__(self) -> str:
        """Avoid KeyError quoting."""
        return self.args[0]
