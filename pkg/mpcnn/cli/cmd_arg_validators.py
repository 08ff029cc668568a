#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""Argparse validators for the mpcnn command line."""

import argparse
from pathlib import Path
from typing import Any, Sequence

from mpcnn.mp_types import Channel
from mpcnn.mp_types.common_types import Fiducial


def check_positive(value: str) -> int:
    """Check argument for integers >= 1."""
    try:
        ivalue = int(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{value} is not an integer") from exc
    if ivalue < 1:
        raise argparse.ArgumentTypeError(f"{value} is an invalid positive int value")
    return ivalue


def check_non_negative(value: str) -> int:
    """Check argument for integers >= 0."""
    try:
        ivalue = int(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{value} is not an integer") from exc
    if ivalue < 0:
        raise argparse.ArgumentTypeError(f"{value} is an invalid non negative int value")
    return ivalue


class ValidateDirectory(argparse.Action):
    """Existing directory validator."""

    def __call__(
        self,
        parser: argparse.ArgumentParser,
        namespace: argparse.Namespace,
        values: str | Sequence[Any] | None,
        option_string: str | None = ...,
    ) -> None:
        """Validate."""
        dpath = Path(str(values)).expanduser()
        if not dpath.is_dir():
            parser.error(f"{dpath} is not a directory.")
        setattr(namespace, self.dest, dpath)


class ValidateFile(argparse.Action):
    """Existing file validator."""

    def __call__(
        self,
        parser: argparse.ArgumentParser,
        namespace: argparse.Namespace,
        values: str | Sequence[Any] | None,
        option_string: str | None = ...,
    ) -> None:
        """Validate."""
        fpath = Path(str(values)).expanduser()
        if not fpath.is_file():
            parser.error(f"{fpath} does not exist.")
        setattr(namespace, self.dest, fpath)


class ValidateChannels(argparse.Action):
    """Channel subset validator, comma separated min, max, mean."""

    def __call__(
        self,
        parser: argparse.ArgumentParser,
        namespace: argparse.Namespace,
        values: str | Sequence[Any] | None,
        option_string: str | None = ...,
    ) -> None:
        """Validate and normalize to the fixed channel order."""
        try:
            channels = Channel.from_names(str(values).split(","))
        except ValueError as exc:
            parser.error(f"'{values}' is not a valid channel list: {exc}")
        setattr(namespace, self.dest, ",".join(channels.names))


class ValidateFiducial(argparse.Action):
    """Subsequence start validator, p or q."""

    def __call__(
        self,
        parser: argparse.ArgumentParser,
        namespace: argparse.Namespace,
        values: str | Sequence[Any] | None,
        option_string: str | None = ...,
    ) -> None:
        """Validate."""
        try:
            fiducial = Fiducial(str(values).strip().upper())
        except ValueError:
            parser.error(f"'{values}' is not a subsequence start, expected p or q.")
        setattr(namespace, self.dest, fiducial.value)


class ValidateKeyValue(argparse.Action):
    """Accumulates `key=value` configuration overrides."""

    def __call__(
        self,
        parser: argparse.ArgumentParser,
        namespace: argparse.Namespace,
        values: str | Sequence[Any] | None,
        option_string: str | None = ...,
    ) -> None:
        """Validate."""
        key, sep, value = str(values).partition("=")
        if not sep or not key.strip():
            parser.error(f"'{values}' is not in key=value form.")
        pairs = dict(getattr(namespace, self.dest, None) or {})
        pairs[key.strip()] = value.strip()
        setattr(namespace, self.dest, pairs)
