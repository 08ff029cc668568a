#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-


"""Argument parsing for the mpcnn command line."""

import argparse
from typing import Any

from mpcnn.cli.cmd_arg_validators import (
    ValidateChannels,
    ValidateDirectory,
    ValidateFiducial,
    ValidateFile,
    ValidateKeyValue,
    check_non_negative,
    check_positive,
)

LOG_LEVELS: tuple[str, ...] = ("DEBUG", "INFO", "WARNING", "ERROR")

# Parsed argument name to configuration key
FLAG_CONFIG_KEYS: dict[str, str] = {
    "seed": "seed",
    "threads": "threads",
    "channels": "features.channels",
    "subseq_start": "features.subseq_start",
    "subseq_len": "features.subseq_len",
    "length": "features.length",
    "epochs": "train.epochs",
    "repeats": "ablate.repeats",
}


def _add_run_flags(subp: argparse.ArgumentParser) -> None:
    """--seed and --threads also accepted after the command."""
    subp.add_argument("--seed", type=check_non_negative, default=argparse.SUPPRESS, help="Base seed")
    subp.add_argument("--threads", type=check_positive, default=argparse.SUPPRESS, help="Worker processes")


def _build_feature_cmds(subparser) -> None:
    """Corpus commands."""
    # Preprocess
    subp = subparser.add_parser("preprocess", help="Extract distance profile features from a record directory")
    subp.add_argument("-d", "--data-dir", required=True, help="Directory of .hea records", action=ValidateDirectory)
    subp.add_argument("-o", "--out", required=True, help="Feature file (.mpf) to write")
    subp.add_argument(
        "-c",
        "--channels",
        required=False,
        help="Comma separated subset of min,max,mean. Optional.",
        action=ValidateChannels,
    )
    subp.add_argument(
        "--subseq-start",
        required=False,
        help="Subsequence start fiducial, p or q. Optional.",
        action=ValidateFiducial,
    )
    subp.add_argument("--subseq-len", required=False, type=check_positive, help="Subsequence length m. Optional.")
    subp.add_argument("--length", required=False, type=check_positive, help="Resampled segment length. Optional.")
    _add_run_flags(subp)
    subp.set_defaults(subcommand="preprocess")
    # Synthetic corpus
    subp = subparser.add_parser("synth", help="Write a synthetic labeled ECG corpus")
    subp.add_argument("-o", "--out", required=True, help="Output directory")
    subp.add_argument("-r", "--records", type=check_positive, default=4, help="Record count, defaults to 4")
    subp.add_argument("-m", "--minutes", type=check_positive, default=30, help="Minutes per record, defaults to 30")
    _add_run_flags(subp)
    subp.set_defaults(subcommand="synth")
    # Label conversion
    subp = subparser.add_parser("convert-labels", help="Convert a binary .apn annotation file to .apn.txt")
    subp.add_argument("--apn", required=True, help="Binary annotation file", action=ValidateFile)
    subp.add_argument("-o", "--out", required=True, help="Text label file to write")
    subp.add_argument("--fs", type=float, default=100.0, help="Record sampling rate, defaults to 100")
    subp.set_defaults(subcommand="convert-labels")


def _build_model_cmds(subparser) -> None:
    """Training and evaluation commands."""
    # Train
    subp = subparser.add_parser("train", help="Train the classifier on a feature file")
    subp.add_argument("-f", "--features", required=True, help="Feature file (.mpf)", action=ValidateFile)
    subp.add_argument("-o", "--out", required=True, help="Model file (.mpnn) to write")
    subp.add_argument("--history", required=False, help="History table path. Defaults to <out>.history.txt")
    subp.add_argument("--best-out", required=False, help="Also write the best validation checkpoint. Optional.")
    subp.add_argument("-e", "--epochs", required=False, type=check_positive, help="Epoch count. Optional.")
    subp.add_argument("--summary", help="Print the per layer summary", action="store_true")
    _add_run_flags(subp)
    subp.set_defaults(subcommand="train")
    # Eval
    subp = subparser.add_parser("eval", help="Evaluate a model on a feature file")
    subp.add_argument("-f", "--features", required=True, help="Feature file (.mpf)", action=ValidateFile)
    subp.add_argument("-m", "--model", required=True, help="Model file (.mpnn)", action=ValidateFile)
    subp.add_argument("-p", "--per-recording", help="Add AHI based recording metrics", action="store_true")
    subp.add_argument("--report", required=False, help="Report path. Printed when omitted.")
    subp.set_defaults(subcommand="eval")
    # Ablate
    subp = subparser.add_parser("ablate", help="Run the feature subset or window size study")
    subp.add_argument("-s", "--study", required=True, choices=["features", "window"], help="Which study")
    subp.add_argument("-d", "--data-dir", required=True, help="Training record directory", action=ValidateDirectory)
    subp.add_argument(
        "-t",
        "--test-dir",
        required=False,
        help="Withheld record directory. Validation partition when omitted.",
        action=ValidateDirectory,
    )
    subp.add_argument("-r", "--repeats", required=False, type=check_positive, help="Runs per condition. Optional.")
    subp.add_argument("-e", "--epochs", required=False, type=check_positive, help="Epoch count. Optional.")
    subp.add_argument("-o", "--out", required=False, help="Results table path. Printed when omitted.")
    _add_run_flags(subp)
    subp.set_defaults(subcommand="ablate")


def build_parser(in_args: list) -> argparse.Namespace:
    """Build the argument parser structure."""
    # Base menu
    parser = argparse.ArgumentParser(
        prog="mpcnn", add_help=True, usage="%(prog)s [options] command [--command_options]"
    )
    parser.add_argument("-v", "--version", help="Show mpcnn version", action="store_true")
    parser.add_argument("--config", required=False, help="key = value or yaml configuration file", action=ValidateFile)
    parser.add_argument("--seed", type=check_non_negative, default=None, help="Base seed")
    parser.add_argument("--threads", type=check_positive, default=None, help="Worker processes")
    parser.add_argument(
        "--set",
        dest="overrides",
        metavar="KEY=VALUE",
        default=None,
        help="Configuration override, repeatable",
        action=ValidateKeyValue,
    )
    parser.add_argument("--log-level", choices=LOG_LEVELS, default="WARNING", help="Defaults to WARNING")
    parser.set_defaults(subcommand="version")
    subparser = parser.add_subparsers(title="commands")
    _build_feature_cmds(subparser)
    _build_model_cmds(subparser)

    return parser.parse_args(in_args if in_args else ["--help"])


def config_overrides(parsed: argparse.Namespace) -> dict[str, Any]:
    """Dotted configuration keys from --set pairs and command flags, flags last."""
    result: dict[str, Any] = dict(parsed.overrides or {})
    for arg_name, key in FLAG_CONFIG_KEYS.items():
        value = getattr(parsed, arg_name, None)
        if value is not None:
            result[key] = value
    return result
