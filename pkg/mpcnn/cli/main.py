#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""Main driver for the mpcnn command line."""

import argparse
import logging
import sys
from typing import Optional, Sequence

LOG_FORMAT = "%(asctime)s %(module)s %(levelname)s %(message)s"


def _log_level(arg_line: list[str]) -> str:
    """--log-level ahead of the full parse."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--log-level", default="WARNING")
    known, _ = pre.parse_known_args(arg_line)
    return str(known.log_level).upper()


def _configure_logging(level: str) -> None:
    """Route package loggers created before configuration to the root handler."""
    logging.basicConfig(format=LOG_FORMAT, level=getattr(logging, level, logging.WARNING))
    for name in list(logging.Logger.manager.loggerDict):
        if name == "mpcnn" or name.startswith("mpcnn."):
            pkg_logger = logging.getLogger(name)
            for handler in [hdl for hdl in pkg_logger.handlers if isinstance(hdl, logging.NullHandler)]:
                pkg_logger.removeHandler(handler)
            pkg_logger.propagate = True


def _command_failed(exc: Exception) -> int:
    """One categorized error line on stderr, exit status 2."""
    logging.getLogger("mpcnn.cli").debug("Command failed", exc_info=True)
    print(f"error[{type(exc).__name__}]: {exc}", file=sys.stderr)
    return 2


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point, returns the process exit status."""
    arg_line = list(sys.argv[1:] if argv is None else argv)
    _configure_logging(_log_level(arg_line))

    from mpcnn.cli.cmd_args import build_parser, config_overrides
    from mpcnn.cli.cmds import MPCNN_CMD_DISPATCH
    from mpcnn.config import load_config
    from mpcnn.mp_excepts import FileAccessError, MpcnnException

    parsed = build_parser(arg_line)
    cmd_call = MPCNN_CMD_DISPATCH.get(parsed.subcommand, None)
    if not cmd_call:
        print(f"Unable to resolve function for {parsed.subcommand}", file=sys.stderr)
        return 2
    var_args = vars(parsed)
    var_args.pop("subcommand")
    parsed = argparse.Namespace(**var_args)
    try:
        cfg = load_config(parsed.config, config_overrides(parsed))
        cmd_call(cfg, parsed)
    except MpcnnException as exc:
        return _command_failed(exc)
    except OSError as exc:
        return _command_failed(FileAccessError(str(exc)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
