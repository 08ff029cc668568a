#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""Pipeline configuration loading."""

import logging
from pathlib import Path
from typing import Any, Optional, Union

import yaml

from mpcnn.config.confmodel import PipelineConfig
from mpcnn.mp_excepts import BadConfig

logger = logging.getLogger("mpcnn.config")
if not logging.getLogger().handlers:
    logger.addHandler(logging.NullHandler())
    logger.propagate = False


def _flatten(mapping: dict, prefix: str = "") -> dict[str, Any]:
    """Nested mapping to dotted keys."""
    result: dict[str, Any] = {}
    for key, value in mapping.items():
        dotted = f"{prefix}{key}"
        if isinstance(value, dict):
            result.update(_flatten(value, f"{dotted}."))
        else:
            result[dotted] = value
    return result


def parse_key_values(text: str, source: str = "<text>") -> dict[str, str]:
    """parse_key_values reads `key = value` lines.

    Blank lines and `#` comments are ignored.

    :param text: File content
    :type text: str
    :param source: Name used in error messages
    :type source: str
    :raises BadConfig: A line without `=`
    :return: Keys to raw values in file order
    :rtype: dict[str, str]
    """
    result: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise BadConfig(f"{source}:{lineno}: expected key = value, got {line!r}")
        result[key.strip()] = value.strip()
    return result


def read_config_file(path: Union[str, Path]) -> dict[str, Any]:
    """Read a key=value or yaml configuration file into dotted keys."""
    cfg_path = Path(path).expanduser()
    if not cfg_path.exists():
        raise BadConfig(f"{cfg_path} does not exist")
    text = cfg_path.read_text(encoding="utf8")
    if cfg_path.suffix.lower() in (".yaml", ".yml"):
        loaded = yaml.safe_load(text) or {}
        if not isinstance(loaded, dict):
            raise BadConfig(f"{cfg_path} must hold a mapping")
        return _flatten(loaded)
    return parse_key_values(text, str(cfg_path))


def load_config(
    config_path: Optional[Union[str, Path]] = None,
    overrides: Optional[dict[str, Any]] = None,
) -> PipelineConfig:
    """load_config builds the effective configuration.

    Precedence, lowest first: defaults, the config file, overrides.

    :param config_path: Optional key=value or yaml file, defaults to None
    :type config_path: Optional[Union[str, Path]], optional
    :param overrides: Dotted keys from command line flags, defaults to None
    :type overrides: Optional[dict[str, Any]], optional
    :return: Validated configuration
    :rtype: PipelineConfig
    """
    cfg = PipelineConfig()
    if config_path:
        file_values = read_config_file(config_path)
        logger.info(f"Loaded {len(file_values)} keys from {config_path}")
        cfg.update(file_values)
    if overrides:
        cfg.update({key: value for key, value in overrides.items() if value is not None})
    return cfg.validate()
