#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""mpcnn Configuration Model."""

import dataclasses
import json
import typing
from typing import Any, Optional

import dataclasses_json

import mpcnn.config.confgroup as cfggrp
from mpcnn.mp_excepts import BadConfig, UnknownConfigKey

_KEY_ALIASES: dict[str, str] = {"seed": "train.seed"}


def _coerce(value: Any, to_type: Any) -> Any:
    """Convert text or yaml scalars to a field's declared type."""
    origin = typing.get_origin(to_type)
    if origin is typing.Union:
        args = [arg for arg in typing.get_args(to_type) if arg is not type(None)]
        if value is None or (isinstance(value, str) and value.strip().lower() in ("none", "null", "")):
            return None
        return _coerce(value, args[0])
    if to_type is bool:
        if isinstance(value, str):
            return value.strip().lower() in ("1", "true", "yes", "on")
        return bool(value)
    if to_type is int:
        if isinstance(value, float) and not value.is_integer():
            raise ValueError(f"{value} is not an integer")
        return int(value)
    if to_type is float:
        return float(value)
    if to_type is str:
        if isinstance(value, (list, tuple)):
            return ",".join(str(v) for v in value)
        return str(value).strip()
    return value


@dataclasses.dataclass
class PipelineConfig(dataclasses_json.DataClassJsonMixin):
    """mpcnn configuration in memory model."""

    filter: cfggrp.FilterGroup = dataclasses.field(default_factory=cfggrp.FilterGroup)
    window: cfggrp.WindowGroup = dataclasses.field(default_factory=cfggrp.WindowGroup)
    reject: cfggrp.RejectGroup = dataclasses.field(default_factory=cfggrp.RejectGroup)
    ppeak: cfggrp.PPeakGroup = dataclasses.field(default_factory=cfggrp.PPeakGroup)
    rpeak: cfggrp.RPeakGroup = dataclasses.field(default_factory=cfggrp.RPeakGroup)
    features: cfggrp.FeaturesGroup = dataclasses.field(default_factory=cfggrp.FeaturesGroup)
    train: cfggrp.TrainConfig = dataclasses.field(default_factory=cfggrp.TrainConfig)
    ablate: cfggrp.AblateGroup = dataclasses.field(default_factory=cfggrp.AblateGroup)
    annotation: cfggrp.AnnotationGroup = dataclasses.field(default_factory=cfggrp.AnnotationGroup)
    synth: cfggrp.SynthGroup = dataclasses.field(default_factory=cfggrp.SynthGroup)
    threads: int = 1

    def _resolve(self, key: str) -> tuple[Any, str, Any]:
        """Find the owning object, attribute and declared type for a dotted key."""
        key = _KEY_ALIASES.get(key, key)
        owner: Any = self
        parts = key.split(".")
        for part in parts[:-1]:
            if not dataclasses.is_dataclass(owner) or part not in {f.name for f in dataclasses.fields(owner)}:
                raise UnknownConfigKey(key)
            owner = getattr(owner, part)
        attr = parts[-1]
        hints = typing.get_type_hints(type(owner))
        if (
            not dataclasses.is_dataclass(owner)
            or attr not in {f.name for f in dataclasses.fields(owner)}
            or dataclasses.is_dataclass(getattr(owner, attr))
        ):
            raise UnknownConfigKey(key)
        return owner, attr, hints[attr]

    def get(self, key: str) -> Any:
        """Value for a dotted key."""
        owner, attr, _ = self._resolve(key)
        return getattr(owner, attr)

    def set(self, key: str, value: Any) -> None:
        """set Assign a dotted key, coercing to the declared type.

        :param key: Dotted key such as `filter.low_hz`
        :type key: str
        :param value: New value, text is converted
        :type value: Any
        :raises UnknownConfigKey: key is not a configuration field
        :raises BadConfig: value does not convert or violates a group invariant
        """
        owner, attr, to_type = self._resolve(key)
        try:
            setattr(owner, attr, _coerce(value, to_type))
        except (TypeError, ValueError) as exc:
            raise BadConfig(f"{key}={value!r}: {exc}") from exc

    def update(self, values: dict[str, Any]) -> "PipelineConfig":
        """Apply a flat mapping of dotted keys."""
        for key, value in values.items():
            self.set(key, value)
        return self

    def flat(self) -> dict[str, Any]:
        """All keys as a flat dotted mapping."""
        result: dict[str, Any] = {}
        for fld in dataclasses.fields(self):
            value = getattr(self, fld.name)
            if dataclasses.is_dataclass(value):
                for sub in dataclasses.fields(value):
                    result[f"{fld.name}.{sub.name}"] = getattr(value, sub.name)
            else:
                result[fld.name] = value
        return result

    def validate(self) -> "PipelineConfig":
        """Re-run group invariants after piecewise updates."""
        try:
            cfggrp.TrainConfig(**dataclasses.asdict(self.train))
            _ = self.features.window_config
            _ = self.features.channel_set
            _ = self.annotation.code_map
            _ = self.ablate.window_presets(self.features.q_offset)
            _ = cfggrp.FeaturesGroup(channels=self.ablate.window_channels).channel_set
        except (TypeError, ValueError, KeyError) as exc:
            raise BadConfig(str(exc)) from exc
        if self.window.span_minutes < 1 or self.window.span_minutes % 2 == 0:
            raise BadConfig(f"window.span_minutes must be odd and >= 1, got {self.window.span_minutes}")
        if self.ppeak.w1 <= self.ppeak.w2 or self.ppeak.w2 < 0:
            raise BadConfig(f"ppeak requires w1 > w2 >= 0, got w1={self.ppeak.w1} w2={self.ppeak.w2}")
        if self.reject.min_bpm > self.reject.max_bpm:
            raise BadConfig("reject.min_bpm exceeds reject.max_bpm")
        if self.ablate.repeats < 1:
            raise BadConfig("ablate.repeats must be >= 1")
        if self.threads < 1:
            raise BadConfig("threads must be >= 1")
        return self

    def effective(self, *, version: Optional[str] = None) -> str:
        """Canonical JSON of the configuration, used as artifact provenance."""
        body = self.to_dict(encode_json=True)
        if version:
            body = {"mpcnn_version": version, **body}
        return json.dumps(body, sort_keys=True, separators=(",", ":"))
