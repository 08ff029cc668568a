#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""mpcnn Configuration Groups."""

import dataclasses
from typing import Optional

import dataclasses_json

import mpcnn.mp_constants as cnst
from mpcnn.mp_types.common_types import Channel, Fiducial, Label
from mpcnn.mp_types.features import WindowConfig


@dataclasses.dataclass
class FilterGroup(dataclasses_json.DataClassJsonMixin):
    """Band-pass FIR settings."""

    low_hz: float = cnst.DEFAULT_LOW_HZ
    high_hz: float = cnst.DEFAULT_HIGH_HZ
    taps: int = cnst.DEFAULT_TAPS


@dataclasses.dataclass
class WindowGroup(dataclasses_json.DataClassJsonMixin):
    """Analysis window settings."""

    span_minutes: int = cnst.DEFAULT_SPAN_MINUTES


@dataclasses.dataclass
class RejectGroup(dataclasses_json.DataClassJsonMixin):
    """Heart rate plausibility bounds, inclusive."""

    min_bpm: float = cnst.DEFAULT_MIN_BPM
    max_bpm: float = cnst.DEFAULT_MAX_BPM


@dataclasses.dataclass
class PPeakGroup(dataclasses_json.DataClassJsonMixin):
    """P peak search window before each R peak, in samples."""

    w1: int = cnst.DEFAULT_W1
    w2: int = cnst.DEFAULT_W2


@dataclasses.dataclass
class RPeakGroup(dataclasses_json.DataClassJsonMixin):
    """Hamilton detector parameters."""

    low_hz: float = cnst.HAMILTON_LOW_HZ
    high_hz: float = cnst.HAMILTON_HIGH_HZ
    th_coeff: float = cnst.HAMILTON_TH_COEFF
    history: int = cnst.HAMILTON_HISTORY
    refractory_s: float = cnst.HAMILTON_REFRACTORY_S
    envelope_s: float = cnst.HAMILTON_ENVELOPE_S
    searchback_rr: float = cnst.HAMILTON_SEARCHBACK_RR
    searchback_th: float = cnst.HAMILTON_SEARCHBACK_TH
    snap_s: float = cnst.HAMILTON_SNAP_S


@dataclasses.dataclass
class FeaturesGroup(dataclasses_json.DataClassJsonMixin):
    """Feature extraction settings."""

    channels: str = "min,max,mean"
    subseq_start: str = Fiducial.P.value
    subseq_len: int = cnst.DEFAULT_SUBSEQ_LEN
    q_offset: int = cnst.DEFAULT_W2
    length: int = cnst.DEFAULT_LENGTH

    @property
    def channel_set(self) -> Channel:
        """Parsed channel flags."""
        return Channel.from_names(self.channels.split(","))

    @property
    def window_config(self) -> WindowConfig:
        """Parsed subsequence window."""
        return WindowConfig(Fiducial(self.subseq_start.upper()), self.subseq_len, self.q_offset)


@dataclasses.dataclass
class TrainConfig(dataclasses_json.DataClassJsonMixin):
    """Trainer hyper parameters."""

    epochs: int = cnst.DEFAULT_EPOCHS
    batch_size: int = cnst.DEFAULT_BATCH_SIZE
    lr0: float = cnst.DEFAULT_LR
    lr_hold_epochs: int = cnst.LR_HOLD_EPOCHS
    lr_decay_every: int = cnst.LR_DECAY_EVERY
    lr_decay_factor: float = cnst.LR_DECAY_FACTOR
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-7
    bn_eps: float = 1e-3
    bn_momentum: float = 0.99
    dropout: float = 0.5
    val_fraction: float = cnst.DEFAULT_VAL_FRACTION
    seed: int = 0

    def __post_init__(self) -> None:
        """Check invariants."""
        if not 0.0 < self.val_fraction < 1.0:
            raise ValueError(f"val_fraction must be in (0, 1), got {self.val_fraction}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 2:
            raise ValueError(f"batch_size must be >= 2, got {self.batch_size}")


@dataclasses.dataclass
class AblateGroup(dataclasses_json.DataClassJsonMixin):
    """Ablation study settings."""

    repeats: int = 5
    features_window: str = "T1"
    window_channels: str = "min,max"
    t1_m: int = 55
    t2_m: int = 25
    t3_m: int = 40
    t4_m: int = 15

    def window_presets(self, q_offset: int) -> dict[str, WindowConfig]:
        """T1..T4 with the configured lengths."""
        return {
            "T1": WindowConfig(Fiducial.P, self.t1_m, q_offset),
            "T2": WindowConfig(Fiducial.P, self.t2_m, q_offset),
            "T3": WindowConfig(Fiducial.Q, self.t3_m, q_offset),
            "T4": WindowConfig(Fiducial.Q, self.t4_m, q_offset),
        }


@dataclasses.dataclass
class AnnotationGroup(dataclasses_json.DataClassJsonMixin):
    """Annotation code map as `code:label` pairs."""

    codes: str = ",".join(f"{code}:{lbl}" for code, lbl in cnst.DEFAULT_CODE_MAP.items())

    @property
    def code_map(self) -> dict[int, Label]:
        """Parsed map."""
        result: dict[int, Label] = {}
        for pair in filter(None, (part.strip() for part in self.codes.split(","))):
            code, _, lbl = pair.partition(":")
            result[int(code)] = Label(lbl.strip().upper())
        return result


@dataclasses.dataclass
class SynthGroup(dataclasses_json.DataClassJsonMixin):
    """Synthetic corpus defaults."""

    base_bpm: float = 60.0
    modulation_bpm: float = 12.0
    modulation_period_s: float = 30.0
    apnea_fraction: float = 0.4
    noise_snr_db: Optional[float] = 20.0
