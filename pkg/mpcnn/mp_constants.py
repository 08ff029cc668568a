#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-


"""mpcnn Constants."""

# Ingestion
DEFAULT_ADC_GAIN: float = 200.0
"""Gain (adu per mV) used when a header omits it."""
SUPPORTED_FORMATS: tuple[int, ...] = (16, 212)
"""WFDB storage formats understood by the sample reader."""
DEFAULT_CODE_MAP: dict[int, str] = {1: "N", 8: "A"}
"""Annotation code to minute label mapping."""
ANN_CODE_SKIP: int = 59
"""Annotation code announcing a 4 byte extended time interval."""
ANN_CODE_AUX: int = 63
"""Annotation code announcing auxiliary bytes."""
ANN_STRUCTURAL_CODES: tuple[int, ...] = (59, 60, 61, 62, 63)
"""Codes that carry stream structure rather than a label."""

SECONDS_PER_MINUTE: int = 60

# Preprocessing
DEFAULT_LOW_HZ: float = 0.5
DEFAULT_HIGH_HZ: float = 45.0
DEFAULT_TAPS: int = 401
MIN_TAPS: int = 31
DEFAULT_SPAN_MINUTES: int = 5
DEFAULT_MIN_BPM: float = 20.0
DEFAULT_MAX_BPM: float = 200.0

# Beat detection
DEFAULT_W1: int = 20
DEFAULT_W2: int = 5
HAMILTON_LOW_HZ: float = 8.0
HAMILTON_HIGH_HZ: float = 16.0
HAMILTON_TH_COEFF: float = 0.45
HAMILTON_HISTORY: int = 8
HAMILTON_REFRACTORY_S: float = 0.2
HAMILTON_ENVELOPE_S: float = 0.08
HAMILTON_SEARCHBACK_RR: float = 1.5
HAMILTON_SEARCHBACK_TH: float = 0.5
HAMILTON_SNAP_S: float = 0.04

# Features
DEFAULT_LENGTH: int = 900
DEFAULT_SUBSEQ_LEN: int = 55
CHANNEL_ORDER: tuple[str, ...] = ("min", "max", "mean")
"""Fixed channel order in every feature tensor."""

# Training
DEFAULT_EPOCHS: int = 100
DEFAULT_BATCH_SIZE: int = 128
DEFAULT_LR: float = 0.001
DEFAULT_VAL_FRACTION: float = 0.30
LR_HOLD_EPOCHS: int = 70
LR_DECAY_EVERY: int = 10
LR_DECAY_FACTOR: float = 0.9

# Evaluation
AHI_APNEA_THRESHOLD: float = 5.0
"""Recordings at or above this AHI are diagnosed as apnea."""

# Artifact magic words
FEATURE_MAGIC: bytes = b"MPF1"
MODEL_MAGIC: bytes = b"MPNN"
MODEL_VERSION: int = 1
RECORD_ID_BYTES: int = 8
