#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""Deterministic synthetic single lead ECG with known fiducials."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from mpcnn.mp_constants import SECONDS_PER_MINUTE
from mpcnn.mp_excepts import BadConfig
from mpcnn.mp_signal import ecg_io
from mpcnn.mp_types import BeatIndices, EcgRecord, Label, LabelSource, MinuteLabels, RecordHeader, SignalSpec

logger = logging.getLogger("mpcnn.synthetic")
if not logging.getLogger().handlers:
    logger.addHandler(logging.NullHandler())
    logger.propagate = False

# (offset from R in seconds, amplitude in mV, width in seconds)
_LOBES: tuple[tuple[float, float, float], ...] = (
    (-0.16, 0.15, 0.02),  # P
    (-0.03, -0.10, 0.01),  # Q
    (0.00, 1.00, 0.01),  # R
    (0.03, -0.20, 0.01),  # S
    (0.30, 0.30, 0.04),  # T
)
_P_OFFSET_S = -0.16
_WANDER_HZ = 0.15


@dataclass(frozen=True)
class SynthConfig:
    """Synthetic record settings.

    :ivar duration_minutes: Record length
    :ivar base_bpm: Heart rate of N minutes, 30 to 180
    :ivar modulation_bpm: Amplitude of the cyclic rate change in A minutes
    :ivar modulation_period_s: Period of that change
    :ivar noise_snr_db: White noise level, None for a clean signal
    :ivar seed: Generator seed
    :ivar fs: Sampling rate
    :ivar apnea_fraction: Chance of an A minute when labels are drawn
    :ivar labels: Explicit per minute labels, overrides apnea_fraction
    :ivar wander_mv: Amplitude of a slow baseline wander
    :ivar record_id: Name of the generated record
    """

    duration_minutes: int = 5
    base_bpm: float = 60.0
    modulation_bpm: float = 12.0
    modulation_period_s: float = 30.0
    noise_snr_db: Optional[float] = None
    seed: int = 0
    fs: float = 100.0
    apnea_fraction: float = 0.0
    labels: Optional[tuple[Label, ...]] = None
    wander_mv: float = 0.0
    record_id: str = "s01"

    def validate(self) -> "SynthConfig":
        """Raise BadConfig on invalid settings."""
        if self.duration_minutes < 1:
            raise BadConfig(f"duration_minutes must be >= 1, got {self.duration_minutes}")
        if not 30.0 <= self.base_bpm <= 180.0:
            raise BadConfig(f"base_bpm must be in [30, 180], got {self.base_bpm}")
        if not 0.0 <= self.modulation_bpm < self.base_bpm:
            raise BadConfig(f"modulation_bpm must be in [0, base_bpm), got {self.modulation_bpm}")
        if self.modulation_period_s <= 0:
            raise BadConfig("modulation_period_s must be positive")
        if self.fs <= 0:
            raise BadConfig(f"fs must be positive, got {self.fs}")
        if not 0.0 <= self.apnea_fraction <= 1.0:
            raise BadConfig(f"apnea_fraction must be in [0, 1], got {self.apnea_fraction}")
        if self.labels is not None and len(self.labels) != self.duration_minutes:
            raise BadConfig(f"{len(self.labels)} labels given for {self.duration_minutes} minutes")
        if len(self.record_id) > 8 or not self.record_id or " " in self.record_id:
            raise BadConfig(f"record_id {self.record_id!r} must be 1 to 8 characters without spaces")
        return self


def _draw_labels(cfg: SynthConfig, rng: np.random.Generator) -> tuple[Label, ...]:
    """Explicit labels, or one Bernoulli draw per minute."""
    if cfg.labels is not None:
        return tuple(Label(lbl) for lbl in cfg.labels)
    draws = rng.random(cfg.duration_minutes)
    return tuple(Label.A if draw < cfg.apnea_fraction else Label.N for draw in draws)


def _r_positions(cfg: SynthConfig, labels: tuple[Label, ...], num_samples: int) -> np.ndarray:
    """R peak sample positions; A minutes get a sinusoidal heart rate."""
    spm = int(round(SECONDS_PER_MINUTE * cfg.fs))

    def bpm_at(t_sec: float) -> float:
        minute = min(int(t_sec * cfg.fs) // spm, len(labels) - 1)
        if labels[minute] is Label.A:
            return cfg.base_bpm + cfg.modulation_bpm * np.sin(2.0 * np.pi * t_sec / cfg.modulation_period_s)
        return cfg.base_bpm

    positions: list[int] = []
    t_sec = 0.5 * SECONDS_PER_MINUTE / bpm_at(0.0)
    while (pos := int(round(t_sec * cfg.fs))) < num_samples:
        positions.append(pos)
        t_sec += SECONDS_PER_MINUTE / bpm_at(t_sec)
    return np.array(positions, dtype=np.int64)


def render_beats(r_peaks: np.ndarray, num_samples: int, fs: float) -> np.ndarray:
    """render_beats sums the P, Q, R, S and T Gaussian lobes of every beat.

    :param r_peaks: R peak positions
    :type r_peaks: np.ndarray
    :param num_samples: Output length
    :type num_samples: int
    :param fs: Sampling rate
    :type fs: float
    :return: Noiseless waveform in mV
    :rtype: np.ndarray
    """
    wave = np.zeros(num_samples, dtype=np.float64)
    for offset, amp, width in _LOBES:
        reach = int(np.ceil(5 * width * fs))
        rel = np.arange(-reach, reach + 1)
        for r_peak in r_peaks:
            center = r_peak + offset * fs
            idx = np.round(center).astype(np.int64) + rel
            idx = idx[(idx >= 0) & (idx < num_samples)]
            wave[idx] += amp * np.exp(-0.5 * ((idx - center) / (width * fs)) ** 2)
    return wave


def generate(cfg: SynthConfig) -> tuple[EcgRecord, BeatIndices, MinuteLabels]:
    """generate builds one synthetic record.

    The same config (seed included) always yields bit identical output.

    :param cfg: Generator settings
    :type cfg: SynthConfig
    :raises BadConfig: Invalid settings
    :return: The record, its true R and P peaks, and its labels
    :rtype: tuple[EcgRecord, BeatIndices, MinuteLabels]
    """
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    labels = _draw_labels(cfg, rng)
    num_samples = cfg.duration_minutes * int(round(SECONDS_PER_MINUTE * cfg.fs))
    r_peaks = _r_positions(cfg, labels, num_samples)
    wave = render_beats(r_peaks, num_samples, cfg.fs)
    if cfg.wander_mv:
        wave += cfg.wander_mv * np.sin(2.0 * np.pi * _WANDER_HZ * np.arange(num_samples) / cfg.fs)
    if cfg.noise_snr_db is not None:
        power = float(np.mean(wave**2))
        wave += rng.normal(0.0, np.sqrt(power / 10.0 ** (cfg.noise_snr_db / 10.0)), num_samples)
    p_peaks = r_peaks + int(round(_P_OFFSET_S * cfg.fs))
    minute_labels = MinuteLabels(labels, LabelSource.SYNTHETIC)
    logger.debug(f"{cfg.record_id}: {len(r_peaks)} beats, {labels.count(Label.A)} apnea minutes")
    return (
        EcgRecord(cfg.record_id, wave, cfg.fs, labels),
        BeatIndices(r_peaks, p_peaks[p_peaks >= 0]),
        minute_labels,
    )


def write_record(record: EcgRecord, out_dir: Union[str, Path], gain: float = 200.0) -> None:
    """Write header, format 16 samples and text labels for record."""
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    header = RecordHeader(
        record.record_id,
        1,
        record.sampling_rate,
        len(record.samples),
        (SignalSpec(f"{record.record_id}.dat", 16, gain, 0, "ECG"),),
    )
    ecg_io.write_header(header, root / f"{record.record_id}.hea")
    ecg_io.write_samples(record.samples, header, root / f"{record.record_id}.dat")
    ecg_io.write_text_labels(
        MinuteLabels(record.minute_labels, LabelSource.SYNTHETIC), root / f"{record.record_id}.apn.txt"
    )


def write_corpus(out_dir: Union[str, Path], records: int, base: SynthConfig) -> list[str]:
    """write_corpus writes records synthetic records named s01, s02, ...

    Record i uses seed base.seed + i and an apnea fraction drawn from the base
    seed, so corpora hold a mix of mostly normal and mostly apnea recordings.

    :param out_dir: Output directory
    :type out_dir: Union[str, Path]
    :param records: Record count
    :type records: int
    :param base: Settings shared by all records
    :type base: SynthConfig
    :return: Written record ids
    :rtype: list[str]
    """
    if records < 1:
        raise BadConfig(f"records must be >= 1, got {records}")
    fractions = np.random.default_rng(base.seed).uniform(0.0, 2.0 * base.apnea_fraction, records).clip(0.0, 1.0)
    written: list[str] = []
    for index in range(records):
        cfg = SynthConfig(
            duration_minutes=base.duration_minutes,
            base_bpm=base.base_bpm,
            modulation_bpm=base.modulation_bpm,
            modulation_period_s=base.modulation_period_s,
            noise_snr_db=base.noise_snr_db,
            seed=base.seed + index + 1,
            fs=base.fs,
            apnea_fraction=float(fractions[index]),
            wander_mv=base.wander_mv,
            record_id=f"s{index + 1:02d}",
        )
        record, _, _ = generate(cfg)
        write_record(record, out_dir)
        written.append(cfg.record_id)
    logger.info(f"Wrote {records} synthetic records to {out_dir}")
    return written
