#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""Band-pass filtering, window carving and heart rate rejection."""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from mpcnn.mp_constants import (
    DEFAULT_HIGH_HZ,
    DEFAULT_LOW_HZ,
    DEFAULT_MAX_BPM,
    DEFAULT_MIN_BPM,
    DEFAULT_SPAN_MINUTES,
    DEFAULT_TAPS,
    MIN_TAPS,
    SECONDS_PER_MINUTE,
)
from mpcnn.mp_excepts import BadBand, EvenTaps, SignalTooShort
from mpcnn.mp_types import AnalysisWindow, EcgRecord

logger = logging.getLogger("mpcnn.preprocess")
if not logging.getLogger().handlers:
    logger.addHandler(logging.NullHandler())
    logger.propagate = False


@dataclass(frozen=True)
class FirFilter:
    """Linear phase band-pass taps."""

    taps: np.ndarray
    low_cut: float
    high_cut: float
    fs: float
    design: str = "hamming_windowed_sinc"

    @property
    def num_taps(self) -> int:
        """Tap count (odd)."""
        return len(self.taps)

    def response(self, freqs_hz: np.ndarray) -> np.ndarray:
        """Single pass magnitude response at freqs_hz."""
        _, resp = sps.freqz(self.taps, worN=np.asarray(freqs_hz, dtype=np.float64), fs=self.fs)
        return np.abs(resp)


def design_fir_bandpass(
    low_cut: float = DEFAULT_LOW_HZ,
    high_cut: float = DEFAULT_HIGH_HZ,
    num_taps: int = DEFAULT_TAPS,
    fs: float = 100.0,
) -> FirFilter:
    """design_fir_bandpass builds a Hamming windowed sinc band-pass.

    The taps are the difference of two unit DC gain low-pass designs, so they sum
    to zero, then averaged with their reverse so symmetry is exact.

    :param low_cut: Lower edge in Hz
    :type low_cut: float
    :param high_cut: Upper edge in Hz
    :type high_cut: float
    :param num_taps: Odd tap count, at least 31
    :type num_taps: int
    :param fs: Sampling rate in Hz
    :type fs: float
    :raises BadBand: Unless 0 < low_cut < high_cut < fs/2
    :raises EvenTaps: num_taps even or below 31
    :return: The filter
    :rtype: FirFilter
    """
    if not 0.0 < low_cut < high_cut < fs / 2.0:
        raise BadBand(f"Need 0 < low ({low_cut}) < high ({high_cut}) < fs/2 ({fs / 2.0})")
    if num_taps % 2 == 0 or num_taps < MIN_TAPS:
        raise EvenTaps(f"num_taps must be odd and >= {MIN_TAPS}, got {num_taps}")
    upper = sps.firwin(num_taps, high_cut, window="hamming", pass_zero="lowpass", fs=fs)
    lower = sps.firwin(num_taps, low_cut, window="hamming", pass_zero="lowpass", fs=fs)
    taps = upper - lower
    taps = 0.5 * (taps + taps[::-1])
    taps.setflags(write=False)
    return FirFilter(taps, float(low_cut), float(high_cut), float(fs))


def filter_zero_phase(signal: np.ndarray, fir: FirFilter) -> np.ndarray:
    """filter_zero_phase applies the filter forward then backward.

    Edges are extended by reflection over num_taps samples.

    :param signal: Input samples
    :type signal: np.ndarray
    :param fir: Filter to apply
    :type fir: FirFilter
    :raises SignalTooShort: length <= 3 * num_taps
    :return: Filtered samples, same length
    :rtype: np.ndarray
    """
    values = np.asarray(signal, dtype=np.float64)
    if len(values) <= 3 * fir.num_taps:
        raise SignalTooShort(f"Signal of {len(values)} samples needs more than {3 * fir.num_taps}")
    return sps.filtfilt(fir.taps, [1.0], values, padtype="even", padlen=fir.num_taps)


def filter_record(record: EcgRecord, fir: FirFilter) -> EcgRecord:
    """Record with filtered samples and the same labels."""
    return EcgRecord(record.record_id, filter_zero_phase(record.samples, fir), record.sampling_rate, record.minute_labels)


def extract_windows(record: EcgRecord, span_minutes: int = DEFAULT_SPAN_MINUTES) -> list[AnalysisWindow]:
    """extract_windows carves one window per labeled minute with full context.

    Minute i gets samples of minutes i-h .. i+h, h = (span_minutes - 1) / 2.
    Minutes without full context are dropped.

    :param record: Filtered record
    :type record: EcgRecord
    :param span_minutes: Odd window span, defaults to 5
    :type span_minutes: int, optional
    :return: Windows in minute order, possibly empty
    :rtype: list[AnalysisWindow]
    """
    if span_minutes < 1 or span_minutes % 2 == 0:
        raise ValueError(f"span_minutes must be odd, got {span_minutes}")
    half = (span_minutes - 1) // 2
    spm = record.samples_per_minute
    total = len(record.samples)
    windows: list[AnalysisWindow] = []
    for minute, label in enumerate(record.minute_labels):
        if minute - half < 0 or (minute + half + 1) * spm > total:
            continue
        start = (minute - half) * spm
        windows.append(
            AnalysisWindow(
                record.record_id,
                minute,
                record.samples[start : start + span_minutes * spm],
                label,
                record.sampling_rate,
            )
        )
    logger.debug(f"{record.record_id}: {len(windows)} of {len(record.minute_labels)} minutes have full context")
    return windows


def heart_rate_bpm(r_peaks: np.ndarray, window_duration: float) -> float:
    """Mean rate over the window."""
    if window_duration <= 0:
        raise ValueError(f"window_duration must be positive, got {window_duration}")
    return SECONDS_PER_MINUTE * len(r_peaks) / window_duration


def beat_rate_valid(
    r_peaks: np.ndarray,
    window_duration: float,
    min_bpm: float = DEFAULT_MIN_BPM,
    max_bpm: float = DEFAULT_MAX_BPM,
) -> bool:
    """True when min_bpm <= 60 * peaks / duration <= max_bpm."""
    return min_bpm <= heart_rate_bpm(r_peaks, window_duration) <= max_bpm
