#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""R peak (Hamilton style) and P peak detection."""

import logging
from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

import mpcnn.mp_constants as cnst
from mpcnn.mp_excepts import SignalTooShort
from mpcnn.mp_types import AnalysisWindow, BeatIndices

logger = logging.getLogger("mpcnn.beat_detection")
if not logging.getLogger().handlers:
    logger.addHandler(logging.NullHandler())
    logger.propagate = False


@dataclass(frozen=True)
class HamiltonParams:
    """Detector settings, see `rpeak.*` configuration keys."""

    low_hz: float = cnst.HAMILTON_LOW_HZ
    high_hz: float = cnst.HAMILTON_HIGH_HZ
    th_coeff: float = cnst.HAMILTON_TH_COEFF
    history: int = cnst.HAMILTON_HISTORY
    refractory_s: float = cnst.HAMILTON_REFRACTORY_S
    envelope_s: float = cnst.HAMILTON_ENVELOPE_S
    searchback_rr: float = cnst.HAMILTON_SEARCHBACK_RR
    searchback_th: float = cnst.HAMILTON_SEARCHBACK_TH
    snap_s: float = cnst.HAMILTON_SNAP_S


def qrs_envelope(signal: np.ndarray, fs: float, params: HamiltonParams = HamiltonParams()) -> np.ndarray:
    """qrs_envelope emphasizes QRS energy.

    Band-pass (zero phase Butterworth), absolute first difference, then a
    centered moving average.

    :param signal: Input samples
    :type signal: np.ndarray
    :param fs: Sampling rate in Hz
    :type fs: float
    :param params: Detector settings
    :type params: HamiltonParams
    :return: Envelope aligned with signal
    :rtype: np.ndarray
    """
    values = np.asarray(signal, dtype=np.float64)
    values = values - values.mean()
    high = min(params.high_hz, 0.45 * fs)
    sos = sps.butter(2, [params.low_hz, high], btype="bandpass", fs=fs, output="sos")
    band = sps.sosfiltfilt(sos, values)
    slope = np.abs(np.diff(band, prepend=band[0]))
    width = max(1, int(round(params.envelope_s * fs)))
    return np.convolve(slope, np.ones(width) / width, mode="same")


def _snap_to_maximum(signal: np.ndarray, positions: list[int], radius: int, refractory: int) -> np.ndarray:
    """Move each detection to the signal maximum within radius, keep spacing."""
    snapped: list[int] = []
    for pos in positions:
        lo, hi = max(0, pos - radius), min(len(signal), pos + radius + 1)
        peak = lo + int(np.argmax(signal[lo:hi]))
        if snapped and peak - snapped[-1] < refractory:
            if signal[peak] > signal[snapped[-1]]:
                snapped[-1] = peak
            continue
        snapped.append(peak)
    return np.array(snapped, dtype=np.int64)


def detect_r_peaks(signal: np.ndarray, fs: float, params: HamiltonParams = HamiltonParams()) -> np.ndarray:
    """detect_r_peaks finds QRS complexes.

    Thresholds adapt to running means of the last `history` QRS and noise
    peak heights. When no beat follows within searchback_rr mean RR intervals,
    the largest skipped candidate above searchback_th of the threshold is taken.

    :param signal: Input samples
    :type signal: np.ndarray
    :param fs: Sampling rate in Hz
    :type fs: float
    :param params: Detector settings, defaults to HamiltonParams()
    :type params: HamiltonParams, optional
    :raises SignalTooShort: Less than 2 seconds of samples
    :return: Sorted R peak sample indices
    :rtype: np.ndarray
    """
    if fs <= 0:
        raise ValueError(f"Invalid sampling rate {fs}")
    values = np.asarray(signal, dtype=np.float64)
    if len(values) < 2 * fs:
        raise SignalTooShort(f"R peak detection needs 2 s of signal, got {len(values) / fs:.2f} s")
    envelope = qrs_envelope(values, fs, params)
    if not np.any(envelope > 0):
        return np.zeros(0, dtype=np.int64)
    refractory = max(1, int(round(params.refractory_s * fs)))
    candidates, _ = sps.find_peaks(envelope, distance=refractory)
    if candidates.size == 0:
        return np.zeros(0, dtype=np.int64)

    # Seed QRS history from per second maxima of the first seconds
    second = int(round(fs))
    seed_count = min(params.history, len(values) // second)
    qrs_hist: deque = deque(
        (float(envelope[i * second : (i + 1) * second].max()) for i in range(seed_count)),
        maxlen=params.history,
    )
    noise_hist: deque = deque([0.0], maxlen=params.history)
    rr_hist: deque = deque([float(second)], maxlen=params.history)

    def threshold() -> float:
        noise = float(np.mean(noise_hist))
        return noise + params.th_coeff * (float(np.mean(qrs_hist)) - noise)

    detections: list[int] = []
    skipped: list[int] = []

    def accept(pos: int) -> None:
        if detections:
            rr_hist.append(float(pos - detections[-1]))
        detections.append(pos)
        qrs_hist.append(float(envelope[pos]))

    for cand in candidates:
        cand = int(cand)
        if detections and cand - detections[-1] > params.searchback_rr * float(np.mean(rr_hist)):
            floor = params.searchback_th * threshold()
            pool = [pos for pos in skipped if pos - detections[-1] >= refractory and cand - pos >= refractory]
            pool = [pos for pos in pool if envelope[pos] > floor]
            if pool:
                best = max(pool, key=lambda pos: envelope[pos])
                logger.debug(f"Search back recovered beat at {best}")
                accept(best)
                skipped = [pos for pos in skipped if pos > best]
        if envelope[cand] > threshold() and (not detections or cand - detections[-1] >= refractory):
            accept(cand)
            skipped = []
        else:
            noise_hist.append(float(envelope[cand]))
            skipped.append(cand)

    radius = max(1, int(round(params.snap_s * fs)))
    return _snap_to_maximum(values, detections, radius, refractory)


def find_p_peaks(
    signal: np.ndarray,
    r_peaks: np.ndarray,
    w1: int = cnst.DEFAULT_W1,
    w2: int = cnst.DEFAULT_W2,
) -> np.ndarray:
    """find_p_peaks takes the maximum of [r - w1, r - w2) before each R peak.

    Window bounds are clipped at 0 and R peaks with an empty window add nothing.
    Ties go to the lowest index.

    :param signal: Samples the R peaks index into
    :type signal: np.ndarray
    :param r_peaks: Sorted R peak indices
    :type r_peaks: np.ndarray
    :param w1: Window start offset, defaults to 20
    :type w1: int, optional
    :param w2: Window end offset (exclusive), defaults to 5
    :type w2: int, optional
    :return: Sorted P peak indices
    :rtype: np.ndarray
    """
    if not w1 > w2 >= 0:
        raise ValueError(f"Need w1 > w2 >= 0, got w1={w1} w2={w2}")
    values = np.asarray(signal)
    p_index: list[int] = []
    for r_peak in np.asarray(r_peaks, dtype=np.int64):
        d1 = max(0, int(r_peak) - w1)
        d2 = max(0, int(r_peak) - w2)
        if d1 < d2:
            p_index.append(int(np.argmax(values[d1:d2])) + d1)
    return np.array(p_index, dtype=np.int64)


def detect_beats(
    window: AnalysisWindow,
    params: HamiltonParams = HamiltonParams(),
    w1: int = cnst.DEFAULT_W1,
    w2: int = cnst.DEFAULT_W2,
) -> BeatIndices:
    """R and P peaks of one analysis window."""
    r_peaks = detect_r_peaks(window.samples, window.fs, params)
    return BeatIndices(r_peaks, find_p_peaks(window.samples, r_peaks, w1, w2))
