#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""Record to feature segment pipeline: filter, windows, beats, features."""

import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from mpcnn.config import PipelineConfig
from mpcnn.mp_excepts import SignalTooShort, TooFewSubsequences
from mpcnn.mp_features.profile import build_subsequences, distance_profile, extract_features, subsequence_anchors
from mpcnn.mp_signal import ecg_io
from mpcnn.mp_signal.beat_detection import HamiltonParams, detect_beats
from mpcnn.mp_signal.preprocess import beat_rate_valid, design_fir_bandpass, extract_windows, filter_record
from mpcnn.mp_types import (
    AnalysisWindow,
    BeatIndices,
    Channel,
    DistanceMatrix,
    EcgRecord,
    FeatureSegment,
    Rejection,
    WindowConfig,
)

logger = logging.getLogger("mpcnn.pipeline")
if not logging.getLogger().handlers:
    logger.addHandler(logging.NullHandler())
    logger.propagate = False

REJECT_SHORT_SIGNAL = "signal_too_short"
REJECT_HEART_RATE = "heart_rate"
REJECT_FEW_SUBSEQUENCES = "too_few_subsequences"


@dataclass
class Prepared:
    """Windows of one record that passed the heart rate check."""

    record_id: str
    windows: list[tuple[AnalysisWindow, BeatIndices]] = field(default_factory=list)
    rejections: list[Rejection] = field(default_factory=list)
    window_count: int = 0


@dataclass
class Profiled:
    """Distance matrices of one record's admitted windows."""

    record_id: str
    profiles: list[tuple[AnalysisWindow, DistanceMatrix]] = field(default_factory=list)
    rejections: list[Rejection] = field(default_factory=list)
    window_count: int = 0


@dataclass
class CorpusFeatures:
    """Segments of a corpus in record then minute order."""

    segments: list[FeatureSegment] = field(default_factory=list)
    rejections: list[Rejection] = field(default_factory=list)
    window_count: int = 0
    records: list[str] = field(default_factory=list)

    @property
    def rejection_counts(self) -> dict[str, int]:
        """Rejected windows by reason."""
        return dict(sorted(Counter(rej.reason for rej in self.rejections).items()))


def prepare_windows(record: EcgRecord, cfg: PipelineConfig) -> Prepared:
    """prepare_windows filters a record, carves windows and detects beats.

    Windows with an implausible heart rate are rejected. A record too short to
    filter yields one rejection with minute -1.

    :param record: Raw record
    :type record: EcgRecord
    :param cfg: Pipeline settings
    :type cfg: PipelineConfig
    :return: Admitted windows with their beats, and the rejections
    :rtype: Prepared
    """
    result = Prepared(record.record_id)
    fir = design_fir_bandpass(cfg.filter.low_hz, cfg.filter.high_hz, cfg.filter.taps, record.sampling_rate)
    try:
        filtered = filter_record(record, fir)
    except SignalTooShort as exc:
        logger.warning(f"{record.record_id}: {exc}")
        result.rejections.append(Rejection(record.record_id, -1, REJECT_SHORT_SIGNAL, str(exc)))
        return result
    params = HamiltonParams(**cfg.rpeak.to_dict())
    windows = extract_windows(filtered, cfg.window.span_minutes)
    result.window_count = len(windows)
    for window in windows:
        beats = detect_beats(window, params, cfg.ppeak.w1, cfg.ppeak.w2)
        if not beat_rate_valid(beats.r_peaks, window.duration, cfg.reject.min_bpm, cfg.reject.max_bpm):
            rate = 60.0 * len(beats.r_peaks) / window.duration
            logger.debug(f"{record.record_id}:{window.center_minute} rejected at {rate:.1f} bpm")
            result.rejections.append(
                Rejection(record.record_id, window.center_minute, REJECT_HEART_RATE, f"{rate:.1f} bpm")
            )
            continue
        result.windows.append((window, beats))
    return result


def profile_windows(prepared: Prepared, wcfg: WindowConfig) -> Profiled:
    """Distance matrices for every admitted window, rejecting those with < 2 subsequences."""
    result = Profiled(prepared.record_id, rejections=list(prepared.rejections), window_count=prepared.window_count)
    for window, beats in prepared.windows:
        try:
            dmat = distance_profile(build_subsequences(window.samples, subsequence_anchors(beats, wcfg), wcfg.m))
        except TooFewSubsequences as exc:
            result.rejections.append(
                Rejection(window.record_id, window.center_minute, REJECT_FEW_SUBSEQUENCES, str(exc))
            )
            continue
        result.profiles.append((window, dmat))
    return result


def profiled_segments(profiled: Profiled, wcfg: WindowConfig, channels: Channel, length: int) -> list[FeatureSegment]:
    """Feature segments for a channel subset from precomputed distance matrices."""
    return [
        extract_features(window, BeatIndices(), wcfg, channels, length, dmat=dmat)
        for window, dmat in profiled.profiles
    ]


def process_record(
    record: EcgRecord,
    cfg: PipelineConfig,
    wcfg: Optional[WindowConfig] = None,
    channels: Optional[Channel] = None,
) -> CorpusFeatures:
    """process_record runs the whole pipeline on one record.

    :param record: Raw record
    :type record: EcgRecord
    :param cfg: Pipeline settings
    :type cfg: PipelineConfig
    :param wcfg: Subsequence window, defaults to the configured one
    :type wcfg: Optional[WindowConfig], optional
    :param channels: Channel subset, defaults to the configured one
    :type channels: Optional[Channel], optional
    :return: Segments and rejections of this record
    :rtype: CorpusFeatures
    """
    wcfg = wcfg or cfg.features.window_config
    channels = channels or cfg.features.channel_set
    profiled = profile_windows(prepare_windows(record, cfg), wcfg)
    segments = profiled_segments(profiled, wcfg, channels, cfg.features.length)
    logger.info(
        f"{record.record_id}: {len(segments)} segments from {profiled.window_count} windows, "
        f"{len(profiled.rejections)} rejected"
    )
    return CorpusFeatures(segments, profiled.rejections, profiled.window_count, [record.record_id])


def _load_and_profile(task: tuple[Path, str, PipelineConfig, WindowConfig]) -> Profiled:
    """Worker: read one record and profile its windows."""
    data_dir, record_id, cfg, wcfg = task
    record = ecg_io.load_record(data_dir, record_id, cfg.annotation.code_map)
    return profile_windows(prepare_windows(record, cfg), wcfg)


def profile_corpus(
    data_dir: Union[str, Path],
    cfg: PipelineConfig,
    wcfg: Optional[WindowConfig] = None,
) -> list[Profiled]:
    """profile_corpus profiles every record of a directory.

    Records run in cfg.threads worker processes; results keep record order.

    :param data_dir: Directory of `.hea` records
    :type data_dir: Union[str, Path]
    :param cfg: Pipeline settings
    :type cfg: PipelineConfig
    :param wcfg: Subsequence window, defaults to the configured one
    :type wcfg: Optional[WindowConfig], optional
    :raises NoRecords: No records in data_dir
    :return: One result per record
    :rtype: list[Profiled]
    """
    wcfg = wcfg or cfg.features.window_config
    tasks = [(Path(data_dir), rid, cfg, wcfg) for rid in ecg_io.list_records(data_dir)]
    if cfg.threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            return list(pool.map(_load_and_profile, tasks))
    return [_load_and_profile(task) for task in tasks]


def collect_features(profiles: list[Profiled], wcfg: WindowConfig, channels: Channel, length: int) -> CorpusFeatures:
    """Merge per record profiles into corpus segments for one channel subset."""
    corpus = CorpusFeatures()
    for profiled in profiles:
        corpus.segments.extend(profiled_segments(profiled, wcfg, channels, length))
        corpus.rejections.extend(profiled.rejections)
        corpus.window_count += profiled.window_count
        corpus.records.append(profiled.record_id)
    return corpus


def preprocess_corpus(
    data_dir: Union[str, Path],
    cfg: PipelineConfig,
    wcfg: Optional[WindowConfig] = None,
    channels: Optional[Channel] = None,
) -> CorpusFeatures:
    """Feature segments for every labeled window of every record in data_dir."""
    wcfg = wcfg or cfg.features.window_config
    channels = channels or cfg.features.channel_set
    corpus = collect_features(profile_corpus(data_dir, cfg, wcfg), wcfg, channels, cfg.features.length)
    logger.info(
        f"{len(corpus.records)} records: {len(corpus.segments)} segments from {corpus.window_count} windows, "
        f"rejected {corpus.rejection_counts}"
    )
    return corpus
