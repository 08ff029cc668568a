#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""Feature subset and window size studies."""

import dataclasses
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from mpcnn.config import PipelineConfig
from mpcnn.mp_eval.metrics import ConfusionCounts, segment_metrics
from mpcnn.mp_eval.recording import recording_metrics, reports_from_predictions
from mpcnn.mp_excepts import BadConfig, EmptyInput
from mpcnn.mp_features.pipeline import Profiled, collect_features, profile_corpus
from mpcnn.mp_nn.model import SequentialNet, predict
from mpcnn.mp_nn.trainer import stratified_split, train
from mpcnn.mp_types import Channel, FeatureSet, WindowConfig

logger = logging.getLogger("mpcnn.ablation")
if not logging.getLogger().handlers:
    logger.addHandler(logging.NullHandler())
    logger.propagate = False

STUDIES: tuple[str, ...] = ("features", "window")

FEATURE_SUBSETS: tuple[tuple[str, Channel], ...] = (
    ("M1", Channel.MIN),
    ("M2", Channel.MAX),
    ("M3", Channel.MEAN),
    ("M4", Channel.MIN | Channel.MAX),
    ("M5", Channel.MAX | Channel.MEAN),
    ("M6", Channel.MIN | Channel.MEAN),
    ("M7", Channel.MIN | Channel.MAX | Channel.MEAN),
)


@dataclass(frozen=True)
class Condition:
    """One study row: a window and a channel subset."""

    name: str
    wcfg: WindowConfig
    channels: Channel


@dataclass
class RunScores:
    """Scores of one training run."""

    acc: Optional[float]
    sens: Optional[float]
    spec: Optional[float]
    rec_acc: Optional[float] = None
    rec_sens: Optional[float] = None
    rec_spec: Optional[float] = None
    rec_auc: Optional[float] = None
    pearson: Optional[float] = None


@dataclass
class AblationRow:
    """All runs of one condition."""

    condition: Condition
    segments: int
    runs: list[RunScores] = field(default_factory=list)

    def stat(self, name: str) -> tuple[Optional[float], Optional[float]]:
        """Mean and sample standard deviation of a score over runs, 0 spread for one run."""
        values = np.array([v for v in (getattr(run, name) for run in self.runs) if v is not None], dtype=np.float64)
        if values.size == 0:
            return None, None
        spread = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
        return float(np.mean(values)), spread


def mean_std(mean: Optional[float], std: Optional[float], scale: float = 100.0) -> str:
    """`91.76±0.13` style cell, `n/a` when undefined."""
    if mean is None or std is None:
        return "n/a"
    return f"{mean * scale:.2f}±{std * scale:.2f}"


RATE_COLUMNS: tuple[str, ...] = ("acc", "sens", "spec", "rec_acc", "rec_sens", "rec_spec")
RATIO_COLUMNS: tuple[str, ...] = ("rec_auc", "pearson")


def ratio_cell(mean: Optional[float], std: Optional[float]) -> str:
    """`0.912±0.013` style cell for AUC and correlation."""
    if mean is None or std is None:
        return "n/a"
    return f"{mean:.3f}±{std:.3f}"


def study_conditions(study: str, cfg: PipelineConfig) -> list[Condition]:
    """study_conditions lists the rows of a study in table order.

    :param study: `features` for M1..M7 or `window` for T1..T4
    :type study: str
    :param cfg: Settings naming the fixed window or channel subset
    :type cfg: PipelineConfig
    :raises BadConfig: Unknown study or preset
    :return: Conditions
    :rtype: list[Condition]
    """
    presets = cfg.ablate.window_presets(cfg.features.q_offset)
    match study:
        case "features":
            if cfg.ablate.features_window not in presets:
                raise BadConfig(f"ablate.features_window must be one of {sorted(presets)}")
            wcfg = presets[cfg.ablate.features_window]
            return [Condition(name, wcfg, channels) for name, channels in FEATURE_SUBSETS]
        case "window":
            channels = Channel.from_names(cfg.ablate.window_channels.split(","))
            return [Condition(name, wcfg, channels) for name, wcfg in presets.items()]
        case _:
            raise BadConfig(f"Unknown study {study!r}, expected one of {STUDIES}")


def _feature_set(profiles: list[Profiled], cond: Condition, length: int, what: str) -> FeatureSet:
    corpus = collect_features(profiles, cond.wcfg, cond.channels, length)
    if not corpus.segments:
        raise EmptyInput(f"{cond.name}: no {what} segments")
    return FeatureSet.from_segments(corpus.segments)


def _score(model: SequentialNet, test: FeatureSet) -> RunScores:
    """Segment rates, plus recording rates, AUC and AHI correlation for 2+ recordings."""
    y_pred = predict(model, test).argmax(axis=1)
    rates = segment_metrics(ConfusionCounts.from_labels(test.y, y_pred))
    scores = RunScores(rates.acc, rates.sens, rates.spec)
    if len(set(test.record_ids)) >= 2:
        rec = recording_metrics(reports_from_predictions(test.record_ids, test.y, y_pred))
        scores.rec_acc, scores.rec_sens, scores.rec_spec = rec.acc, rec.sens, rec.spec
        scores.rec_auc, scores.pearson = rec.auc, rec.pearson
    return scores


def run_study(
    study: str,
    data_dir: Union[str, Path],
    cfg: PipelineConfig,
    test_dir: Optional[Union[str, Path]] = None,
) -> list[AblationRow]:
    """run_study trains every condition cfg.ablate.repeats times.

    Run r uses seed cfg.train.seed + r. Without test_dir each run is scored on
    its own validation partition. Distance matrices are computed once per
    window and shared by all channel subsets. Conditions run sequentially.

    :param study: `features` or `window`
    :type study: str
    :param data_dir: Training records
    :type data_dir: Union[str, Path]
    :param cfg: Settings
    :type cfg: PipelineConfig
    :param test_dir: Withheld records, defaults to None
    :type test_dir: Optional[Union[str, Path]], optional
    :return: One row per condition in table order
    :rtype: list[AblationRow]
    """
    conditions = study_conditions(study, cfg)
    cache: dict[tuple, tuple[list[Profiled], Optional[list[Profiled]]]] = {}
    rows: list[AblationRow] = []
    for cond in conditions:
        key = (cond.wcfg.start_fiducial, cond.wcfg.m, cond.wcfg.q_offset)
        if key not in cache:
            cache[key] = (
                profile_corpus(data_dir, cfg, cond.wcfg),
                profile_corpus(test_dir, cfg, cond.wcfg) if test_dir else None,
            )
        train_profiles, test_profiles = cache[key]
        fset = _feature_set(train_profiles, cond, cfg.features.length, "training")
        test = _feature_set(test_profiles, cond, cfg.features.length, "test") if test_profiles else None
        row = AblationRow(cond, len(fset))
        for repeat in range(cfg.ablate.repeats):
            tcfg = dataclasses.replace(cfg.train, seed=cfg.train.seed + repeat)
            result = train(fset, tcfg)
            if test is None:
                _, val_idx = stratified_split(fset.y, tcfg.val_fraction, tcfg.seed)
                scores = _score(result.model, fset.subset(val_idx))
            else:
                scores = _score(result.model, test)
            row.runs.append(scores)
            logger.info(f"{cond.name} run {repeat + 1}/{cfg.ablate.repeats}: {scores}")
        rows.append(row)
    return rows


def format_table(rows: list[AblationRow], header: str = "") -> str:
    """Plain text results, `#` prefixed header lines first.

    Rates are percentages, AUC and correlation are ratios, all as mean±std.
    """
    lines = [f"# {line}" for line in header.splitlines()]
    columns = RATE_COLUMNS + RATIO_COLUMNS
    lines.append(
        f"{'cond':<5s} {'channels':<20s} {'start':<5s} {'m':>4s} {'segments':>8s} "
        + " ".join(f"{name:>13s}" for name in columns)
    )
    for row in rows:
        cond = row.condition
        cells = [mean_std(*row.stat(name)) for name in RATE_COLUMNS]
        cells.extend(ratio_cell(*row.stat(name)) for name in RATIO_COLUMNS)
        lines.append(
            f"{cond.name:<5s} {cond.channels.display:<20s} {cond.wcfg.start_fiducial.value:<5s} {cond.wcfg.m:>4d} "
            f"{row.segments:>8d} " + " ".join(f"{cell:>13s}" for cell in cells)
        )
    return "\n".join(lines) + "\n"
