#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""Evaluation of a model on a feature set and the text report."""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from mpcnn.mp_eval.metrics import ConfusionCounts, SegmentMetrics, roc_auc, roc_curve_points, segment_metrics
from mpcnn.mp_eval.recording import RecordingMetrics, RecordingReport, recording_metrics, reports_from_predictions
from mpcnn.mp_excepts import NeedTwoRecordings
from mpcnn.mp_nn.model import SequentialNet, predict
from mpcnn.mp_types import FeatureSet

logger = logging.getLogger("mpcnn.report")
if not logging.getLogger().handlers:
    logger.addHandler(logging.NullHandler())
    logger.propagate = False


def _fmt(value: Optional[float]) -> str:
    """Metric value or `absent`."""
    return "absent" if value is None else f"{value:.6f}"


@dataclass
class EvaluationReport:
    """Everything an evaluation run reports.

    :ivar provenance: key, value pairs echoed at the top (config, version, inputs)
    :ivar counts: Per segment confusion counts
    :ivar metrics: Per segment rates
    :ivar auc: Per segment ROC AUC over P(A)
    :ivar roc_points: Empirical ROC as (fpr, tpr, threshold) rows
    :ivar recordings: Per recording AHI reports, empty without per recording evaluation
    :ivar recording_summary: Rates over recordings when two or more exist
    :ivar recording_error: Why the summary is missing
    """

    provenance: dict[str, str] = field(default_factory=dict)
    counts: ConfusionCounts = field(default_factory=ConfusionCounts)
    metrics: Optional[SegmentMetrics] = None
    auc: Optional[float] = None
    roc_points: list[tuple[float, float, float]] = field(default_factory=list)
    recordings: list[RecordingReport] = field(default_factory=list)
    recording_summary: Optional[RecordingMetrics] = None
    recording_error: Optional[str] = None

    def as_text(self) -> str:
        """Key = value blocks; confusion matrices as 2 x 2 tables."""
        lines = ["[provenance]"]
        lines.extend(f"{key} = {value}" for key, value in self.provenance.items())
        lines.append("")
        lines.append("[segments]")
        lines.append(f"count = {self.counts.total}")
        if self.metrics:
            lines.extend(f"{key} = {_fmt(val)}" for key, val in self.metrics.to_dict().items())
        lines.append(f"auc = {_fmt(self.auc)}")
        lines.append("confusion =")
        lines.extend(f"  {row}" for row in self.counts.as_table().splitlines())
        if self.roc_points:
            lines.append("roc =")
            lines.append(f"  {'fpr':>8s} {'tpr':>8s} {'threshold':>10s}")
            lines.extend(f"  {fpr:8.4f} {tpr:8.4f} {thr:10.6f}" for fpr, tpr, thr in self.roc_points)
        for rep in self.recordings:
            lines.append("")
            lines.append(f"[recording {rep.record_id}]")
            lines.append(f"minutes = {rep.minutes}")
            lines.append(f"predicted_ahi = {rep.predicted_ahi:.4f}")
            lines.append(f"reference_ahi = {rep.reference_ahi:.4f}")
            lines.append(f"predicted_diagnosis = {rep.predicted_diagnosis.value}")
            lines.append(f"reference_diagnosis = {rep.reference_diagnosis.value}")
        if self.recordings:
            lines.append("")
            lines.append("[recordings]")
            lines.append(f"count = {len(self.recordings)}")
            if self.recording_summary:
                summary = self.recording_summary
                for key in ("acc", "sens", "spec", "auc", "pearson"):
                    lines.append(f"{key} = {_fmt(getattr(summary, key))}")
                lines.append("confusion =")
                lines.extend(f"  {row}" for row in summary.counts.as_table().splitlines())
            if self.recording_error:
                lines.append(f"error = {self.recording_error}")
        return "\n".join(lines) + "\n"


def evaluate(
    model: SequentialNet,
    features: FeatureSet,
    per_recording: bool = False,
    provenance: Optional[dict[str, str]] = None,
    batch_size: int = 128,
) -> EvaluationReport:
    """evaluate scores a model on labeled segments.

    With per_recording, segments are grouped by record id into AHI reports.
    A single recording still gets its AHI report; the recording summary is then
    replaced by the NeedTwoRecordings message.

    :param model: Trained network
    :type model: SequentialNet
    :param features: Labeled segments
    :type features: FeatureSet
    :param per_recording: Add AHI based recording metrics, defaults to False
    :type per_recording: bool, optional
    :param provenance: Header pairs for the report, defaults to None
    :type provenance: Optional[dict[str, str]], optional
    :param batch_size: Inference batch size, defaults to 128
    :type batch_size: int, optional
    :return: The report
    :rtype: EvaluationReport
    """
    probs = predict(model, features, batch_size)
    y_pred = probs.argmax(axis=1)
    counts = ConfusionCounts.from_labels(features.y, y_pred)
    report = EvaluationReport(provenance=dict(provenance or {}), counts=counts, metrics=segment_metrics(counts))
    if len(features):
        report.auc = roc_auc(probs[:, 1], features.y)
        if report.auc is not None:
            fpr, tpr, thresholds = roc_curve_points(probs[:, 1], features.y)
            report.roc_points = [(float(a), float(b), float(c)) for a, b, c in zip(fpr, tpr, thresholds)]
    if per_recording and len(features):
        report.recordings = reports_from_predictions(features.record_ids, features.y, y_pred)
        try:
            report.recording_summary = recording_metrics(report.recordings)
        except NeedTwoRecordings as exc:
            logger.warning(str(exc))
            report.recording_error = f"{type(exc).__name__}: {exc}"
    logger.info(f"Evaluated {counts.total} segments: {report.metrics}")
    return report
