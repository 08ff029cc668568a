#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""Segment and recording level evaluation."""

from mpcnn.mp_eval.metrics import ConfusionCounts, SegmentMetrics, segment_metrics, roc_auc, roc_curve_points
from mpcnn.mp_eval.recording import (
    Diagnosis,
    RecordingReport,
    RecordingMetrics,
    compute_ahi,
    diagnosis_counts,
    pearson,
    recording_metrics,
    reports_from_predictions,
)
from mpcnn.mp_eval.report import EvaluationReport, evaluate
