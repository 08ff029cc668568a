#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""Per segment classification metrics and ROC analysis."""

from dataclasses import dataclass
from typing import Optional

import dataclasses_json
import numpy as np
import sklearn.metrics as skm
from deprecated.sphinx import versionadded
from scipy import stats


@dataclass(frozen=True)
class ConfusionCounts(dataclasses_json.DataClassJsonMixin):
    """Binary confusion counts, positive class A (apnea)."""

    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self) -> None:
        """Counts are non negative."""
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise ValueError(f"Negative confusion count in {self}")

    @property
    def total(self) -> int:
        """Evaluated items."""
        return self.tp + self.tn + self.fp + self.fn

    @classmethod
    def from_labels(cls, y_true: np.ndarray, y_pred: np.ndarray) -> "ConfusionCounts":
        """Count from 0/1 (N/A) reference and predicted labels."""
        matrix = skm.confusion_matrix(np.asarray(y_true), np.asarray(y_pred), labels=[0, 1])
        (tn, fp), (fn, tp) = matrix.tolist()
        return cls(tp=tp, tn=tn, fp=fp, fn=fn)

    def as_table(self) -> str:
        """2 x 2 integer table, rows reference and columns predicted."""
        width = max(6, len(str(max(self.tp, self.tn, self.fp, self.fn))))
        return (
            f"{'':>8s} {'pred N':>{width}s} {'pred A':>{width}s}\n"
            f"{'ref N':>8s} {self.tn:>{width}d} {self.fp:>{width}d}\n"
            f"{'ref A':>8s} {self.fn:>{width}d} {self.tp:>{width}d}\n"
        )


@dataclass(frozen=True)
class SegmentMetrics(dataclasses_json.DataClassJsonMixin):
    """Rates derived from confusion counts; None where the denominator is zero."""

    acc: Optional[float]
    sens: Optional[float]
    spec: Optional[float]
    f1: Optional[float]


def _ratio(num: int, den: int) -> Optional[float]:
    return num / den if den else None


def segment_metrics(counts: ConfusionCounts) -> SegmentMetrics:
    """segment_metrics computes accuracy, sensitivity, specificity and F1.

    :param counts: Confusion counts
    :type counts: ConfusionCounts
    :return: The rates, None when undefined
    :rtype: SegmentMetrics
    """
    return SegmentMetrics(
        acc=_ratio(counts.tp + counts.tn, counts.total),
        sens=_ratio(counts.tp, counts.tp + counts.fn),
        spec=_ratio(counts.tn, counts.tn + counts.fp),
        f1=_ratio(2 * counts.tp, 2 * counts.tp + counts.fp + counts.fn),
    )


def roc_auc(scores: np.ndarray, labels: np.ndarray) -> Optional[float]:
    """roc_auc is the Mann-Whitney statistic with midranks for ties.

    :param scores: Per item score for the positive class
    :type scores: np.ndarray
    :param labels: 1 for positive, 0 for negative
    :type labels: np.ndarray
    :return: AUC in [0, 1], None when a class is missing
    :rtype: Optional[float]
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels).astype(bool)
    if scores.shape != labels.shape:
        raise ValueError(f"scores {scores.shape} and labels {labels.shape} differ")
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        return None
    ranks = stats.rankdata(scores, method="average")
    return float((ranks[labels].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


@versionadded(version="0.1.0", reason="ROC curve points for reports")
def roc_curve_points(scores: np.ndarray, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """False positive rates, true positive rates and thresholds of the empirical ROC."""
    fpr, tpr, thresholds = skm.roc_curve(np.asarray(labels), np.asarray(scores, dtype=np.float64), pos_label=1)
    return fpr, tpr, thresholds
