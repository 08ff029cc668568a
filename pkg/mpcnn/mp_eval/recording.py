#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""Per recording AHI, diagnosis and correlation."""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import dataclasses_json
import numpy as np
from scipy import stats

from mpcnn.mp_constants import AHI_APNEA_THRESHOLD, SECONDS_PER_MINUTE
from mpcnn.mp_eval.metrics import ConfusionCounts, roc_auc, segment_metrics
from mpcnn.mp_excepts import EmptyInput, NeedTwoRecordings
from mpcnn.mp_types import Label


class Diagnosis(str, Enum):
    """Recording level outcome."""

    NORMAL = "normal"
    APNEA = "apnea"

    @classmethod
    def from_ahi(cls, ahi: float) -> "Diagnosis":
        """Apnea at or above the AHI threshold."""
        return cls.APNEA if ahi >= AHI_APNEA_THRESHOLD else cls.NORMAL


def compute_ahi(minutes: Sequence) -> float:
    """compute_ahi is apnea minutes per hour: 60 * A minutes / all minutes.

    :param minutes: Per minute labels, Label values or 0/1
    :type minutes: Sequence
    :raises EmptyInput: No minutes
    :return: Events per hour, 0 to 60
    :rtype: float
    """
    if len(minutes) == 0:
        raise EmptyInput("AHI needs at least one minute")
    apnea = sum(1 for lbl in minutes if (lbl == Label.A.value if isinstance(lbl, str) else int(lbl) == 1))
    return SECONDS_PER_MINUTE * apnea / len(minutes)


@dataclass(frozen=True)
class RecordingReport(dataclasses_json.DataClassJsonMixin):
    """Predicted and reference AHI of one recording over the same retained minutes."""

    record_id: str
    predicted_ahi: float
    reference_ahi: float
    minutes: int = 0

    @property
    def predicted_diagnosis(self) -> Diagnosis:
        """From predicted_ahi."""
        return Diagnosis.from_ahi(self.predicted_ahi)

    @property
    def reference_diagnosis(self) -> Diagnosis:
        """From reference_ahi."""
        return Diagnosis.from_ahi(self.reference_ahi)


@dataclass(frozen=True)
class RecordingMetrics(dataclasses_json.DataClassJsonMixin):
    """Diagnosis rates over recordings plus AHI agreement."""

    acc: Optional[float]
    sens: Optional[float]
    spec: Optional[float]
    auc: Optional[float]
    pearson: Optional[float]
    counts: ConfusionCounts


def pearson(x: np.ndarray, y: np.ndarray) -> Optional[float]:
    """Pearson r, None when either vector is constant."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(x) < 2:
        raise NeedTwoRecordings(len(x))
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        return None
    return float(stats.pearsonr(x, y)[0])


def reports_from_predictions(
    record_ids: Sequence[str], y_true: np.ndarray, y_pred: np.ndarray
) -> list[RecordingReport]:
    """reports_from_predictions groups retained minutes by recording.

    :param record_ids: Recording of each segment
    :type record_ids: Sequence[str]
    :param y_true: Reference labels, 0/1
    :type y_true: np.ndarray
    :param y_pred: Predicted labels, 0/1
    :type y_pred: np.ndarray
    :return: One report per recording in first appearance order
    :rtype: list[RecordingReport]
    """
    ids = np.asarray(record_ids)
    reports: list[RecordingReport] = []
    for rid in dict.fromkeys(record_ids):
        mask = ids == rid
        reports.append(
            RecordingReport(
                str(rid), compute_ahi(list(y_pred[mask])), compute_ahi(list(y_true[mask])), int(mask.sum())
            )
        )
    return reports


def diagnosis_counts(reports: Sequence[RecordingReport]) -> ConfusionCounts:
    """Confusion counts over recordings, positive is apnea."""
    ref = np.array([rep.reference_diagnosis is Diagnosis.APNEA for rep in reports], dtype=np.int64)
    pred = np.array([rep.predicted_diagnosis is Diagnosis.APNEA for rep in reports], dtype=np.int64)
    return ConfusionCounts.from_labels(ref, pred)


def recording_metrics(reports: Sequence[RecordingReport]) -> RecordingMetrics:
    """recording_metrics summarizes diagnoses and AHI agreement.

    AUC scores recordings by predicted AHI against the reference diagnosis.

    :param reports: Per recording reports
    :type reports: Sequence[RecordingReport]
    :raises NeedTwoRecordings: Fewer than two recordings
    :return: acc, sens, spec, auc and pearson r
    :rtype: RecordingMetrics
    """
    if len(reports) < 2:
        raise NeedTwoRecordings(len(reports))
    counts = diagnosis_counts(reports)
    rates = segment_metrics(counts)
    predicted = np.array([rep.predicted_ahi for rep in reports])
    reference = np.array([rep.reference_ahi for rep in reports])
    positives = np.array([rep.reference_diagnosis is Diagnosis.APNEA for rep in reports])
    return RecordingMetrics(
        acc=rates.acc,
        sens=rates.sens,
        spec=rates.spec,
        auc=roc_auc(predicted, positives),
        pearson=pearson(predicted, reference),
        counts=counts,
    )
