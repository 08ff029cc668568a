#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""Testing segment and recording metrics and the evaluation report."""

import numpy as np
import pytest

from mpcnn.mp_eval import (
    ConfusionCounts,
    Diagnosis,
    RecordingReport,
    compute_ahi,
    diagnosis_counts,
    evaluate,
    pearson,
    recording_metrics,
    reports_from_predictions,
    roc_auc,
    segment_metrics,
)
from mpcnn.mp_excepts import EmptyInput, NeedTwoRecordings
from mpcnn.mp_nn.model import build_lenet
from mpcnn.mp_types import Label
from tests.test_utils import separable_features, trapezoid_auc


def test_confusion_counts_and_rates() -> None:
    """Counts and rates with A as the positive class."""
    counts = ConfusionCounts.from_labels(np.array([1, 1, 0, 0, 1]), np.array([1, 0, 0, 1, 1]))
    assert (counts.tp, counts.tn, counts.fp, counts.fn) == (2, 1, 1, 1)
    rates = segment_metrics(counts)
    assert rates.acc == pytest.approx(0.6)
    assert rates.sens == pytest.approx(2 / 3)
    assert rates.spec == pytest.approx(0.5)
    assert rates.f1 == pytest.approx(4 / 6)
    table = counts.as_table().splitlines()
    assert table[1].split() == ["ref", "N", "1", "1"]
    assert table[2].split() == ["ref", "A", "1", "2"]


def test_undefined_rates_are_absent() -> None:
    """A missing class leaves its rate undefined."""
    rates = segment_metrics(ConfusionCounts.from_labels(np.zeros(4, dtype=int), np.array([0, 1, 0, 0])))
    assert rates.sens is None
    assert rates.spec == pytest.approx(0.75)
    assert segment_metrics(ConfusionCounts()).acc is None
    with pytest.raises(ValueError):
        ConfusionCounts(tp=-1)


def test_accuracy_weights_rates_by_prevalence() -> None:
    """acc is sens and spec weighted by the share of each reference class."""
    rng = np.random.default_rng(31)
    for _ in range(100):
        tp, tn, fp, fn = (int(val) for val in rng.integers(0, 50, size=4))
        if tp + fn == 0 or tn + fp == 0:
            continue
        rates = segment_metrics(ConfusionCounts(tp=tp, tn=tn, fp=fp, fn=fn))
        positives = (tp + fn) / (tp + tn + fp + fn)
        assert rates.acc == pytest.approx(positives * rates.sens + (1.0 - positives) * rates.spec, abs=1e-12)
        assert all(0.0 <= val <= 1.0 for val in (rates.acc, rates.sens, rates.spec))


def test_roc_auc_matches_trapezoid() -> None:
    """Rank statistic with ties equals the trapezoid area."""
    rng = np.random.default_rng(8)
    labels = rng.integers(0, 2, 200)
    scores = np.round(0.3 * labels + rng.random(200), 1)
    assert roc_auc(scores, labels) == pytest.approx(trapezoid_auc(scores, labels), abs=1e-12)
    assert roc_auc(np.array([0.1, 0.2, 0.8, 0.9]), np.array([0, 0, 1, 1])) == 1.0
    assert roc_auc(np.array([0.9, 0.8, 0.2, 0.1]), np.array([0, 0, 1, 1])) == 0.0
    assert roc_auc(np.array([0.5, 0.5]), np.array([0, 1])) == 0.5
    assert roc_auc(np.array([0.1, 0.2]), np.array([1, 1])) is None


def test_ahi_and_diagnosis() -> None:
    """AHI is 60 times the apnea share; 5 and above is apnea."""
    assert compute_ahi([Label.A, Label.N, Label.N, Label.N]) == 15.0
    assert compute_ahi([0, 1, 1, 0]) == 30.0
    assert compute_ahi(["A"] * 40 + ["N"] * 440) == 5.0
    rng = np.random.default_rng(32)
    for _ in range(20):
        minutes = list(rng.integers(0, 2, size=int(rng.integers(1, 500))))
        assert compute_ahi(minutes + minutes) == pytest.approx(compute_ahi(minutes), abs=1e-12)
    assert Diagnosis.from_ahi(5.0) is Diagnosis.APNEA
    assert Diagnosis.from_ahi(4.99) is Diagnosis.NORMAL
    with pytest.raises(EmptyInput):
        compute_ahi([])


def test_pearson() -> None:
    """Correlation needs two points and variation."""
    assert pearson(np.array([1.0, 2.0, 3.0]), np.array([2.0, 4.0, 6.0])) == pytest.approx(1.0)
    assert pearson(np.array([1.0, 2.0, 3.0]), np.array([3.0, 2.0, 1.0])) == pytest.approx(-1.0)
    assert pearson(np.array([1.0, 1.0]), np.array([1.0, 2.0])) is None
    with pytest.raises(NeedTwoRecordings) as exc:
        pearson(np.array([1.0]), np.array([1.0]))
    assert exc.value.found == 1


def test_reports_from_predictions() -> None:
    """Minutes group by recording in first appearance order."""
    ids = ["b", "b", "a", "a", "a", "a"]
    y_true = np.array([1, 1, 0, 0, 0, 1])
    y_pred = np.array([1, 0, 0, 0, 0, 0])
    reports = reports_from_predictions(ids, y_true, y_pred)
    assert [rep.record_id for rep in reports] == ["b", "a"]
    assert reports[0] == RecordingReport("b", 30.0, 60.0, 2)
    assert reports[1] == RecordingReport("a", 0.0, 15.0, 4)
    assert reports[1].predicted_diagnosis is Diagnosis.NORMAL
    assert reports[1].reference_diagnosis is Diagnosis.APNEA


def test_recording_metrics() -> None:
    """Diagnosis counts, rates and AHI agreement over recordings."""
    reports = [
        RecordingReport("r1", 20.0, 30.0, 60),
        RecordingReport("r2", 1.0, 2.0, 60),
        RecordingReport("r3", 8.0, 3.0, 60),
        RecordingReport("r4", 40.0, 45.0, 60),
    ]
    counts = diagnosis_counts(reports)
    assert (counts.tp, counts.tn, counts.fp, counts.fn) == (2, 1, 1, 0)
    summary = recording_metrics(reports)
    assert summary.acc == pytest.approx(0.75)
    assert summary.sens == pytest.approx(1.0)
    assert summary.spec == pytest.approx(0.5)
    assert summary.auc == pytest.approx(1.0)
    assert summary.pearson > 0.9
    with pytest.raises(NeedTwoRecordings):
        recording_metrics(reports[:1])


def test_evaluate_report_text() -> None:
    """Report holds provenance, segment metrics and per recording blocks."""
    model = build_lenet(300, 3, seed=0)
    fset = separable_features(16, 300)
    report = evaluate(model, fset, per_recording=True, provenance={"model": "m.mpnn"})
    assert report.counts.total == 16
    assert [rep.record_id for rep in report.recordings] == ["r00", "r01", "r02", "r03"]
    assert report.recording_summary is not None
    assert report.roc_points[0][:2] == (0.0, 0.0)
    assert report.roc_points[-1][:2] == (1.0, 1.0)
    fprs = [point[0] for point in report.roc_points]
    assert fprs == sorted(fprs)
    text = report.as_text()
    assert "roc =\n" in text
    assert text.startswith("[provenance]\nmodel = m.mpnn\n")
    assert "[segments]\ncount = 16\n" in text
    assert "[recording r02]" in text
    assert "[recordings]\ncount = 4\n" in text
    assert text == evaluate(model, fset, per_recording=True, provenance={"model": "m.mpnn"}).as_text()


def test_evaluate_single_recording() -> None:
    """One recording still reports its AHI; the summary gives way to an error line."""
    model = build_lenet(300, 3, seed=0)
    fset = separable_features(8, 300)
    fset.record_ids = ["solo"] * 8
    report = evaluate(model, fset, per_recording=True)
    assert len(report.recordings) == 1
    assert report.recording_summary is None
    assert report.recording_error.startswith("NeedTwoRecordings")
    text = report.as_text()
    assert "[recording solo]" in text
    assert "error = NeedTwoRecordings" in text
    assert "acc = " in text
