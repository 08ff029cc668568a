#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""Testing distance profile features, the feature file and the corpus pipeline."""

from pathlib import Path

import numpy as np
import pytest

from mpcnn.config import PipelineConfig
from mpcnn.mp_excepts import FeatureFileError, TooFewSubsequences
from mpcnn.mp_features.feature_file import decode_features, encode_features, provenance_config
from mpcnn.mp_features.pipeline import (
    REJECT_FEW_SUBSEQUENCES,
    REJECT_HEART_RATE,
    REJECT_SHORT_SIGNAL,
    preprocess_corpus,
    process_record,
)
from mpcnn.mp_features.profile import (
    build_subsequences,
    cubic_spline_resample,
    distance_profile,
    extract_features,
    minmax_normalize,
    reduce_profiles,
    subsequence_anchors,
)
from mpcnn.mp_signal import ecg_io
from mpcnn.mp_signal.synthetic import SynthConfig, generate
from mpcnn.mp_types import (
    AnalysisWindow,
    BeatIndices,
    Channel,
    DistanceMatrix,
    EcgRecord,
    FeatureSet,
    Fiducial,
    Label,
    WindowConfig,
)
from tests.test_utils import brute_force_distances, brute_force_reduce, natural_spline_oracle, relative_error


def test_build_subsequences_drops_overruns() -> None:
    """Anchors are sorted and those running past the end dropped."""
    samples = np.arange(100, dtype=np.float64)
    sub = build_subsequences(samples, np.array([60, 10, 95, -1, 40]), 10)
    assert sub.start_indices.tolist() == [10, 40, 60]
    assert sub.k == 3
    assert np.array_equal(sub.rows[1], np.arange(40, 50))
    with pytest.raises(TooFewSubsequences):
        build_subsequences(samples, np.array([10, 95]), 10)
    with pytest.raises(ValueError):
        build_subsequences(samples, np.array([10, 20]), 1)


def test_distance_matrix_against_loops() -> None:
    """Pairwise distances agree with a double loop; symmetric with zero diagonal."""
    rng = np.random.default_rng(1)
    samples = rng.normal(size=600)
    sub = build_subsequences(samples, np.arange(0, 540, 37), 25)
    dmat = distance_profile(sub)
    assert np.allclose(dmat.d, brute_force_distances(sub.rows), atol=1e-10)
    assert np.array_equal(dmat.d, dmat.d.T)
    assert np.all(np.diag(dmat.d) == 0.0)


def test_profiles_random_small_instances() -> None:
    """Two hundred random k <= 12, m <= 8 cases match the loop oracle."""
    rng = np.random.default_rng(11)
    for _ in range(200):
        k = int(rng.integers(2, 13))
        m = int(rng.integers(2, 9))
        samples = rng.normal(size=k * m + int(rng.integers(0, 20)))
        anchors = rng.choice(len(samples) - m + 1, size=k, replace=False)
        sub = build_subsequences(samples, anchors, m)
        dmat = distance_profile(sub)
        assert relative_error(dmat.d, brute_force_distances(sub.rows)) < 1e-12
        assert np.array_equal(dmat.d, dmat.d.T)
        assert np.all(np.diag(dmat.d) == 0.0)
        reduced = reduce_profiles(dmat)
        for fast, slow in zip(reduced, brute_force_reduce(dmat.d)):
            assert relative_error(fast, slow) < 1e-12
        assert np.all(reduced[0] <= reduced[2]) and np.all(reduced[2] <= reduced[1])


def test_distances_ignore_constant_offset() -> None:
    """Adding one constant to every sample leaves D unchanged."""
    rng = np.random.default_rng(12)
    samples = rng.normal(size=800)
    anchors = np.arange(0, 760, 33)
    base = distance_profile(build_subsequences(samples, anchors, 30)).d
    for offset in (7.5, -120.0):
        shifted = distance_profile(build_subsequences(samples + offset, anchors, 30)).d
        assert relative_error(shifted, base) < 1e-12


def test_two_identical_subsequences() -> None:
    """Two equal rows give an all zero matrix and zero reductions."""
    samples = np.tile(np.sin(np.arange(10)), 2)
    dmat = distance_profile(build_subsequences(samples, np.array([0, 10]), 10))
    assert np.array_equal(dmat.d, np.zeros((2, 2)))
    assert all(np.array_equal(vec, np.zeros(2)) for vec in reduce_profiles(dmat))


def test_reduce_profiles_exclude_diagonal() -> None:
    """Column reductions skip D[j, j]."""
    dmat = DistanceMatrix(np.array([[0.0, 1.0, 4.0], [1.0, 0.0, 2.0], [4.0, 2.0, 0.0]]))
    mins, maxs, means = reduce_profiles(dmat)
    assert mins.tolist() == [1.0, 1.0, 2.0]
    assert maxs.tolist() == [4.0, 2.0, 4.0]
    assert np.allclose(means, [2.5, 1.5, 3.0])
    rng = np.random.default_rng(2)
    rows = rng.normal(size=(9, 12))
    random_d = DistanceMatrix(brute_force_distances(rows))
    for fast, slow in zip(reduce_profiles(random_d), brute_force_reduce(random_d.d)):
        assert np.allclose(fast, slow)


def test_minmax_normalize() -> None:
    """Range maps to [0, 1]; constant vectors give zeros."""
    assert np.allclose(minmax_normalize(np.array([2.0, 4.0, 3.0])), [0.0, 1.0, 0.5])
    assert np.array_equal(minmax_normalize(np.full(4, 7.0)), np.zeros(4))
    with pytest.raises(ValueError):
        minmax_normalize(np.array([]))


def test_spline_matches_tridiagonal_oracle() -> None:
    """Natural spline values agree with an independent solve."""
    rng = np.random.default_rng(3)
    values = rng.random(17)
    out = cubic_spline_resample(values, 900)
    assert out.shape == (900,)
    assert np.allclose(out, natural_spline_oracle(values, np.linspace(0.0, 1.0, 900)), atol=1e-9)
    assert out[0] == pytest.approx(values[0])
    assert out[-1] == pytest.approx(values[-1])


def test_spline_short_inputs() -> None:
    """Two knots interpolate linearly; output shorter than k subsamples."""
    assert np.allclose(cubic_spline_resample(np.array([0.0, 1.0]), 5), [0.0, 0.25, 0.5, 0.75, 1.0])
    values = np.linspace(0.0, 1.0, 50) ** 2
    short = cubic_spline_resample(values, 10)
    assert short.shape == (10,)
    assert short[0] == pytest.approx(0.0)
    assert short[-1] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        cubic_spline_resample(np.array([1.0]), 10)


def test_subsequence_anchors() -> None:
    """P anchors use P peaks; Q anchors shift R back by q_offset."""
    beats = BeatIndices(np.array([3, 50, 150]), np.array([34, 134]))
    assert subsequence_anchors(beats, WindowConfig(Fiducial.P, 55, 5)).tolist() == [34, 134]
    assert subsequence_anchors(beats, WindowConfig(Fiducial.Q, 40, 5)).tolist() == [45, 145]


def test_extract_features_shape_and_order() -> None:
    """Tensor is L x C in min, max, mean order with values in [0, 1]."""
    record, beats, _ = generate(SynthConfig(duration_minutes=5, noise_snr_db=15.0, seed=4))
    window = AnalysisWindow(record.record_id, 2, record.samples, Label.A, record.sampling_rate)
    wcfg = WindowConfig(Fiducial.P, 55, 5)
    full = extract_features(window, beats, wcfg, Channel.MIN | Channel.MAX | Channel.MEAN, 900)
    assert full.tensor.shape == (900, 3)
    assert full.channel_names == ["min", "max", "mean"]
    assert full.label is Label.A
    assert full.tensor.min() >= 0.0
    assert full.tensor.max() <= 1.0
    subset = extract_features(window, beats, wcfg, Channel.MEAN | Channel.MIN, 900)
    assert subset.channel_names == ["min", "mean"]
    assert np.array_equal(subset.tensor, full.tensor[:, [0, 2]])
    only_max = extract_features(window, beats, wcfg, Channel.MAX, 120)
    assert only_max.tensor.shape == (120, 1)


def test_extract_features_ignores_anchor_order() -> None:
    """Shuffled P peaks give the same tensor as sorted ones."""
    record, beats, _ = generate(SynthConfig(duration_minutes=5, noise_snr_db=15.0, seed=6))
    window = AnalysisWindow(record.record_id, 2, record.samples, Label.N, record.sampling_rate)
    wcfg = WindowConfig(Fiducial.P, 55, 5)
    expected = extract_features(window, beats, wcfg, length=300)
    rng = np.random.default_rng(13)
    for _ in range(3):
        shuffled = BeatIndices(beats.r_peaks, rng.permutation(beats.p_peaks))
        assert np.array_equal(extract_features(window, shuffled, wcfg, length=300).tensor, expected.tensor)


def test_reductions_follow_row_permutation() -> None:
    """Reordering subsequences reorders the profiles the same way."""
    rng = np.random.default_rng(14)
    rows = rng.normal(size=(9, 6))
    order = rng.permutation(9)
    base = reduce_profiles(DistanceMatrix(brute_force_distances(rows)))
    permuted = reduce_profiles(DistanceMatrix(brute_force_distances(rows[order])))
    for before, after in zip(base, permuted):
        assert np.allclose(after, before[order], rtol=1e-12, atol=0.0)


def test_feature_file_layout() -> None:
    """Header fields, channel major values and the provenance trailer."""
    x = np.arange(2 * 4 * 2, dtype=np.float32).reshape(2, 4, 2) / 16.0
    fset = FeatureSet(x, np.array([1, 0]), ["a01", "b0002"], np.array([7, 12]), Channel.MIN | Channel.MEAN)
    data = encode_features(fset, '{"seed":0}')
    assert data[:4] == b"MPF1"
    assert int.from_bytes(data[4:8], "little") == 4
    assert data[8] == 2
    assert data[9] == 5
    assert int.from_bytes(data[10:14], "little") == 2
    first_values = np.frombuffer(data[14 + 8 + 4 + 1 : 14 + 8 + 4 + 1 + 32], dtype="<f4")
    assert np.array_equal(first_values, x[0].T.reshape(-1))
    back, provenance = decode_features(data)
    assert np.array_equal(back.x, x)
    assert back.y.tolist() == [1, 0]
    assert back.record_ids == ["a01", "b0002"]
    assert back.center_minutes.tolist() == [7, 12]
    assert back.channels == Channel.MIN | Channel.MEAN
    assert provenance_config(provenance) == {"seed": 0}


def test_feature_file_errors() -> None:
    """Bad magic, mask mismatch, bad labels or ids and truncation are reported."""
    fset = FeatureSet(np.zeros((1, 3, 1), dtype=np.float32), np.array([0]), ["a01"], np.array([2]), Channel.MAX)
    data = encode_features(fset)
    with pytest.raises(FeatureFileError):
        decode_features(b"XXXX" + data[4:])
    with pytest.raises(FeatureFileError):
        decode_features(data[:9] + bytes([3]) + data[10:])
    with pytest.raises(FeatureFileError):
        decode_features(data[:20])
    without_trailer, provenance = decode_features(data[: len(data) - 4])
    assert len(without_trailer) == 1
    assert provenance == ""
    long_id = FeatureSet(fset.x, fset.y, ["toolongid"], fset.center_minutes, Channel.MAX)
    with pytest.raises(FeatureFileError):
        encode_features(long_id)
    wide_id = FeatureSet(fset.x, fset.y, ["\u00e401"], fset.center_minutes, Channel.MAX)
    with pytest.raises(FeatureFileError):
        encode_features(wide_id)
    # Header is 14 bytes; the label follows the 8 byte id and the u32 minute
    with pytest.raises(FeatureFileError):
        decode_features(data[:26] + bytes([2]) + data[27:])
    with pytest.raises(FeatureFileError):
        decode_features(data[:14] + bytes([0xFF]) + data[15:])


def test_process_record_rejections(fast_config: PipelineConfig) -> None:
    """Implausible rates and unfilterable records are rejected with reasons."""
    flat = EcgRecord("f01", np.zeros(7 * 6000), 100.0, (Label.N,) * 7)
    result = process_record(flat, fast_config)
    assert result.segments == []
    assert result.window_count == 3
    assert result.rejection_counts == {REJECT_HEART_RATE: 3}
    tiny = EcgRecord("t01", np.zeros(1000), 100.0, (Label.N,))
    result = process_record(tiny, fast_config)
    assert result.rejection_counts == {REJECT_SHORT_SIGNAL: 1}
    assert result.rejections[0].center_minute == -1


def test_process_record_long_subsequences(fast_config: PipelineConfig) -> None:
    """Subsequences longer than the window leave no features."""
    record, _, _ = generate(SynthConfig(duration_minutes=5, noise_snr_db=20.0, seed=2))
    result = process_record(record, fast_config, WindowConfig(Fiducial.P, 40000, 5))
    assert result.rejection_counts == {REJECT_FEW_SUBSEQUENCES: 1}


def test_preprocess_corpus_counts(corpus_dir: Path, fast_config: PipelineConfig) -> None:
    """Every window of the synthetic corpus becomes a segment, in record order."""
    corpus = preprocess_corpus(corpus_dir, fast_config)
    assert corpus.records == ["s01", "s02", "s03", "s04"]
    assert corpus.window_count == 32
    recount = sum(
        len(process_record(ecg_io.load_record(corpus_dir, rid), fast_config).segments) for rid in corpus.records
    )
    assert len(corpus.segments) == recount
    assert len(corpus.segments) + len(corpus.rejections) == 32
    fset = FeatureSet.from_segments(corpus.segments)
    assert fset.x.shape[1:] == (300, 3)
    assert fset.center_minutes.min() >= 2
    assert fset.center_minutes.max() <= 9


def test_preprocess_corpus_threads_agree(corpus_dir: Path, fast_config: PipelineConfig) -> None:
    """Worker processes give the same segments as a single process."""
    single = FeatureSet.from_segments(preprocess_corpus(corpus_dir, fast_config).segments)
    fast_config.threads = 2
    pooled = FeatureSet.from_segments(preprocess_corpus(corpus_dir, fast_config).segments)
    assert np.array_equal(single.x, pooled.x)
    assert single.record_ids == pooled.record_ids
