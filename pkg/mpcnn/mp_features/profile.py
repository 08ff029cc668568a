#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""Distance profile features.

Subsequences start at fiducial points of a window. Their pairwise Euclidean
distances (raw, not z-normalized) form the matrix D. The off diagonal column
minimum, maximum and mean of D are normalized to [0, 1] and resampled to a
fixed length with a natural cubic spline.
"""

from typing import Optional

import numpy as np
from scipy import interpolate
from scipy.spatial import distance

from mpcnn.mp_constants import DEFAULT_LENGTH
from mpcnn.mp_excepts import TooFewSubsequences
from mpcnn.mp_types import (
    AnalysisWindow,
    BeatIndices,
    Channel,
    DistanceMatrix,
    FeatureSegment,
    Fiducial,
    SubsequenceMatrix,
    WindowConfig,
)


def build_subsequences(samples: np.ndarray, anchors: np.ndarray, m: int) -> SubsequenceMatrix:
    """build_subsequences copies samples[s:s+m] for every anchor s.

    Anchors whose subsequence runs past the end are dropped.

    :param samples: Window samples
    :type samples: np.ndarray
    :param anchors: Start indices
    :type anchors: np.ndarray
    :param m: Subsequence length, at least 2
    :type m: int
    :raises TooFewSubsequences: Fewer than 2 subsequences fit
    :return: Rows ordered by anchor
    :rtype: SubsequenceMatrix
    """
    if m < 2:
        raise ValueError(f"Subsequence length must be >= 2, got {m}")
    values = np.asarray(samples, dtype=np.float64)
    starts = np.sort(np.asarray(anchors, dtype=np.int64))
    starts = starts[(starts >= 0) & (starts + m <= len(values))]
    if len(starts) < 2:
        raise TooFewSubsequences(len(starts))
    rows = np.lib.stride_tricks.sliding_window_view(values, m)[starts].copy()
    return SubsequenceMatrix(rows, starts, m)


def distance_profile(subsequences: SubsequenceMatrix) -> DistanceMatrix:
    """Pairwise Euclidean distances, upper triangle computed then mirrored."""
    if subsequences.k < 2:
        raise TooFewSubsequences(subsequences.k)
    condensed = distance.pdist(subsequences.rows, metric="euclidean")
    return DistanceMatrix(distance.squareform(condensed, checks=False))


def reduce_profiles(dmat: DistanceMatrix) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """reduce_profiles summarizes each column of D without its diagonal.

    :param dmat: Distance matrix, k >= 2
    :type dmat: DistanceMatrix
    :return: Column minimum, maximum and mean, each of length k
    :rtype: tuple[np.ndarray, np.ndarray, np.ndarray]
    """
    k = dmat.k
    if k < 2:
        raise TooFewSubsequences(k)
    off_diag = ~np.eye(k, dtype=bool)
    # Column j without row j, shape (k - 1, k)
    columns = dmat.d.T[off_diag].reshape(k, k - 1).T
    return columns.min(axis=0), columns.max(axis=0), columns.sum(axis=0) / (k - 1)


def minmax_normalize(values: np.ndarray) -> np.ndarray:
    """Scale to [0, 1]; constant input gives zeros."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("Cannot normalize an empty vector")
    low, high = arr.min(), arr.max()
    if high == low:
        return np.zeros_like(arr)
    return (arr - low) / (high - low)


def cubic_spline_resample(values: np.ndarray, length: int) -> np.ndarray:
    """cubic_spline_resample evaluates a natural cubic spline at length points.

    Knots sit at j / (k - 1) on [0, 1]. Two or three knots fall back to linear
    interpolation.

    :param values: k >= 2 knot values
    :type values: np.ndarray
    :param length: Output length; values below k subsample the spline
    :type length: int
    :return: Resampled values
    :rtype: np.ndarray
    """
    knots_y = np.asarray(values, dtype=np.float64)
    k = len(knots_y)
    if k < 2 or length < 1:
        raise ValueError(f"Need k >= 2 and length >= 1, got k={k} length={length}")
    knots_x = np.arange(k, dtype=np.float64) / (k - 1)
    grid = np.linspace(0.0, 1.0, length)
    if k <= 3:
        return np.interp(grid, knots_x, knots_y)
    return interpolate.CubicSpline(knots_x, knots_y, bc_type="natural")(grid)


def subsequence_anchors(beats: BeatIndices, wcfg: WindowConfig) -> np.ndarray:
    """P peaks, or R peaks shifted back by q_offset for Q anchored windows."""
    if wcfg.start_fiducial is Fiducial.P:
        return beats.p_peaks
    q_points = beats.r_peaks - wcfg.q_offset
    return q_points[q_points >= 0]


def extract_features(
    window: AnalysisWindow,
    beats: BeatIndices,
    wcfg: WindowConfig,
    channels: Channel = Channel.MIN | Channel.MAX | Channel.MEAN,
    length: int = DEFAULT_LENGTH,
    dmat: Optional[DistanceMatrix] = None,
) -> FeatureSegment:
    """extract_features turns one analysis window into an L x C tensor.

    Channels are stacked in the fixed order min, max, mean whatever subset is
    selected. Spline overshoot is clipped back into [0, 1].

    :param window: Filtered window
    :type window: AnalysisWindow
    :param beats: Beats detected on the same samples
    :type beats: BeatIndices
    :param wcfg: Subsequence anchoring and length
    :type wcfg: WindowConfig
    :param channels: Channels to keep, defaults to all three
    :type channels: Channel, optional
    :param length: Resampled length L, defaults to 900
    :type length: int, optional
    :param dmat: Precomputed distance matrix for the same window and config, defaults to None
    :type dmat: Optional[DistanceMatrix], optional
    :raises TooFewSubsequences: Fewer than 2 subsequences in the window
    :return: The feature segment
    :rtype: FeatureSegment
    """
    if dmat is None:
        dmat = distance_profile(build_subsequences(window.samples, subsequence_anchors(beats, wcfg), wcfg.m))
    reduced = dict(zip((Channel.MIN, Channel.MAX, Channel.MEAN), reduce_profiles(dmat)))
    columns = [
        np.clip(cubic_spline_resample(minmax_normalize(reduced[chan]), length), 0.0, 1.0)
        for chan in channels.ordered
    ]
    return FeatureSegment(np.stack(columns, axis=1), channels, window.label, window.record_id, window.center_minute)
