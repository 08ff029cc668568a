#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""Distance profile feature extraction and feature files."""

from mpcnn.mp_features.profile import (
    build_subsequences,
    distance_profile,
    reduce_profiles,
    minmax_normalize,
    cubic_spline_resample,
    subsequence_anchors,
    extract_features,
)
from mpcnn.mp_features.feature_file import read_features, write_features, encode_features, decode_features
