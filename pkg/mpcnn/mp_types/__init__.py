#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""mpcnn types package."""

from mpcnn.mp_types.common_types import Label, LabelSource, Fiducial, Channel
from mpcnn.mp_types.records import (
    SignalSpec,
    RecordHeader,
    MinuteLabels,
    EcgRecord,
    AnalysisWindow,
    BeatIndices,
    Rejection,
)
from mpcnn.mp_types.features import (
    WindowConfig,
    SubsequenceMatrix,
    DistanceMatrix,
    FeatureSegment,
    FeatureSet,
)
