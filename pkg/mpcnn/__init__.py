#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-
"""mpcnn package."""
import sys
import logging
from mpcnn.version import __version__

logger = logging.getLogger("mpcnn")
if not logging.getLogger().handlers:
    logger.addHandler(logging.NullHandler())
    logger.propagate = False

logger.info("Initializing mpcnn")
if sys.version_info < (3, 10):
    raise EnvironmentError("Python 3.10 or above is required")

# Convenience imports

from mpcnn.mp_excepts import MpcnnException
from mpcnn.mp_types import (
    Label,
    Channel,
    RecordHeader,
    EcgRecord,
    MinuteLabels,
    AnalysisWindow,
    BeatIndices,
    FeatureSegment,
    WindowConfig,
)
from mpcnn.config import PipelineConfig
