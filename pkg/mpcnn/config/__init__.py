#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""mpcnn configuration package."""

from mpcnn.config.confgroup import TrainConfig
from mpcnn.config.confmodel import PipelineConfig
from mpcnn.config.pipeline_config import load_config, parse_key_values, read_config_file
