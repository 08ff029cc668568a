#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""Fixtures for testing."""

from pathlib import Path

import pytest

from mpcnn.config import PipelineConfig
from tests.test_utils import write_labeled_corpus

# Minutes 2..9 of each pattern get full 5 minute context: 14 A and 18 N windows
CORPUS_PATTERNS: tuple[str, ...] = (
    "NNNAAAANNNAA",
    "AANNNNAAAANN",
    "NNNNNNAAANNN",
    "AAAAANNNNNAA",
)


@pytest.fixture(scope="package")
def corpus_dir(tmp_path_factory: pytest.TempPathFactory) -> Path:
    """Four labeled synthetic records of 12 minutes."""
    out_dir = tmp_path_factory.mktemp("corpus")
    write_labeled_corpus(out_dir, CORPUS_PATTERNS)
    return out_dir


@pytest.fixture
def fast_config() -> PipelineConfig:
    """Defaults with short segments and few epochs."""
    cfg = PipelineConfig()
    cfg.update({"features.length": 300, "train.epochs": 2, "train.batch_size": 16})
    return cfg.validate()
