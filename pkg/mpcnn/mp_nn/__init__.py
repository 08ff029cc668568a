#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""Numpy 1D convolutional classifier."""

from mpcnn.mp_nn.layers import (
    Conv1D,
    BatchNorm1D,
    MaxPool1D,
    GlobalMaxPool1D,
    Dropout,
    Dense,
    softmax,
    softmax_cross_entropy,
)
from mpcnn.mp_nn.model import SequentialNet, build_lenet, predict, shape_chain, LENET_SHAPE_CHAIN
from mpcnn.mp_nn.optim import Adam, AdamMoments, adam_step, lr_schedule
from mpcnn.mp_nn.trainer import EpochStats, TrainResult, train, stratified_split
from mpcnn.mp_nn.model_file import save_model, load_model, encode_model, decode_model, summarize
