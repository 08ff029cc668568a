#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""Deterministic minibatch training."""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import dataclasses_json
import numpy as np
from sklearn.model_selection import train_test_split

from mpcnn.config import TrainConfig
from mpcnn.mp_excepts import BadConfig, EmptyClass
from mpcnn.mp_nn.layers import softmax_cross_entropy
from mpcnn.mp_nn.model import SequentialNet, build_lenet
from mpcnn.mp_nn.optim import Adam, lr_schedule
from mpcnn.mp_types import FeatureSet, Label

logger = logging.getLogger("mpcnn.trainer")
if not logging.getLogger().handlers:
    logger.addHandler(logging.NullHandler())
    logger.propagate = False

HISTORY_COLUMNS: tuple[str, ...] = ("epoch", "lr", "train_loss", "train_acc", "val_loss", "val_acc")


@dataclass
class EpochStats(dataclasses_json.DataClassJsonMixin):
    """One history row."""

    epoch: int
    lr: float
    train_loss: float
    train_acc: float
    val_loss: float
    val_acc: float

    def as_row(self) -> str:
        """Fixed width table row."""
        return (
            f"{self.epoch:>5d} {self.lr:>10.6g} {self.train_loss:>10.6f} {self.train_acc:>9.4f} "
            f"{self.val_loss:>10.6f} {self.val_acc:>9.4f}"
        )


@dataclass
class SplitInfo(dataclasses_json.DataClassJsonMixin):
    """Partition sizes and per class counts."""

    train_size: int
    val_size: int
    train_counts: dict[str, int] = field(default_factory=dict)
    val_counts: dict[str, int] = field(default_factory=dict)


@dataclass
class TrainResult:
    """Final and best checkpoint models with the epoch history."""

    model: SequentialNet
    best_model: SequentialNet
    best_epoch: int
    history: list[EpochStats]
    split: SplitInfo

    def history_table(self, header: str = "") -> str:
        """Plain text history, `#` prefixed header lines first."""
        lines = [f"# {line}" for line in header.splitlines()]
        lines.append(f"# split {self.split.to_json(sort_keys=True)}")
        lines.append(f"# best_epoch {self.best_epoch}")
        lines.append(
            f"{HISTORY_COLUMNS[0]:>5s} {HISTORY_COLUMNS[1]:>10s} {HISTORY_COLUMNS[2]:>10s} {HISTORY_COLUMNS[3]:>9s} "
            f"{HISTORY_COLUMNS[4]:>10s} {HISTORY_COLUMNS[5]:>9s}"
        )
        lines.extend(row.as_row() for row in self.history)
        return "\n".join(lines) + "\n"


def class_counts(y: np.ndarray) -> dict[str, int]:
    """Segments per label."""
    return {lbl.value: int(np.sum(y == lbl.as_int)) for lbl in (Label.N, Label.A)}


def stratified_split(y: np.ndarray, val_fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """stratified_split partitions indices keeping class proportions.

    :param y: Class labels
    :type y: np.ndarray
    :param val_fraction: Share of the validation part, 0 < f < 1
    :type val_fraction: float
    :param seed: Shuffle seed
    :type seed: int
    :raises EmptyClass: A class has fewer than 2 segments
    :raises BadConfig: A partition would miss a class
    :return: Sorted train and validation indices
    :rtype: tuple[np.ndarray, np.ndarray]
    """
    counts = class_counts(y)
    if min(counts.values()) < 2:
        raise EmptyClass(f"Training needs 2 or more segments of each class, got {counts}")
    try:
        train_idx, val_idx = train_test_split(
            np.arange(len(y)), test_size=val_fraction, stratify=y, random_state=seed, shuffle=True
        )
    except ValueError as exc:
        raise BadConfig(f"val_fraction {val_fraction} cannot split {len(y)} segments: {exc}") from exc
    return np.sort(train_idx), np.sort(val_idx)


def _batches(index: np.ndarray, batch_size: int) -> list[np.ndarray]:
    """Consecutive batches; a trailing single example joins the previous batch."""
    batches = [index[start : start + batch_size] for start in range(0, len(index), batch_size)]
    if len(batches) > 1 and len(batches[-1]) == 1:
        batches[-2] = np.concatenate(batches[-2:])
        batches.pop()
    return batches


def evaluate_loss(model: SequentialNet, x: np.ndarray, y: np.ndarray, batch_size: int) -> tuple[float, float]:
    """Inference mode mean loss and accuracy."""
    if len(y) == 0:
        return float("nan"), float("nan")
    total_loss = 0.0
    correct = 0
    for start in range(0, len(y), batch_size):
        logits = model.forward(x[start : start + batch_size])
        loss, _ = softmax_cross_entropy(logits, y[start : start + batch_size])
        total_loss += loss * len(logits)
        correct += int(np.sum(logits.argmax(axis=1) == y[start : start + batch_size]))
    return total_loss / len(y), correct / len(y)


def train(
    features: FeatureSet,
    cfg: TrainConfig,
    on_epoch: Optional[Callable[[EpochStats], None]] = None,
) -> TrainResult:
    """train fits the classifier on a stratified split of features.

    Everything random (weights, dropout, split and shuffling) derives from
    cfg.seed, so equal inputs give bit identical models. The best checkpoint is
    the earliest epoch with the highest validation accuracy.

    :param features: Labeled segments
    :type features: FeatureSet
    :param cfg: Hyper parameters
    :type cfg: TrainConfig
    :param on_epoch: Called with each history row, defaults to None
    :type on_epoch: Optional[Callable[[EpochStats], None]], optional
    :raises EmptyClass: A class has fewer than 2 segments
    :return: Final model, best checkpoint and history
    :rtype: TrainResult
    """
    train_idx, val_idx = stratified_split(features.y, cfg.val_fraction, cfg.seed)
    split = SplitInfo(
        len(train_idx), len(val_idx), class_counts(features.y[train_idx]), class_counts(features.y[val_idx])
    )
    logger.info(f"Split {split.train_size} train {split.train_counts} / {split.val_size} val {split.val_counts}")
    x = features.x
    y = features.y
    length, channels = x.shape[1], x.shape[2]
    model = build_lenet(length, channels, cfg.seed, cfg.dropout, cfg.bn_eps, cfg.bn_momentum)
    optimizer = Adam(cfg.beta1, cfg.beta2, cfg.adam_eps)
    shuffle_rng = np.random.default_rng(np.random.SeedSequence(cfg.seed).spawn(3)[2])
    history: list[EpochStats] = []
    best_model, best_epoch, best_acc = model.snapshot(), 0, -1.0
    for epoch in range(1, cfg.epochs + 1):
        lr = lr_schedule(epoch, cfg.lr0, cfg.lr_hold_epochs, cfg.lr_decay_every, cfg.lr_decay_factor)
        seen, loss_sum, correct = 0, 0.0, 0
        for batch in _batches(shuffle_rng.permutation(train_idx), cfg.batch_size):
            logits = model.forward(x[batch], training=True)
            loss, dlogits = softmax_cross_entropy(logits, y[batch])
            model.backward(dlogits)
            optimizer.step(model, lr)
            seen += len(batch)
            loss_sum += loss * len(batch)
            correct += int(np.sum(logits.argmax(axis=1) == y[batch]))
        val_loss, val_acc = evaluate_loss(model, x[val_idx], y[val_idx], cfg.batch_size)
        stats = EpochStats(epoch, lr, loss_sum / seen, correct / seen, val_loss, val_acc)
        history.append(stats)
        logger.info(
            f"epoch {epoch}/{cfg.epochs} lr {lr:.6g} loss {stats.train_loss:.4f} acc {stats.train_acc:.4f} "
            f"val_loss {val_loss:.4f} val_acc {val_acc:.4f}"
        )
        if val_acc > best_acc:
            best_model, best_epoch, best_acc = model.snapshot(), epoch, val_acc
        if on_epoch:
            on_epoch(stats)
    return TrainResult(model, best_model, best_epoch, history, split)
