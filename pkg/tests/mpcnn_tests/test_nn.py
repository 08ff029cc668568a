#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""Testing layers, the classifier, the optimizer and training."""

import dataclasses
from pathlib import Path

import numpy as np
import pytest

from mpcnn.config import TrainConfig
from mpcnn.mp_excepts import BadConfig, BadRate, DegenerateBatch, EmptyClass, ModelFileError, NonFiniteTensor, ShapeMismatch
from mpcnn.mp_nn.layers import (
    BatchNorm1D,
    Conv1D,
    Dense,
    Dropout,
    GlobalMaxPool1D,
    MaxPool1D,
    softmax_cross_entropy,
)
from mpcnn.mp_nn.model import LENET_SHAPE_CHAIN, SequentialNet, build_lenet, predict, shape_chain
from mpcnn.mp_nn.model_file import decode_model, encode_model, load_model, save_model, summarize
from mpcnn.mp_nn.optim import Adam, AdamMoments, adam_step, lr_schedule
from mpcnn.mp_nn.trainer import _batches, stratified_split, train
from tests.test_utils import numeric_gradient, relative_error, separable_features

RNG_SEED = 1234
GRADIENT_SEEDS = range(20)


def _check_layer_gradients(layer, x: np.ndarray, rng: np.random.Generator, training: bool = False) -> None:
    """Input and parameter gradients of sum(out * weights) against finite differences."""
    weights = rng.normal(size=layer.forward(x, training).shape)

    def loss(_: np.ndarray) -> float:
        return float(np.sum(layer.forward(x, training) * weights))

    layer.forward(x, training)
    dx = layer.backward(weights)
    analytic = {key: grad.copy() for key, grad in layer.grads.items()}
    assert relative_error(dx, numeric_gradient(loss, x)) < 1e-4
    for key, param in layer.params.items():
        assert relative_error(analytic[key], numeric_gradient(loss, param)) < 1e-4


@pytest.mark.parametrize("seed", GRADIENT_SEEDS)
def test_conv1d_gradients(seed: int) -> None:
    """Strided convolution gradients match finite differences."""
    rng = np.random.default_rng(seed)
    layer = Conv1D("conv", 4, 3, 2, "none", dtype=np.float64)
    assert layer.build((11, 3), rng) == (5, 4)
    _check_layer_gradients(layer, rng.normal(size=(2, 11, 3)), rng)


@pytest.mark.parametrize("seed", GRADIENT_SEEDS)
def test_batchnorm_gradients(seed: int) -> None:
    """Training mode batch norm gradients match finite differences."""
    rng = np.random.default_rng(seed)
    layer = BatchNorm1D("bn", dtype=np.float64)
    layer.build((6, 3), rng)
    layer.params["gamma"] = rng.normal(size=3)
    layer.params["beta"] = rng.normal(size=3)
    _check_layer_gradients(layer, rng.normal(size=(4, 6, 3)), rng, training=True)


def test_batchnorm_modes() -> None:
    """Training normalizes per channel; inference uses running statistics."""
    rng = np.random.default_rng(RNG_SEED)
    layer = BatchNorm1D("bn", eps=1e-3, momentum=0.9, dtype=np.float64)
    layer.build((5, 2), rng)
    x = rng.normal(3.0, 2.0, size=(8, 5, 2))
    out = layer.forward(x, training=True)
    assert np.allclose(out.mean(axis=(0, 1)), 0.0, atol=1e-9)
    assert np.allclose(layer.buffers["running_mean"], 0.1 * x.mean(axis=(0, 1)))
    fresh = BatchNorm1D("bn2", dtype=np.float64)
    fresh.build((5, 2), rng)
    assert np.allclose(fresh.forward(x), x / np.sqrt(1.0 + 1e-3))
    with pytest.raises(DegenerateBatch):
        layer.forward(x[:1], training=True)


@pytest.mark.parametrize("seed", GRADIENT_SEEDS)
def test_pooling_gradients(seed: int) -> None:
    """Max pool and global max pool route gradients to the maxima."""
    rng = np.random.default_rng(seed)
    pool = MaxPool1D("pool", 3, 3, dtype=np.float64)
    assert pool.output_shape((10, 2)) == (3, 2)
    _check_layer_gradients(pool, rng.normal(size=(2, 10, 2)), rng)
    gpool = GlobalMaxPool1D("gpool", dtype=np.float64)
    _check_layer_gradients(gpool, rng.normal(size=(3, 7, 4)), rng)


def test_global_pool_tie_goes_first() -> None:
    """Equal maxima send the gradient to the first one."""
    gpool = GlobalMaxPool1D("gpool", dtype=np.float64)
    x = np.array([[[1.0], [5.0], [5.0], [0.0]]])
    gpool.forward(x)
    assert gpool.backward(np.array([[1.0]]))[0, :, 0].tolist() == [0.0, 1.0, 0.0, 0.0]


@pytest.mark.parametrize("seed", GRADIENT_SEEDS)
def test_dense_gradients(seed: int) -> None:
    """Dense gradients match finite differences."""
    rng = np.random.default_rng(seed)
    layer = Dense("fc", 5, "none", dtype=np.float64)
    layer.build((7,), rng)
    _check_layer_gradients(layer, rng.normal(size=(3, 7)), rng)


@pytest.mark.parametrize("seed", GRADIENT_SEEDS)
def test_softmax_cross_entropy_gradient(seed: int) -> None:
    """Logit gradient is (softmax - onehot) / batch."""
    rng = np.random.default_rng(seed)
    logits = rng.normal(size=(4, 2))
    labels = rng.integers(0, 2, size=4)
    loss, grad = softmax_cross_entropy(logits, labels)
    assert loss > 0.0
    numeric = numeric_gradient(lambda z: softmax_cross_entropy(z, labels)[0], logits)
    assert relative_error(grad, numeric) < 1e-6
    with pytest.raises(ShapeMismatch):
        softmax_cross_entropy(logits, labels[:3])


def test_dropout_masks() -> None:
    """Inverted dropout scales survivors; inference is the identity."""
    layer = Dropout("drop", 0.5, np.random.default_rng(3), dtype=np.float64)
    x = np.ones((4, 50))
    out = layer.forward(x, training=True)
    assert set(np.unique(out).tolist()) <= {0.0, 2.0}
    assert np.array_equal(layer.backward(np.ones_like(x)), out)
    assert np.array_equal(layer.forward(x, training=False), x)
    with pytest.raises(BadRate):
        Dropout("bad", 1.0)
    with pytest.raises(BadRate):
        Dropout("bad", -0.1)


def test_dropout_keeps_mean() -> None:
    """Over 10**5 units the training mean stays within 3 sigma of the input."""
    layer = Dropout("drop", 0.5, np.random.default_rng(21), dtype=np.float64)
    out = layer.forward(np.ones((1000, 100)), training=True)
    # Each unit is 0 or 2 with equal chance: unit variance
    assert abs(out.mean() - 1.0) <= 3.0 / np.sqrt(out.size)


def test_small_network_gradients() -> None:
    """End to end back propagation through a stack of every layer kind."""
    layers = [
        Conv1D("conv", 4, 3, 1, "none", dtype=np.float64),
        BatchNorm1D("bn", dtype=np.float64),
        MaxPool1D("pool", 2, 2, dtype=np.float64),
        GlobalMaxPool1D("gpool", dtype=np.float64),
        Dense("fc", 3, "none", dtype=np.float64),
        Dense("out", 2, "none", dtype=np.float64),
    ]
    model = SequentialNet(layers, (12, 2), seed=5)
    rng = np.random.default_rng(RNG_SEED)
    x = rng.normal(size=(3, 12, 2))
    y = np.array([0, 1, 1])

    def loss(_: np.ndarray) -> float:
        return softmax_cross_entropy(model.forward(x, training=True), y)[0]

    _, dlogits = softmax_cross_entropy(model.forward(x, training=True), y)
    dx = model.backward(dlogits)
    analytic = {name: layer.grads[key].copy() for name, layer, key in model.parameters()}
    assert relative_error(dx, numeric_gradient(loss, x)) < 1e-5
    for name, layer, key in model.parameters():
        assert relative_error(analytic[name], numeric_gradient(loss, layer.params[key])) < 1e-5


def test_lenet_shape_chain() -> None:
    """A 900 x 3 input gives the documented shapes and parameter count."""
    model = build_lenet(900, 3, seed=0)
    assert shape_chain(model) == LENET_SHAPE_CHAIN
    assert model.output_shape == (2,)
    assert model.param_count == 118882
    assert shape_chain(build_lenet(900, 1, seed=0)) == LENET_SHAPE_CHAIN
    with pytest.raises(ShapeMismatch):
        build_lenet(100, 3)


def test_lenet_seeded_init() -> None:
    """Same seed same weights, another seed other weights."""
    first, second, other = build_lenet(300, 2, seed=9), build_lenet(300, 2, seed=9), build_lenet(300, 2, seed=10)
    for (_, la, key), (_, lb, _), (_, lc, _) in zip(first.parameters(), second.parameters(), other.parameters()):
        assert np.array_equal(la.params[key], lb.params[key])
        if key == "w":
            assert not np.array_equal(la.params[key], lc.params[key])


def test_predict_probabilities() -> None:
    """Rows sum to one whatever the batch size; wrong shapes and NaN are refused."""
    model = build_lenet(300, 3, seed=1)
    fset = separable_features(9, 300)
    probs = predict(model, fset, batch_size=128)
    assert probs.shape == (9, 2)
    assert np.allclose(probs.sum(axis=1), 1.0)
    assert np.allclose(predict(model, fset, batch_size=1), probs, atol=1e-6)
    assert np.allclose(predict(model, fset.x, batch_size=4), probs, atol=1e-6)
    assert predict(model, fset.x[:0]).shape == (0, 2)
    with pytest.raises(ShapeMismatch):
        predict(model, np.zeros((2, 300, 2), dtype=np.float32))
    bad = fset.x[:2].copy()
    bad[1, 10, 0] = np.nan
    with pytest.raises(NonFiniteTensor):
        predict(model, bad)


def test_adam_step_by_hand() -> None:
    """Bias corrected first step moves by lr against the gradient sign."""
    param = np.array([1.0, -2.0])
    moments = AdamMoments.zeros_like(param)
    updated = adam_step(param, np.array([0.5, -4.0]), moments, 1, 0.1)
    assert np.allclose(updated, [0.9, -1.9], atol=1e-6)
    assert np.allclose(moments.m, [0.05, -0.4])
    assert np.allclose(moments.v, [0.00025, 0.016])
    again = adam_step(updated, np.array([0.5, -4.0]), moments, 2, 0.1)
    assert np.allclose(again, [0.8, -1.8], atol=1e-6)


def test_adam_scalar_problems() -> None:
    """Zero gradients change nothing; theta squared is driven to 0."""
    param = np.array([0.3, -1.5])
    assert np.array_equal(adam_step(param, np.zeros(2), AdamMoments.zeros_like(param), 1, 0.1), param)
    theta = np.array([1.0])
    moments = AdamMoments.zeros_like(theta)
    for step in range(1, 201):
        theta = adam_step(theta, 2.0 * theta, moments, step, 0.1)
    assert abs(theta[0]) < 0.05


def test_gradient_descent_lowers_loss() -> None:
    """Full batch descent with a small rate never raises the loss of a frozen batch."""
    model = SequentialNet(
        [Dense("fc", 6, "none", dtype=np.float64), Dense("out", 2, "none", dtype=np.float64)], (7,), seed=3
    )
    rng = np.random.default_rng(RNG_SEED)
    x = rng.normal(size=(16, 7))
    y = rng.integers(0, 2, size=16)
    losses = []
    for _ in range(50):
        loss, dlogits = softmax_cross_entropy(model.forward(x, training=True), y)
        losses.append(loss)
        model.backward(dlogits)
        for _, layer, key in model.parameters():
            layer.params[key] = layer.params[key] - 0.01 * layer.grads[key]
    assert all(later <= earlier + 1e-12 for earlier, later in zip(losses, losses[1:]))
    assert losses[-1] < losses[0]


def test_adam_over_model() -> None:
    """The optimizer keeps one moment pair per parameter array."""
    model = build_lenet(300, 1, seed=0, dropout=0.0)
    fset = separable_features(4, 300, channels=1)
    _, dlogits = softmax_cross_entropy(model.forward(fset.x, training=True), fset.y)
    model.backward(dlogits)
    before = model.layers[0].params["w"].copy()
    optimizer = Adam()
    optimizer.step(model, 1e-3)
    assert optimizer.t == 1
    assert len(optimizer.moments) == len(list(model.parameters()))
    assert model.layers[0].params["w"].dtype == np.float32
    assert not np.array_equal(before, model.layers[0].params["w"])


def test_lr_schedule() -> None:
    """Constant for 70 epochs, then times 0.9 every 10."""
    assert lr_schedule(1) == 0.001
    assert lr_schedule(70) == 0.001
    assert lr_schedule(71) == pytest.approx(0.0009)
    assert lr_schedule(80) == pytest.approx(0.0009)
    assert lr_schedule(81) == pytest.approx(0.00081)
    assert lr_schedule(100) == pytest.approx(0.001 * 0.9**3)
    with pytest.raises(ValueError):
        lr_schedule(0)


def test_batches_merge_singleton() -> None:
    """A trailing single example joins the previous batch."""
    assert [len(b) for b in _batches(np.arange(257), 128)] == [128, 129]
    assert [len(b) for b in _batches(np.arange(256), 128)] == [128, 128]
    assert [len(b) for b in _batches(np.arange(5), 128)] == [5]


def test_stratified_split_sizes() -> None:
    """16713 segments at 0.2 split 13370 / 3343 keeping class shares."""
    y = (np.arange(16713) % 5 == 0).astype(np.int64)
    train_idx, val_idx = stratified_split(y, 0.2, seed=0)
    assert (len(train_idx), len(val_idx)) == (13370, 3343)
    assert np.intersect1d(train_idx, val_idx).size == 0
    assert np.array_equal(np.sort(np.concatenate([train_idx, val_idx])), np.arange(16713))
    assert abs(y[val_idx].mean() - y.mean()) < 0.01
    again = stratified_split(y, 0.2, seed=0)
    assert np.array_equal(again[1], val_idx)
    with pytest.raises(EmptyClass):
        stratified_split(np.array([0, 0, 0, 1]), 0.3, 0)
    with pytest.raises(BadConfig):
        stratified_split(np.array([0, 1] * 5), 0.05, 0)


def test_train_deterministic() -> None:
    """Equal seeds give byte identical models and histories."""
    fset = separable_features(40, 300)
    cfg = TrainConfig(epochs=3, batch_size=16, seed=4)
    first, second = train(fset, cfg), train(fset, cfg)
    assert encode_model(first.model) == encode_model(second.model)
    assert [row.to_dict() for row in first.history] == [row.to_dict() for row in second.history]
    assert [row.epoch for row in first.history] == [1, 2, 3]
    assert first.split.train_size == 28
    assert first.split.val_size == 12
    assert 1 <= first.best_epoch <= 3
    best_val = max(row.val_acc for row in first.history)
    assert first.history[first.best_epoch - 1].val_acc == best_val
    assert all(row.val_acc < best_val for row in first.history[: first.best_epoch - 1])
    other = train(fset, dataclasses.replace(cfg, seed=5))
    assert encode_model(other.model) != encode_model(first.model)


def test_train_history_table() -> None:
    """History has a header, the split and one row per epoch."""
    seen: list[int] = []
    result = train(
        separable_features(20, 300), TrainConfig(epochs=2, batch_size=8), on_epoch=lambda s: seen.append(s.epoch)
    )
    assert seen == [1, 2]
    table = result.history_table("config line")
    lines = table.splitlines()
    assert lines[0] == "# config line"
    assert lines[1].startswith("# split ")
    assert lines[2] == f"# best_epoch {result.best_epoch}"
    assert lines[3].split() == ["epoch", "lr", "train_loss", "train_acc", "val_loss", "val_acc"]
    assert len(lines) == 6


def test_overfit_separable_segments() -> None:
    """32 separable segments are fit within 300 Adam steps."""
    fset = separable_features(32, 900)
    model = build_lenet(900, 3, seed=0, dropout=0.0)
    optimizer = Adam()
    best = 0.0
    for _ in range(300):
        logits = model.forward(fset.x, training=True)
        _, dlogits = softmax_cross_entropy(logits, fset.y)
        best = max(best, float(np.mean(logits.argmax(axis=1) == fset.y)))
        if best >= 0.95:
            break
        model.backward(dlogits)
        optimizer.step(model, 1e-3)
    assert best >= 0.95


def test_model_file_exact(tmp_path: Path) -> None:
    """Saved models load with identical arrays, predictions and provenance."""
    result = train(separable_features(20, 300), TrainConfig(epochs=1, batch_size=8))
    path = tmp_path / "m.mpnn"
    size = save_model(path, result.model, '{"seed":0}')
    assert size == path.stat().st_size
    loaded, provenance = load_model(path)
    assert provenance == '{"seed":0}'
    assert shape_chain(loaded) == shape_chain(result.model)
    for original, copy in zip(result.model.layers, loaded.layers):
        assert original.name == copy.name
        assert original.hyper() == copy.hyper()
        for key, arr in original.state.items():
            assert np.array_equal(arr, copy.state[key])
    fset = separable_features(6, 300, seed=3)
    assert np.array_equal(predict(result.model, fset), predict(loaded, fset))
    assert encode_model(loaded, provenance) == path.read_bytes()


def test_model_file_errors(tmp_path: Path) -> None:
    """Corrupt, truncated and missing model files are reported."""
    data = encode_model(build_lenet(300, 1, seed=0))
    with pytest.raises(ModelFileError):
        decode_model(b"NOPE" + data[4:])
    with pytest.raises(ModelFileError):
        decode_model(data[:4] + (9).to_bytes(4, "little") + data[8:])
    with pytest.raises(ModelFileError):
        decode_model(data[:100])
    with pytest.raises(ModelFileError):
        load_model(tmp_path / "missing.mpnn")


def test_summary() -> None:
    """Summary lists every layer and totals the trainable parameters."""
    model = build_lenet(900, 3)
    summary = summarize(model)
    assert len(summary.rows) == len(model.layers)
    assert summary.total_params == 118882
    assert summary.model_bytes == len(encode_model(model))
    text = summary.as_text()
    assert "conv1" in text
    assert "(None, 448, 64)" in text
    assert "Total params: 118882" in text
