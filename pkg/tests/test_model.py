"""Trainable stage module: squash, readout, composite gradients, checkpoints."""

import math

import numpy as np
import pytest

import resqlearn.model as model
from resqlearn.circuit import CircuitConfig, EncodingMode
from resqlearn.errors import StructuralError
from resqlearn.model import (
    QuantumModule,
    effective_params,
    forward,
    forward_backward,
    forward_backward_batch,
    forward_batch,
    init_module,
    load_checkpoint,
    pack_grads,
    pack_params,
    save_checkpoint,
    with_params,
)


def small_module(seed=7, n_qubits=3, n_layers=2):
    return init_module(CircuitConfig(n_qubits, n_layers), seed)


def test_effective_params_squash():
    assert effective_params(0.0) == 0.0
    # independent reference: tanh(1) = (e^2 - 1) / (e^2 + 1)
    want = np.pi * (math.e**2 - 1) / (math.e**2 + 1)
    assert effective_params(1.0) == pytest.approx(want, abs=1e-12)
    mid = effective_params(np.array([10.0, -10.0]))
    assert abs(mid[0]) < np.pi and abs(mid[1]) < np.pi
    # float64 tanh saturates to exactly 1 for very large inputs
    assert abs(effective_params(50.0)) <= np.pi
    assert mid[0] == pytest.approx(np.pi, abs=1e-7)


def test_constant_module_predicts_bias():
    config = CircuitConfig(2, 1)
    total = 12
    module = QuantumModule(config, np.zeros(total), np.zeros(2), 1.25)
    for x in (-1.0, 0.0, 0.7, 2.0):
        assert forward(module, [x]) == pytest.approx(1.25, abs=1e-12)


def test_single_qubit_analytic_prediction():
    config = CircuitConfig(1, 1, encoding_mode=EncodingMode.RY_ONLY)
    module = QuantumModule(config, np.zeros(3), np.array([1.0]), 0.0)
    assert forward(module, [0.5]) == pytest.approx(np.cos(np.pi * 0.5), abs=1e-12)
    assert forward(module, [0.25]) == pytest.approx(np.cos(np.pi * 0.25), abs=1e-12)


def test_prediction_is_bounded_by_readout():
    rng = np.random.default_rng(3)
    module = small_module(seed=3)
    bound = abs(module.readout_bias) + np.sum(np.abs(module.readout_weights))
    preds = forward_batch(module, rng.uniform(-3, 3, (50, 1)))
    assert np.all(np.abs(preds) <= bound + 1e-12)


def test_init_module_is_seeded():
    a, b = small_module(seed=9), small_module(seed=9)
    assert np.array_equal(a.raw_params, b.raw_params)
    assert np.array_equal(a.readout_weights, b.readout_weights)
    assert not np.array_equal(a.raw_params, small_module(seed=10).raw_params)


def test_module_shape_validation():
    config = CircuitConfig(2, 1)
    with pytest.raises(StructuralError):
        QuantumModule(config, np.zeros(11), np.zeros(2), 0.0)
    with pytest.raises(StructuralError):
        QuantumModule(config, np.zeros(12), np.zeros(3), 0.0)
    with pytest.raises(StructuralError):
        QuantumModule(config, np.full(12, np.nan), np.zeros(2), 0.0)


def test_zero_residual_gives_zero_gradients():
    module = small_module(seed=4)
    x = np.array([0.3])
    y = forward(module, x)
    loss, grads = forward_backward(module, x, y)
    assert loss == pytest.approx(0.0, abs=1e-18)
    assert np.max(np.abs(pack_grads(grads))) < 1e-12


def test_zero_readout_blocks_circuit_gradients():
    base = small_module(seed=5)
    module = QuantumModule(base.config, base.raw_params, np.zeros(3), 0.0)
    loss, grads = forward_backward(module, [0.4], 1.0)
    assert loss == pytest.approx(1.0)
    assert np.max(np.abs(grads.raw_params)) == 0.0
    # weight gradients stay informative: 2 * (pred - y) * <Z_q>
    from resqlearn.circuit import build_batched_ops
    from resqlearn.simulator import run_ops, z_expectations

    ops = build_batched_ops(np.array([[0.4]]), effective_params(module.raw_params), module.config)
    zs = z_expectations(run_ops(3, ops, batch=1), 3)[0]
    assert grads.readout_weights == pytest.approx(2.0 * (0.0 - 1.0) * zs, abs=1e-12)
    assert grads.readout_bias == pytest.approx(-2.0)


def test_gradients_match_finite_differences():
    rng = np.random.default_rng(6)
    module = small_module(seed=6)
    feats = rng.uniform(-1.5, 1.5, (3, 1))
    ys = rng.standard_normal(3)
    _, grads = forward_backward_batch(module, feats, ys)
    flat_grads = pack_grads(grads)
    p0 = pack_params(module)
    h = 1e-5
    for k in range(p0.size):
        up, down = p0.copy(), p0.copy()
        up[k] += h
        down[k] -= h
        lu, _ = forward_backward_batch(with_params(module, up), feats, ys)
        ld, _ = forward_backward_batch(with_params(module, down), feats, ys)
        fd = (lu - ld) / (2 * h)
        rel = abs(fd - flat_grads[k]) / max(abs(fd), abs(flat_grads[k]), 1e-4)
        assert rel < 1e-5, (k, fd, flat_grads[k])


def test_batch_pass_equals_mean_of_single_passes():
    rng = np.random.default_rng(7)
    module = small_module(seed=7)
    feats = rng.uniform(-1, 1, (5, 1))
    ys = rng.standard_normal(5)
    loss_b, grads_b = forward_backward_batch(module, feats, ys)
    singles = [forward_backward(module, feats[i], float(ys[i])) for i in range(5)]
    assert loss_b == pytest.approx(np.mean([s[0] for s in singles]), abs=1e-14)
    mean_grads = np.mean([pack_grads(s[1]) for s in singles], axis=0)
    assert np.max(np.abs(pack_grads(grads_b) - mean_grads)) < 1e-13


def test_forward_batch_chunking_is_seamless(monkeypatch):
    rng = np.random.default_rng(8)
    module = small_module(seed=8)
    feats = rng.uniform(-1, 1, (9, 1))
    whole = forward_batch(module, feats)
    assert np.array_equal(whole, forward_batch(module, feats))  # reruns are bitwise stable
    monkeypatch.setattr(model, "_FORWARD_CHUNK_AMPS", 16)  # forces 2-row chunks
    chunked = forward_batch(module, feats)
    # chunk shape changes matmul accumulation order, so equality is numeric
    assert np.allclose(whole, chunked, rtol=0, atol=1e-13)


def test_forward_backward_rejects_length_mismatch():
    module = small_module(seed=9)
    with pytest.raises(StructuralError):
        forward_backward_batch(module, np.zeros((3, 1)), np.zeros(2))


def test_checkpoint_roundtrip_is_exact(tmp_path):
    module = small_module(seed=10)
    path = tmp_path / "stage.ckpt"
    save_checkpoint(module, path)
    loaded = load_checkpoint(path)
    assert loaded.config == module.config
    assert np.array_equal(loaded.raw_params, module.raw_params)
    assert np.array_equal(loaded.readout_weights, module.readout_weights)
    assert loaded.readout_bias == module.readout_bias


def test_checkpoint_rejects_unknown_format(tmp_path):
    path = tmp_path / "bad.ckpt"
    path.write_text("format = something-else\n")
    with pytest.raises(StructuralError):
        load_checkpoint(path)


def test_pack_roundtrip():
    module = small_module(seed=11)
    rebuilt = with_params(module, pack_params(module))
    assert np.array_equal(rebuilt.raw_params, module.raw_params)
    assert rebuilt.readout_bias == module.readout_bias
    with pytest.raises(StructuralError):
        with_params(module, np.zeros(3))
