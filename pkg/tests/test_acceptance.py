"""Acceptance gate: one test per release criterion.

Run with ``pytest -v``; each PASSED/FAILED line is one criterion's
verdict.  The trend criteria (05-08) run the full advertised scale
(5000 samples, 25 epochs per stage) and take a few minutes each; the
expensive training runs are shared through module-scoped fixtures.
"""

import time

import numpy as np
import pytest

from resqlearn.circuit import CircuitConfig, GateKind
from resqlearn.cli import main
from resqlearn.datagen import (
    DEFAULT_COMPONENTS,
    DatasetSpec,
    Split,
    generate_dataset,
    split_xy,
    target_function,
)
from resqlearn.diagnostics import BarrenConfig, run_barren_sweep, write_barren_csv
from resqlearn.model import forward_backward_batch, init_module, pack_grads, pack_params, with_params
from resqlearn.runio import read_csv
from resqlearn.simulator import GateOp, apply_gate, expectation_z, init_zero_state
from resqlearn.spectral import (
    GridSpec,
    amplitude_at,
    amplitude_spectrum,
    dense_grid,
    stage_spectra,
)
from resqlearn.training import (
    TrainConfig,
    train_baseline,
    train_module,
    train_residual,
)

SEEDS = (0, 1, 2)


@pytest.fixture(scope="module")
def full_dataset():
    return generate_dataset(DatasetSpec())


@pytest.fixture(scope="module")
def runs_6q(full_dataset):
    """Residual + baseline training at 6 qubits for each seed."""
    out = {"residual": {}, "baseline": {}, "logs": {}, "base_logs": {}}
    for seed in SEEDS:
        config = TrainConfig(seed=seed)
        ensemble, log = train_residual(full_dataset, config, CircuitConfig(6, 2))
        module, base_log = train_baseline(full_dataset, config, CircuitConfig(6, 2))
        out["residual"][seed] = ensemble
        out["logs"][seed] = log
        out["baseline"][seed] = module
        out["base_logs"][seed] = base_log
    return out


@pytest.fixture(scope="module")
def spectra_6q(runs_6q):
    """Stage spectra of the seed-0 six-qubit run on the default grid."""
    grid = GridSpec()
    xs = dense_grid(grid)
    y_grid = target_function(DEFAULT_COMPONENTS, xs)
    records = stage_spectra(runs_6q["residual"][0], y_grid, grid, [0.5])
    return amplitude_spectrum(y_grid, grid), records


def test_c01_rotation_expectation_and_norm():
    """RY(t)|0> reads <Z> = cos t within 1e-12; norms survive 1000 gates."""
    rng = np.random.default_rng(101)
    for theta in rng.uniform(-2 * np.pi, 2 * np.pi, 100):
        state = apply_gate(init_zero_state(1), GateOp(GateKind.RY, 0, None, float(theta)))
        assert abs(expectation_z(state, 0) - np.cos(theta)) < 1e-12

    kinds = list(GateKind)
    state = init_zero_state(4)
    for _ in range(1000):
        kind = kinds[rng.integers(len(kinds))]
        target = int(rng.integers(4))
        control = None
        if kind.controlled:
            control = int((target + 1 + rng.integers(3)) % 4)
        state = apply_gate(state, GateOp(kind, target, control, float(rng.normal())))
        assert abs(np.linalg.norm(state.amplitudes) - 1.0) < 1e-12


def test_c02_adjoint_matches_finite_differences():
    """Adjoint gradients vs central differences (h = 1e-5), all slots."""
    rng = np.random.default_rng(202)
    h = 1e-5
    configs = [(n, layers) for n in (2, 3, 4) for layers in (1, 2)]
    for trial in range(20):
        n, layers = configs[trial % len(configs)]
        cc = CircuitConfig(n, layers, input_dim=1)
        module = init_module(cc, seed=1000 + trial)
        module = with_params(module, rng.normal(scale=0.7, size=pack_params(module).size))
        feats = rng.uniform(0, 2, (4, 1))
        targets = rng.normal(size=4)
        _, grads = forward_backward_batch(module, feats, targets)
        flat = pack_params(module)
        adjoint = pack_grads(grads)
        for slot in range(flat.size):
            bumped = flat.copy()
            bumped[slot] = flat[slot] + h
            up, _ = forward_backward_batch(with_params(module, bumped), feats, targets)
            bumped[slot] = flat[slot] - h
            down, _ = forward_backward_batch(with_params(module, bumped), feats, targets)
            fd = (up - down) / (2 * h)
            # the floor guards slots whose true gradient is ~0, where a
            # relative comparison is meaningless
            denom = max(abs(fd), abs(adjoint[slot]), 1e-4)
            assert abs(adjoint[slot] - fd) / denom < 1e-5, (trial, slot)


def _direct_dft_amplitudes(values: np.ndarray) -> np.ndarray:
    n = values.size
    bins = n // 2 + 1
    out = np.empty(bins)
    for k in range(bins):
        coeff = np.sum(values * np.exp(-2j * np.pi * k * np.arange(n) / n))
        scale = 1.0 if k == 0 or (n % 2 == 0 and k == n // 2) else 2.0
        out[k] = scale * abs(coeff) / n
    return out


def test_c03_spectrum_matches_direct_dft():
    """rfft amplitudes equal the direct DFT sum; unit sinusoid reads 1.0."""
    rng = np.random.default_rng(303)
    for n in (16, 256, 2000):
        spec = GridSpec(0.0, 2.0, n)
        values = rng.normal(size=n)
        report = amplitude_spectrum(values, spec)
        direct = _direct_dft_amplitudes(values)
        assert np.max(np.abs(report.amplitudes - direct)) <= 1e-9 * np.max(direct)

    spec = GridSpec(0.0, 2.0, 2000)
    xs = dense_grid(spec)
    report = amplitude_spectrum(np.sin(2 * np.pi * 3.0 * xs), spec)
    assert abs(amplitude_at(report, 3.0) - 1.0) <= 1e-9


def test_c04_single_stage_equals_plain_training():
    """S = 1 residual run is bitwise-identical to train_module."""
    data = generate_dataset(DatasetSpec(n_total=500))
    config = TrainConfig(n_stages=1, epochs_per_stage=5, seed=0)
    cc = CircuitConfig(3, 2, input_dim=1)
    ensemble, log = train_residual(data, config, cc)

    x_train, y_train = split_xy(data, Split.TRAIN)
    x_val, y_val = split_xy(data, Split.VAL)
    module, rows = train_module(
        init_module(cc, 0), x_train[:, None], y_train, x_val[:, None], y_val, config
    )
    staged = ensemble.modules[0]
    assert np.array_equal(staged.raw_params, module.raw_params)
    assert np.array_equal(staged.readout_weights, module.readout_weights)
    assert staged.readout_bias == module.readout_bias
    assert [(r.epoch, r.train_mse, r.val_mse) for r in log.epoch_rows] == rows


def test_c05_residual_beats_baseline(runs_6q):
    """Mean stage-4 test MSE < mean equal-budget baseline MSE, seeds 0-2."""
    stage4 = [runs_6q["logs"][s].summaries[3].test_mse for s in SEEDS]
    base = [runs_6q["base_logs"][s].summaries[0].test_mse for s in SEEDS]
    print(f"stage-4 mean {np.mean(stage4):.4f} vs baseline mean {np.mean(base):.4f}")
    assert np.mean(stage4) < np.mean(base)


def test_c06_more_qubits_less_error(full_dataset):
    """Mean stage-4 test MSE at 8 qubits < at 2 qubits, seeds 0-2."""
    means = {}
    for n_qubits in (2, 8):
        vals = []
        for seed in SEEDS:
            _, log = train_residual(
                full_dataset, TrainConfig(seed=seed), CircuitConfig(n_qubits, 2)
            )
            vals.append(log.summaries[3].test_mse)
        means[n_qubits] = float(np.mean(vals))
    print(f"mean stage-4 MSE: 2 qubits {means[2]:.4f}, 8 qubits {means[8]:.4f}")
    assert means[8] < means[2]


def test_c07_residual_spectrum_flattens(spectra_6q):
    """Residual amplitude at 0.5 Hz drops from stage 1 to stage 2."""
    _, records = spectra_6q
    r1 = amplitude_at(records[0].residual_spectrum, 0.5)
    r2 = amplitude_at(records[1].residual_spectrum, 0.5)
    print(f"residual amp at 0.5 Hz: stage 1 {r1:.4f}, stage 2 {r2:.4f}")
    assert r2 < r1


def test_c08_stage1_low_frequency_capture(spectra_6q):
    """Stage-1 predicted amplitude at 0.5 Hz within 25% of the truth."""
    true_report, records = spectra_6q
    truth = amplitude_at(true_report, 0.5)
    pred = records[0].pred_amplitudes[0]
    print(f"amp at 0.5 Hz: true {truth:.4f}, stage-1 prediction {pred:.4f}")
    assert abs(pred - truth) <= 0.25 * truth


def test_c09_barren_sweep_shape(tmp_path):
    """36-cell variance grid; 4 layers below 1 layer at every qubit count."""
    records, _ = run_barren_sweep(BarrenConfig(n_inits=25))
    path = tmp_path / "barren.csv"
    write_barren_csv(records, path)
    rows = read_csv(path, ["n_qubits", "n_layers", "grad_variance", "n_inits"])
    assert len(rows) == 36
    for n_qubits in range(2, 11):
        cell = {r.n_layers: r.grad_variance for r in records if r.n_qubits == n_qubits}
        assert cell[4] < cell[1], f"{n_qubits} qubits"


def test_c10_subcommand_reruns_byte_identical(tmp_path):
    """Same config and seed reproduce byte-identical CSVs."""
    tiny = [
        "--n-total", "60", "--n-qubits", "2", "--n-layers", "1",
        "--epochs-per-stage", "1", "--n-stages", "2", "--n-points", "128",
    ]
    cases = [
        ("gen-data", ["--n-total", "200"]),
        ("train", tiny),
        ("barren", ["--qubit-values", "2,3", "--layer-values", "1,2",
                    "--n-inits", "3", "--probe-batch", "4"]),
    ]
    for command, extra in cases:
        for attempt in ("a", "b"):
            rc = main([
                command, "--output-dir", str(tmp_path / command),
                "--run-id", attempt, *extra,
            ])
            assert rc == 0
        dir_a = tmp_path / command / "a"
        dir_b = tmp_path / command / "b"
        csvs = sorted(p.name for p in dir_a.glob("*.csv"))
        assert csvs
        for name in csvs:
            assert (dir_a / name).read_bytes() == (dir_b / name).read_bytes(), (command, name)
