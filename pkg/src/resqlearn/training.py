"""Stage-wise residual training with Adam, plus the equal-budget baseline.

The multi-stage procedure: F_0 = 0; stage s trains a fresh module on the
residuals r = y - F_{s-1}(x), where stage 1 sees features [x] and every
later stage sees [x, previous module's output] via forward chaining.  The
final predictor is the sum of the chained module outputs.  Earlier modules
are frozen once their stage finishes.

Seeding: stage 1 (and the baseline) uses the configured seed unchanged, so
a one-stage run is the plain single-module procedure; stage s >= 2 derives
a fresh seed from (seed, s).  Within a stage the same seed drives module
initialization and the per-epoch shuffles.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .circuit import CircuitConfig
from .errors import ConfigurationError, InputError, StructuralError
from .model import (
    QuantumModule,
    forward_batch,
    forward_backward_batch,
    init_module,
    pack_grads,
    pack_params,
    with_params,
)
from .runio import write_csv


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 64
    learning_rate: float = 0.005
    epochs_per_stage: int = 25
    n_stages: int = 4
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    seed: int = 0

    def __post_init__(self) -> None:
        if self.batch_size < 1 or self.epochs_per_stage < 1 or self.n_stages < 1:
            raise ConfigurationError("batch_size, epochs_per_stage, n_stages must be >= 1")
        if not self.learning_rate > 0 or not self.adam_epsilon > 0:
            raise ConfigurationError("learning_rate and adam_epsilon must be positive")
        for beta in (self.adam_beta1, self.adam_beta2):
            if not 0.0 <= beta < 1.0:
                raise ConfigurationError(f"Adam betas must lie in [0, 1), got {beta}")


@dataclass
class AdamState:
    step_count: int
    first_moment: np.ndarray
    second_moment: np.ndarray

    @classmethod
    def zeros(cls, n_params: int) -> "AdamState":
        return cls(0, np.zeros(n_params), np.zeros(n_params))


@dataclass
class ResidualEnsemble:
    modules: list[QuantumModule]

    def __post_init__(self) -> None:
        if not self.modules:
            raise StructuralError("ensemble needs at least one module")
        head = self.modules[0].config
        if head.input_dim != 1:
            raise StructuralError("first module must have input_dim 1")
        for mod in self.modules[1:]:
            cfg = mod.config
            if cfg.input_dim != 2:
                raise StructuralError("later modules must have input_dim 2")
            if (cfg.n_qubits, cfg.n_layers, cfg.encoding_mode) != (
                head.n_qubits,
                head.n_layers,
                head.encoding_mode,
            ):
                raise StructuralError("modules must share structure apart from input_dim")


@dataclass(frozen=True)
class EpochRow:
    stage: int
    epoch: int
    train_mse: float
    val_mse: float


@dataclass(frozen=True)
class StageSummary:
    stage: int
    test_mse: float


@dataclass
class StageLog:
    epoch_rows: list[EpochRow]
    summaries: list[StageSummary]


STAGE_LOG_HEADER = ["stage", "epoch", "train_mse", "val_mse"]
STAGE_SUMMARY_HEADER = ["stage", "test_mse"]


def write_stage_log_csv(log: StageLog, path) -> None:
    write_csv(
        path,
        STAGE_LOG_HEADER,
        [(r.stage, r.epoch, r.train_mse, r.val_mse) for r in log.epoch_rows],
    )


def write_stage_summary_csv(log: StageLog, path) -> None:
    write_csv(path, STAGE_SUMMARY_HEADER, [(s.stage, s.test_mse) for s in log.summaries])


def stage_seed(seed: int, stage: int) -> int:
    """Stage 1 keeps the seed (plain single-module training); later stages
    hash (seed, stage) so each gets fresh, reproducible randomness."""
    if stage == 1:
        return int(seed)
    return int(np.random.SeedSequence([int(seed), int(stage)]).generate_state(1, dtype=np.uint64)[0])


def mse(predictions, targets) -> float:
    preds = np.asarray(predictions, dtype=float).reshape(-1)
    ys = np.asarray(targets, dtype=float).reshape(-1)
    if preds.shape != ys.shape or preds.size == 0:
        raise InputError(f"mse needs equal non-empty lengths, got {preds.shape} vs {ys.shape}")
    diff = preds - ys
    return float(np.mean(diff * diff))


def adam_step(
    state: AdamState, params: np.ndarray, grads: np.ndarray, config: TrainConfig
) -> tuple[AdamState, np.ndarray]:
    """One bias-corrected Adam update; pure - returns fresh state and params."""
    if params.shape != grads.shape:
        raise InputError(f"params shape {params.shape} vs grads shape {grads.shape}")
    t = state.step_count + 1
    b1, b2 = config.adam_beta1, config.adam_beta2
    m = b1 * state.first_moment + (1.0 - b1) * grads
    v = b2 * state.second_moment + (1.0 - b2) * grads * grads
    m_hat = m / (1.0 - b1**t)
    v_hat = v / (1.0 - b2**t)
    new_params = params - config.learning_rate * m_hat / (np.sqrt(v_hat) + config.adam_epsilon)
    return AdamState(t, m, v), new_params


def train_module(
    module: QuantumModule,
    inputs,
    targets,
    val_inputs,
    val_targets,
    config: TrainConfig,
) -> tuple[QuantumModule, list[tuple[int, float, float]]]:
    """Mini-batch Adam training; returns the module and per-epoch
    (epoch, train_mse, val_mse) rows evaluated on the full sets.

    Every epoch reshuffles with the run's seeded generator; the last batch
    may be short; batch gradients are means, so the learning rate does not
    depend on batch size.  No early stopping.
    """
    x = np.asarray(inputs, dtype=float)
    y = np.asarray(targets, dtype=float).reshape(-1)
    xv = np.asarray(val_inputs, dtype=float)
    yv = np.asarray(val_targets, dtype=float).reshape(-1)
    if x.ndim != 2 or x.shape[1] != module.config.input_dim:
        raise InputError(f"inputs must be (n, {module.config.input_dim}), got {x.shape}")
    if x.shape[0] == 0:
        raise InputError("training set is empty")
    if x.shape[0] != y.shape[0] or xv.shape[0] != yv.shape[0]:
        raise InputError("inputs and targets disagree in length")

    rng = np.random.default_rng(config.seed)
    params = pack_params(module)
    state = AdamState.zeros(params.size)
    log: list[tuple[int, float, float]] = []
    for epoch in range(config.epochs_per_stage):
        order = rng.permutation(x.shape[0])
        for start in range(0, order.size, config.batch_size):
            batch = order[start : start + config.batch_size]
            _, grads = forward_backward_batch(with_params(module, params), x[batch], y[batch])
            state, params = adam_step(state, params, pack_grads(grads), config)
        current = with_params(module, params)
        train_mse = mse(forward_batch(current, x), y)
        val_mse = mse(forward_batch(current, xv), yv)
        log.append((epoch, train_mse, val_mse))
    return with_params(module, params), log


def build_stage_features(modules: list[QuantumModule], x_values) -> np.ndarray:
    """Feature rows for the stage after ``modules``: [x] when no modules
    exist yet, else [x, chained output of the last module]."""
    xs = np.asarray(x_values, dtype=float).reshape(-1)
    feats = xs[:, None]
    for i, module in enumerate(modules):
        expected_dim = 1 if i == 0 else 2
        if module.config.input_dim != expected_dim:
            raise StructuralError(
                f"module {i + 1} has input_dim {module.config.input_dim}, expected {expected_dim}"
            )
        out = forward_batch(module, feats)
        feats = np.column_stack([xs, out])
    return feats


def ensemble_predict(ensemble: ResidualEnsemble, x_values) -> np.ndarray:
    """Sum of chained module outputs; each module evaluated exactly once."""
    xs = np.asarray(x_values, dtype=float).reshape(-1)
    feats = xs[:, None]
    total = np.zeros_like(xs)
    for module in ensemble.modules:
        out = forward_batch(module, feats)
        total = total + out
        feats = np.column_stack([xs, out])
    return total


def _split_arrays(dataset) -> dict:
    from .datagen import Split, split_xy

    arrays = {}
    for split in Split:
        xs, ys = split_xy(dataset, split)
        if xs.size == 0:
            raise InputError(f"dataset is missing the {split.value} split")
        arrays[split.value] = (xs, ys)
    return arrays


def train_residual(
    dataset, config: TrainConfig, circuit_config: CircuitConfig
) -> tuple[ResidualEnsemble, StageLog]:
    """Multi-stage residual training over a labeled dataset.

    Per-stage feature matrices and cumulative predictions are carried
    forward incrementally; this matches recomputing the chain from scratch
    because finished modules never change.
    """
    arrays = _split_arrays(dataset)
    x_train, y_train = arrays["train"]
    x_val, y_val = arrays["val"]
    x_test, y_test = arrays["test"]

    modules: list[QuantumModule] = []
    log = StageLog([], [])
    feats = {"train": x_train[:, None], "val": x_val[:, None], "test": x_test[:, None]}
    cum = {name: np.zeros_like(arrays[name][0]) for name in ("train", "val", "test")}
    for stage in range(1, config.n_stages + 1):
        seed = stage_seed(config.seed, stage)
        stage_cc = replace(circuit_config, input_dim=1 if stage == 1 else 2)
        stage_config = replace(config, seed=seed)
        module = init_module(stage_cc, seed)
        module, rows = train_module(
            module,
            feats["train"],
            y_train - cum["train"],
            feats["val"],
            y_val - cum["val"],
            stage_config,
        )
        modules.append(module)
        log.epoch_rows.extend(EpochRow(stage, e, tr, va) for e, tr, va in rows)
        outputs = {name: forward_batch(module, feats[name]) for name in feats}
        for name in cum:
            cum[name] = cum[name] + outputs[name]
            feats[name] = np.column_stack([arrays[name][0], outputs[name]])
        log.summaries.append(StageSummary(stage, mse(cum["test"], y_test)))
    return ResidualEnsemble(modules), log


def train_baseline(
    dataset, config: TrainConfig, circuit_config: CircuitConfig
) -> tuple[QuantumModule, StageLog]:
    """Single module trained for n_stages * epochs_per_stage epochs: the
    same step budget as the staged run, same stage-1 seeding."""
    arrays = _split_arrays(dataset)
    x_train, y_train = arrays["train"]
    x_val, y_val = arrays["val"]
    x_test, y_test = arrays["test"]
    baseline_cc = replace(circuit_config, input_dim=1)
    total_epochs = config.n_stages * config.epochs_per_stage
    flat_config = replace(config, epochs_per_stage=total_epochs, n_stages=1)
    module = init_module(baseline_cc, flat_config.seed)
    module, rows = train_module(
        module, x_train[:, None], y_train, x_val[:, None], y_val, flat_config
    )
    log = StageLog(
        [EpochRow(1, e, tr, va) for e, tr, va in rows],
        [StageSummary(1, mse(forward_batch(module, x_test[:, None]), y_test))],
    )
    return module, log
