"""One trainable stage: squashed circuit parameters plus a linear Z readout.

Raw circuit parameters are unconstrained; the circuit sees
``pi * tanh(raw)``, so every effective angle lies strictly inside
(-pi, pi).  The readout is a plain linear layer over the per-qubit Z
expectations and is deliberately not squashed, since capping its weights
would bound the output below the data amplitude for some configurations.

Checkpoint format (portable text, one ``key = value`` per line): structural
metadata (n_qubits, n_layers, input_dim, encoding) followed by the raw
parameter arrays written as space-separated shortest round-trip decimals.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .circuit import CircuitConfig, EncodingMode, ParameterLayout, build_batched_ops
from .errors import StructuralError
from .simulator import adjoint_backward, run_ops, z_expectations

# Chunk bound for prediction passes: ~2**22 complex amplitudes in flight.
_FORWARD_CHUNK_AMPS = 1 << 22


@dataclass
class QuantumModule:
    config: CircuitConfig
    raw_params: np.ndarray
    readout_weights: np.ndarray
    readout_bias: float

    def __post_init__(self) -> None:
        layout = ParameterLayout.for_config(self.config)
        self.raw_params = np.asarray(self.raw_params, dtype=float)
        self.readout_weights = np.asarray(self.readout_weights, dtype=float)
        if self.raw_params.shape != (layout.total_count,):
            raise StructuralError(
                f"raw_params must have {layout.total_count} entries, got shape {self.raw_params.shape}"
            )
        if self.readout_weights.shape != (self.config.n_qubits,):
            raise StructuralError(
                f"readout_weights must have {self.config.n_qubits} entries, "
                f"got shape {self.readout_weights.shape}"
            )
        if not (
            np.all(np.isfinite(self.raw_params))
            and np.all(np.isfinite(self.readout_weights))
            and np.isfinite(self.readout_bias)
        ):
            raise StructuralError("module parameters must be finite")


@dataclass
class ModuleGrads:
    """Gradients shaped like the trainable fields of QuantumModule."""

    raw_params: np.ndarray
    readout_weights: np.ndarray
    readout_bias: float


def effective_params(raw_params) -> np.ndarray:
    """Squash raw parameters into (-pi, pi) circuit angles."""
    return np.pi * np.tanh(np.asarray(raw_params, dtype=float))


def init_module(config: CircuitConfig, seed) -> QuantumModule:
    """Fresh module: raw angles ~ N(0, 1), readout ~ U(-0.1, 0.1), bias 0.

    The small readout keeps early predictions near zero, which matches the
    residual targets later stages start from.
    """
    layout = ParameterLayout.for_config(config)
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal(layout.total_count)
    weights = rng.uniform(-0.1, 0.1, config.n_qubits)
    return QuantumModule(config, raw, weights, 0.0)


def forward_batch(module: QuantumModule, features) -> np.ndarray:
    """Predictions for a (batch, input_dim) feature matrix."""
    feats = np.atleast_2d(np.asarray(features, dtype=float))
    eff = effective_params(module.raw_params)
    dim = 1 << module.config.n_qubits
    chunk = max(1, _FORWARD_CHUNK_AMPS // dim)
    out = np.empty(feats.shape[0])
    for start in range(0, feats.shape[0], chunk):
        block = feats[start : start + chunk]
        ops = build_batched_ops(block, eff, module.config)
        amps = run_ops(module.config.n_qubits, ops, batch=block.shape[0])
        zs = z_expectations(amps, module.config.n_qubits)
        out[start : start + chunk] = module.readout_bias + zs @ module.readout_weights
    return out


def forward(module: QuantumModule, features) -> float:
    """Scalar prediction for a single feature row."""
    feats = np.asarray(features, dtype=float).reshape(1, -1)
    return float(forward_batch(module, feats)[0])


def forward_backward_batch(
    module: QuantumModule, features, targets
) -> tuple[float, ModuleGrads]:
    """Mean squared error over a batch and its batch-mean gradients.

    Per-sample gradients reduce in batch order inside the adjoint sweep, so
    the result is bitwise deterministic for a fixed batch.
    """
    feats = np.atleast_2d(np.asarray(features, dtype=float))
    y = np.asarray(targets, dtype=float).reshape(-1)
    batch = feats.shape[0]
    if y.shape[0] != batch:
        raise StructuralError(f"{batch} feature rows but {y.shape[0]} targets")
    n = module.config.n_qubits
    eff = effective_params(module.raw_params)
    ops = build_batched_ops(feats, eff, module.config)
    amps = run_ops(n, ops, batch=batch)
    zs = z_expectations(amps, n)
    pred = module.readout_bias + zs @ module.readout_weights
    err = pred - y
    loss = float(np.mean(err * err))

    scale = (2.0 / batch) * err
    grad_w = scale @ zs
    grad_b = float(np.sum(scale))
    obs_weights = scale[:, None] * module.readout_weights[None, :]
    layout = ParameterLayout.for_config(module.config)
    grad_eff = adjoint_backward(amps, n, ops, obs_weights, layout.total_count)
    tanh_raw = np.tanh(module.raw_params)
    grad_raw = grad_eff * np.pi * (1.0 - tanh_raw * tanh_raw)
    return loss, ModuleGrads(grad_raw, grad_w, grad_b)


def forward_backward(module: QuantumModule, features, target: float) -> tuple[float, ModuleGrads]:
    """Squared error of one sample and its gradients for every trainable field."""
    feats = np.asarray(features, dtype=float).reshape(1, -1)
    return forward_backward_batch(module, feats, np.asarray([target], dtype=float))


# --- flat parameter packing (order: raw_params, readout_weights, bias) ---


def pack_params(module: QuantumModule) -> np.ndarray:
    return np.concatenate([module.raw_params, module.readout_weights, [module.readout_bias]])


def pack_grads(grads: ModuleGrads) -> np.ndarray:
    return np.concatenate([grads.raw_params, grads.readout_weights, [grads.readout_bias]])


def with_params(module: QuantumModule, flat: np.ndarray) -> QuantumModule:
    """Module with trainable fields taken from a packed flat vector."""
    n_raw = module.raw_params.shape[0]
    n_q = module.config.n_qubits
    if flat.shape != (n_raw + n_q + 1,):
        raise StructuralError(f"packed vector has wrong length {flat.shape}")
    return replace(
        module,
        raw_params=flat[:n_raw].copy(),
        readout_weights=flat[n_raw : n_raw + n_q].copy(),
        readout_bias=float(flat[-1]),
    )


# --- checkpoint I/O ---


def _fmt_array(values: np.ndarray) -> str:
    return " ".join(repr(float(v)) for v in values)


def save_checkpoint(module: QuantumModule, path) -> None:
    cfg = module.config
    lines = [
        "format = resqlearn-module-v1",
        f"n_qubits = {cfg.n_qubits}",
        f"n_layers = {cfg.n_layers}",
        f"input_dim = {cfg.input_dim}",
        f"encoding = {cfg.encoding_mode.value}",
        f"raw_params = {_fmt_array(module.raw_params)}",
        f"readout_weights = {_fmt_array(module.readout_weights)}",
        f"readout_bias = {module.readout_bias!r}",
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def load_checkpoint(path) -> QuantumModule:
    fields: dict[str, str] = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        key, _, value = line.partition(" = ")
        fields[key] = value
    if fields.get("format") != "resqlearn-module-v1":
        raise StructuralError(f"unrecognized checkpoint format in {path}")
    config = CircuitConfig(
        n_qubits=int(fields["n_qubits"]),
        n_layers=int(fields["n_layers"]),
        input_dim=int(fields["input_dim"]),
        encoding_mode=EncodingMode(fields["encoding"]),
    )
    raw = np.array([float(v) for v in fields["raw_params"].split()])
    weights = np.array([float(v) for v in fields["readout_weights"].split()])
    return QuantumModule(config, raw, weights, float(fields["readout_bias"]))
