"""Gate-sequence construction: data encoding block plus variational layers.

Encoding (per qubit q, with x the feature assigned cyclically as
``features[q mod input_dim]``): RY(pi*x), RZ(pi*x^3), RX(pi*sqrt(|1-x^2|)),
in that order; the RY_ONLY ablation keeps just the RY gate.  The absolute
value keeps the RX angle real for features outside [-1, 1], which happens
when a feature is a previous stage's output.

Variational layers (per layer): single-qubit RY, RZ, RX on every qubit in
qubit order, then for every ordered pair (control, target) with
control != target, taken in lexicographic (control, target) order, the
controlled rotations CRY, CRZ, CRX.  Trainable slots are assigned in
exactly this emission order, 0..total_count-1 with no gaps, so a flat
parameter vector maps deterministically onto the circuit.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigurationError, InputError, StructuralError
from .simulator import MAX_QUBITS, BatchOp, GateKind, GateOp


class EncodingMode(Enum):
    FULL = "full"
    RY_ONLY = "ry_only"


@dataclass(frozen=True)
class CircuitConfig:
    n_qubits: int
    n_layers: int
    input_dim: int = 1
    encoding_mode: EncodingMode = EncodingMode.FULL

    def __post_init__(self) -> None:
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ConfigurationError(f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}")
        if self.n_layers < 1:
            raise ConfigurationError(f"n_layers must be >= 1, got {self.n_layers}")
        if self.input_dim not in (1, 2):
            raise ConfigurationError(f"input_dim must be 1 or 2, got {self.input_dim}")


@dataclass(frozen=True)
class ParameterLayout:
    """Slot bookkeeping for the variational parameters of one circuit."""

    n_qubits: int
    n_layers: int
    single_qubit_per_layer: int
    entangling_per_layer: int
    total_count: int

    @classmethod
    def for_config(cls, config: CircuitConfig) -> "ParameterLayout":
        n = config.n_qubits
        single = 3 * n
        entangling = 3 * n * (n - 1)
        return cls(
            n_qubits=n,
            n_layers=config.n_layers,
            single_qubit_per_layer=single,
            entangling_per_layer=entangling,
            total_count=config.n_layers * (single + entangling),
        )


_SINGLE_KINDS = (GateKind.RY, GateKind.RZ, GateKind.RX)
_CONTROLLED_KINDS = (GateKind.CRY, GateKind.CRZ, GateKind.CRX)


def encoding_angles(x):
    """The three encoding angles for a feature value (scalar or array)."""
    ry = np.pi * x
    rz = np.pi * x**3
    rx = np.pi * np.sqrt(np.abs(1.0 - x * x))
    return ry, rz, rx


def build_encoding(features, config: CircuitConfig) -> list[GateOp]:
    """Encoding block: one rotation triple (or single RY) per qubit."""
    feats = np.asarray(features, dtype=float)
    if feats.shape != (config.input_dim,):
        raise InputError(f"expected {config.input_dim} features, got shape {feats.shape}")
    if not np.all(np.isfinite(feats)):
        raise InputError("features must be finite")
    gates: list[GateOp] = []
    for q in range(config.n_qubits):
        x = feats[q % config.input_dim]
        ry, rz, rx = encoding_angles(x)
        gates.append(GateOp(GateKind.RY, target=q, angle=float(ry)))
        if config.encoding_mode is EncodingMode.FULL:
            gates.append(GateOp(GateKind.RZ, target=q, angle=float(rz)))
            gates.append(GateOp(GateKind.RX, target=q, angle=float(rx)))
    return gates


def _ordered_pairs(n_qubits: int):
    for c in range(n_qubits):
        for t in range(n_qubits):
            if t != c:
                yield c, t


def build_variational_layers(effective_params, config: CircuitConfig) -> list[GateOp]:
    """Variational block; angles come from an already-squashed flat vector."""
    params = np.asarray(effective_params, dtype=float)
    layout = ParameterLayout.for_config(config)
    if params.shape != (layout.total_count,):
        raise StructuralError(
            f"expected {layout.total_count} effective parameters, got shape {params.shape}"
        )
    gates: list[GateOp] = []
    slot = 0
    for _layer in range(config.n_layers):
        for q in range(config.n_qubits):
            for kind in _SINGLE_KINDS:
                gates.append(GateOp(kind, target=q, angle=float(params[slot]), trainable_slot=slot))
                slot += 1
        for c, t in _ordered_pairs(config.n_qubits):
            for kind in _CONTROLLED_KINDS:
                gates.append(
                    GateOp(kind, target=t, control=c, angle=float(params[slot]), trainable_slot=slot)
                )
                slot += 1
    return gates


def build_full_circuit(features, effective_params, config: CircuitConfig) -> list[GateOp]:
    """Encoding block followed by the variational layers."""
    return build_encoding(features, config) + build_variational_layers(effective_params, config)


def build_batched_ops(features, effective_params, config: CircuitConfig) -> list[BatchOp]:
    """Batched internal form of build_full_circuit.

    ``features`` has shape (batch, input_dim); encoding angles become
    per-row arrays while variational angles stay scalars.  Gate order and
    slot assignment match build_full_circuit exactly.
    """
    feats = np.asarray(features, dtype=float)
    if feats.ndim != 2 or feats.shape[1] != config.input_dim:
        raise InputError(f"expected (batch, {config.input_dim}) features, got shape {feats.shape}")
    if not np.all(np.isfinite(feats)):
        raise InputError("features must be finite")
    params = np.asarray(effective_params, dtype=float)
    layout = ParameterLayout.for_config(config)
    if params.shape != (layout.total_count,):
        raise StructuralError(
            f"expected {layout.total_count} effective parameters, got shape {params.shape}"
        )
    ops: list[BatchOp] = []
    for q in range(config.n_qubits):
        x = feats[:, q % config.input_dim]
        ry, rz, rx = encoding_angles(x)
        ops.append((GateKind.RY, q, None, ry, None))
        if config.encoding_mode is EncodingMode.FULL:
            ops.append((GateKind.RZ, q, None, rz, None))
            ops.append((GateKind.RX, q, None, rx, None))
    slot = 0
    for _layer in range(config.n_layers):
        for q in range(config.n_qubits):
            for kind in _SINGLE_KINDS:
                ops.append((kind, q, None, float(params[slot]), slot))
                slot += 1
        for c, t in _ordered_pairs(config.n_qubits):
            for kind in _CONTROLLED_KINDS:
                ops.append((kind, t, c, float(params[slot]), slot))
                slot += 1
    return ops
