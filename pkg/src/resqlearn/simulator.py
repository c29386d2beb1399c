"""Dense statevector simulation with exact Z expectations and adjoint gradients.

Layout convention (fixed, relied on by checkpoints and tests): qubit ``q``
maps to bit ``q`` of the basis index (little-endian), so basis index 5 =
0b101 has qubits 0 and 2 in state |1>.

Rotation convention: R_P(theta) = exp(-i * theta * P / 2), hence
RZ(theta) = diag(e^{-i theta/2}, e^{+i theta/2}).  Controlled rotations act
on the target only where the control bit is 1.

The public single-state API uses plain numpy slicing and is the readable
reference; the batched engine (run_ops / z_expectations /
adjoint_backward) stores a batch transposed as a (2**n, batch) array and
dispatches to JIT kernels, so each basis-pair update runs over a
contiguous batch vector.  Tests pin the two paths against each other.
Gradients use adjoint differentiation: one forward sweep, then one
backward sweep that un-applies each gate, so total work is linear in
(gate count) x (state size) and no intermediate states are cached.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from ._kernels import OVL, ROT, pair_indices
from .errors import ConfigurationError, StructuralError

MAX_QUBITS = 12


class GateKind(Enum):
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    CRX = "crx"
    CRY = "cry"
    CRZ = "crz"

    @property
    def controlled(self) -> bool:
        return self.value.startswith("c")

    @property
    def axis(self) -> str:
        """Rotation axis, one of 'x', 'y', 'z'."""
        return self.value[-1]


@dataclass(frozen=True)
class GateOp:
    """One (controlled) rotation gate.

    ``trainable_slot`` is the index of the parameter this gate's angle came
    from; encoding gates leave it ``None``.
    """

    kind: GateKind
    target: int
    control: int | None = None
    angle: float = 0.0
    trainable_slot: int | None = None

    def __post_init__(self) -> None:
        if self.kind.controlled != (self.control is not None):
            raise StructuralError(
                f"{self.kind.name} gate requires control={'set' if self.kind.controlled else 'absent'}"
            )
        if self.control is not None and self.control == self.target:
            raise StructuralError("control and target must differ")


@dataclass
class StateVector:
    """Pure n-qubit state: 2**n_qubits complex amplitudes, little-endian."""

    n_qubits: int
    amplitudes: np.ndarray

    def norm_sq(self) -> float:
        a = self.amplitudes
        return float(np.sum(a.real * a.real + a.imag * a.imag))


@dataclass(frozen=True)
class ZSumObservable:
    """Weighted sum of single-qubit Pauli-Z terms: sum_q weights[q] * Z_q."""

    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        if not np.all(np.isfinite(w)):
            raise StructuralError("observable weights must be finite")
        object.__setattr__(self, "weights", w)


def init_zero_state(n_qubits: int) -> StateVector:
    """All-zeros computational basis state |0...0>."""
    if not isinstance(n_qubits, (int, np.integer)) or not 1 <= n_qubits <= MAX_QUBITS:
        raise ConfigurationError(
            f"n_qubits must be an integer in [1, {MAX_QUBITS}], got {n_qubits!r}"
        )
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(int(n_qubits), amps)


@lru_cache(maxsize=32)
def _z_sign_matrix(n_qubits: int) -> np.ndarray:
    """(2**n, n) matrix of +1/-1: sign of Z_q on each basis state."""
    idx = np.arange(1 << n_qubits)
    bits = (idx[:, None] >> np.arange(n_qubits)[None, :]) & 1
    signs = 1.0 - 2.0 * bits
    signs.setflags(write=False)
    return signs


def _check_indices(n_qubits: int, target: int, control: int | None) -> None:
    if not 0 <= target < n_qubits:
        raise StructuralError(f"target {target} out of range for {n_qubits} qubits")
    if control is not None and not 0 <= control < n_qubits:
        raise StructuralError(f"control {control} out of range for {n_qubits} qubits")


def _target_views(amps: np.ndarray, target: int, control: int | None):
    """Views of the two target-bit slices of a (batch, 2**n) array.

    With a control, the views cover only the control=1 subspace.  Both views
    share the input buffer, so assigning into them updates ``amps``.
    """
    b = amps.shape[0]
    if control is None:
        v = amps.reshape(b, -1, 2, 1 << target)
        return v[:, :, 0, :], v[:, :, 1, :]
    hi, lo = (control, target) if control > target else (target, control)
    mid = (1 << hi) >> (lo + 1)
    v = amps.reshape(b, -1, 2, mid, 2, 1 << lo)
    if control > target:
        return v[:, :, 1, :, 0, :], v[:, :, 1, :, 1, :]
    return v[:, :, 0, :, 1, :], v[:, :, 1, :, 1, :]


def _bcast(factor, ndim: int):
    """Reshape a (batch,) factor so it broadcasts over a view of `ndim` axes."""
    if np.ndim(factor) == 0:
        return factor
    return factor.reshape(factor.shape[0], *(1,) * (ndim - 1))


def _apply_rotation(
    amps: np.ndarray,
    kind: GateKind,
    target: int,
    control: int | None,
    angle,
    inverse: bool = False,
) -> None:
    """In-place (controlled) rotation on batched amplitudes.

    ``angle`` is a scalar shared across the batch or a (batch,) array of
    per-row angles.
    """
    half = np.multiply(angle, -0.5 if inverse else 0.5)
    c, s = np.cos(half), np.sin(half)
    a0, a1 = _target_views(amps, target, control)
    c = _bcast(c, a0.ndim)
    s = _bcast(s, a0.ndim)
    axis = kind.axis
    if axis == "z":
        phase = c - 1j * s
        a0 *= phase
        a1 *= np.conj(phase)
    elif axis == "y":
        t0 = c * a0 - s * a1
        t1 = s * a0 + c * a1
        a0[...] = t0
        a1[...] = t1
    else:  # x
        t0 = c * a0 - 1j * (s * a1)
        t1 = -1j * (s * a0) + c * a1
        a0[...] = t0
        a1[...] = t1


def _pauli_overlap_im(
    lam: np.ndarray, amps: np.ndarray, kind: GateKind, target: int, control: int | None
) -> np.ndarray:
    """Im <lam | P | amps> per batch row, with P the gate's generator Pauli
    restricted to the control=1 subspace for controlled kinds."""
    l0, l1 = _target_views(lam, target, control)
    p0, p1 = _target_views(amps, target, control)
    axes = tuple(range(1, l0.ndim))
    axis = kind.axis
    if axis == "x":
        inner = np.sum(np.conj(l0) * p1, axis=axes) + np.sum(np.conj(l1) * p0, axis=axes)
    elif axis == "y":
        inner = 1j * (np.sum(np.conj(l1) * p0, axis=axes) - np.sum(np.conj(l0) * p1, axis=axes))
    else:
        inner = np.sum(np.conj(l0) * p0, axis=axes) - np.sum(np.conj(l1) * p1, axis=axes)
    return np.imag(inner)


# Internal batched circuit representation: list of
# (kind, target, control, angle, trainable_slot) with angle a scalar or a
# (batch,) array.  GateOp lists convert 1:1.  Batched amplitudes are kept
# transposed, shape (2**n, batch), so the JIT kernels stream contiguous
# batch vectors per basis pair.

BatchOp = tuple


def as_batch_ops(gates: list[GateOp]) -> list[BatchOp]:
    return [(g.kind, g.target, g.control, g.angle, g.trainable_slot) for g in gates]


def _half_trig(angle, batch: int, sign: float) -> tuple[np.ndarray, np.ndarray]:
    """cos/sin of sign*angle/2 as (batch,) arrays for the kernels."""
    half = np.multiply(angle, 0.5 * sign)
    c, s = np.cos(half), np.sin(half)
    if np.ndim(c) == 0:
        return np.full(batch, c), np.full(batch, s)
    return np.ascontiguousarray(c), np.ascontiguousarray(s)


def run_ops(n_qubits: int, ops: list[BatchOp], batch: int) -> np.ndarray:
    """Run a gate sequence on a fresh |0...0> batch; returns (2**n, batch)."""
    amps = np.zeros((1 << n_qubits, batch), dtype=np.complex128)
    amps[0, :] = 1.0
    for kind, target, control, angle, _slot in ops:
        _check_indices(n_qubits, target, control)
        c, s = _half_trig(angle, batch, 1.0)
        ROT[kind.axis](amps, pair_indices(n_qubits, target, control), 1 << target, c, s)
    return amps


def z_expectations(amps: np.ndarray, n_qubits: int) -> np.ndarray:
    """Per-qubit <Z_q> for each batch row; shape (batch, n_qubits)."""
    probs = amps.real * amps.real + amps.imag * amps.imag
    return probs.T @ _z_sign_matrix(n_qubits)


def adjoint_backward(
    amps: np.ndarray, n_qubits: int, ops: list[BatchOp], obs_weights: np.ndarray, n_slots: int
) -> np.ndarray:
    """Backward adjoint sweep over an already-run batch.

    ``amps`` must be the final (2**n, batch) state of ``run_ops``; it is
    consumed (the sweep rewinds it to |0...0>).  ``obs_weights`` has shape
    (batch, n_qubits); each row defines the Z-sum observable differentiated
    for that batch row, and the returned (n_slots,) gradient is summed over
    the batch, so any per-row scaling (for example batch averaging) goes
    into the weights.
    """
    signs = _z_sign_matrix(n_qubits)
    lam = (signs @ obs_weights.T) * amps
    batch = amps.shape[1]
    grads = np.zeros(n_slots)
    for kind, target, control, angle, slot in reversed(ops):
        idx0 = pair_indices(n_qubits, target, control)
        tmask = 1 << target
        c, s = _half_trig(angle, batch, -1.0)
        rot = ROT[kind.axis]
        rot(amps, idx0, tmask, c, s)
        rot(lam, idx0, tmask, c, s)
        if slot is not None:
            grads[slot] = np.sum(OVL[kind.axis](lam, amps, idx0, tmask))
    return grads


def apply_gate(state: StateVector, gate: GateOp) -> StateVector:
    """Apply one gate, returning a new StateVector."""
    _check_indices(state.n_qubits, gate.target, gate.control)
    amps = state.amplitudes[None, :].copy()
    _apply_rotation(amps, gate.kind, gate.target, gate.control, gate.angle)
    return StateVector(state.n_qubits, amps[0])


def expectation_z(state: StateVector, qubit: int) -> float:
    """Exact <Z_qubit> of a normalized state."""
    if not 0 <= qubit < state.n_qubits:
        raise StructuralError(f"qubit {qubit} out of range for {state.n_qubits} qubits")
    a = state.amplitudes
    probs = a.real * a.real + a.imag * a.imag
    return float(probs @ _z_sign_matrix(state.n_qubits)[:, qubit])


def expectation_zsum(state: StateVector, observable: ZSumObservable) -> float:
    """Exact expectation of a Z-sum observable."""
    w = observable.weights
    if w.shape != (state.n_qubits,):
        raise StructuralError(
            f"observable has {w.shape[0]} weights for {state.n_qubits} qubits"
        )
    a = state.amplitudes
    probs = a.real * a.real + a.imag * a.imag
    return float(probs @ (_z_sign_matrix(state.n_qubits) @ w))


def adjoint_gradient(
    gates: list[GateOp], observable: ZSumObservable, n_qubits: int
) -> tuple[float, np.ndarray]:
    """Expectation of a Z-sum observable and its exact angle gradients.

    Returns ``(expectation, gradient)`` where ``gradient[k]`` is
    d<O>/d(angle) for the gate carrying ``trainable_slot == k``.  Cost is one
    forward and one backward sweep regardless of the number of parameters.
    """
    w = np.asarray(observable.weights, dtype=float)
    if w.shape != (n_qubits,):
        raise StructuralError(f"observable has {w.shape} weights for {n_qubits} qubits")
    slots = [g.trainable_slot for g in gates if g.trainable_slot is not None]
    if len(slots) != len(set(slots)):
        raise StructuralError("trainable slots must be unique")
    n_slots = max(slots) + 1 if slots else 0
    ops = as_batch_ops(gates)
    amps = run_ops(n_qubits, ops, batch=1)
    probs = amps.real * amps.real + amps.imag * amps.imag
    expectation = float(probs[:, 0] @ (_z_sign_matrix(n_qubits) @ w))
    grads = adjoint_backward(amps, n_qubits, ops, w[None, :], n_slots)
    return expectation, grads
