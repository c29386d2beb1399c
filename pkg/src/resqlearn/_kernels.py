"""JIT gate kernels for the batched statevector engine.

Batched amplitudes are stored transposed, shape (2**n, batch), so every
basis-pair update and overlap reduction runs over a contiguous batch
vector regardless of which qubit the gate targets.  Each kernel takes the
precomputed list of basis indices whose target bit is 0 (restricted to the
control=1 subspace for controlled gates); the partner index is
``j | tmask``.

``c`` and ``s`` are cos(theta/2), sin(theta/2) per batch row; inverses
pass ``-s``.  Overlap kernels accumulate in a fixed order (basis-pair
outer, batch inner), so results are deterministic across runs.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, fastmath=True)
def rot_y(amps, idx0, tmask, c, s):
    for k in range(idx0.size):
        j0 = idx0[k]
        j1 = j0 + tmask
        for b in range(amps.shape[1]):
            a0 = amps[j0, b]
            a1 = amps[j1, b]
            amps[j0, b] = c[b] * a0 - s[b] * a1
            amps[j1, b] = s[b] * a0 + c[b] * a1


@njit(cache=True, fastmath=True)
def rot_x(amps, idx0, tmask, c, s):
    for k in range(idx0.size):
        j0 = idx0[k]
        j1 = j0 + tmask
        for b in range(amps.shape[1]):
            a0 = amps[j0, b]
            a1 = amps[j1, b]
            amps[j0, b] = c[b] * a0 - 1j * (s[b] * a1)
            amps[j1, b] = c[b] * a1 - 1j * (s[b] * a0)


@njit(cache=True, fastmath=True)
def rot_z(amps, idx0, tmask, c, s):
    for k in range(idx0.size):
        j0 = idx0[k]
        j1 = j0 + tmask
        for b in range(amps.shape[1]):
            amps[j0, b] = amps[j0, b] * complex(c[b], -s[b])
            amps[j1, b] = amps[j1, b] * complex(c[b], s[b])


@njit(cache=True, fastmath=True)
def ovl_y(lam, amps, idx0, tmask):
    """Im <lam| Y |amps> per batch row: Im(i * (<l1|p0> - <l0|p1>))."""
    nb = amps.shape[1]
    acc = np.zeros(nb, dtype=np.complex128)
    for k in range(idx0.size):
        j0 = idx0[k]
        j1 = j0 + tmask
        for b in range(nb):
            acc[b] += np.conj(lam[j1, b]) * amps[j0, b] - np.conj(lam[j0, b]) * amps[j1, b]
    out = np.empty(nb)
    for b in range(nb):
        out[b] = acc[b].real
    return out


@njit(cache=True, fastmath=True)
def ovl_x(lam, amps, idx0, tmask):
    """Im <lam| X |amps> per batch row."""
    nb = amps.shape[1]
    acc = np.zeros(nb, dtype=np.complex128)
    for k in range(idx0.size):
        j0 = idx0[k]
        j1 = j0 + tmask
        for b in range(nb):
            acc[b] += np.conj(lam[j0, b]) * amps[j1, b] + np.conj(lam[j1, b]) * amps[j0, b]
    out = np.empty(nb)
    for b in range(nb):
        out[b] = acc[b].imag
    return out


@njit(cache=True, fastmath=True)
def ovl_z(lam, amps, idx0, tmask):
    """Im <lam| Z |amps> per batch row."""
    nb = amps.shape[1]
    acc = np.zeros(nb, dtype=np.complex128)
    for k in range(idx0.size):
        j0 = idx0[k]
        j1 = j0 + tmask
        for b in range(nb):
            acc[b] += np.conj(lam[j0, b]) * amps[j0, b] - np.conj(lam[j1, b]) * amps[j1, b]
    out = np.empty(nb)
    for b in range(nb):
        out[b] = acc[b].imag
    return out


ROT = {"x": rot_x, "y": rot_y, "z": rot_z}
OVL = {"x": ovl_x, "y": ovl_y, "z": ovl_z}

_INDEX_CACHE: dict[tuple[int, int, int | None], np.ndarray] = {}


def pair_indices(n_qubits: int, target: int, control: int | None) -> np.ndarray:
    """Ascending basis indices with target bit 0 (and control bit 1 if set)."""
    key = (n_qubits, target, control)
    cached = _INDEX_CACHE.get(key)
    if cached is None:
        idx = np.arange(1 << n_qubits)
        mask = (idx >> target) & 1 == 0
        if control is not None:
            mask &= (idx >> control) & 1 == 1
        cached = np.ascontiguousarray(idx[mask], dtype=np.int64)
        cached.setflags(write=False)
        _INDEX_CACHE[key] = cached
    return cached
