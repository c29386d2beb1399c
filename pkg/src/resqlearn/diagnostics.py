"""Gradient-variance probe across qubit and layer counts.

Each sweep cell draws fresh random modules whose effective circuit angles
are uniform on (-pi, pi) (sampled through the squash inverse, so the probe
measures the circuit family rather than the raw-parameter prior), holds
the readout fixed at weights 1 / bias 0, and records the unbiased
variance of one fixed gradient component: d(batch MSE)/d(raw slot 0), the
first rotation of layer 1 on qubit 0.  Reference curves c1/n and
c2*exp(-n/2) are anchored through the smallest-qubit point at the largest
layer count; they are visual guides, not fits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import CircuitConfig, EncodingMode
from .datagen import DEFAULT_COMPONENTS, target_function
from .errors import ConfigurationError
from .model import QuantumModule, forward_backward_batch
from .runio import write_csv


@dataclass(frozen=True)
class BarrenConfig:
    qubit_values: tuple[int, ...] = tuple(range(2, 11))
    layer_values: tuple[int, ...] = tuple(range(1, 5))
    n_inits: int = 100
    probe_batch: int = 32
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.qubit_values or not self.layer_values:
            raise ConfigurationError("qubit_values and layer_values must be non-empty")
        if self.n_inits < 2:
            raise ConfigurationError(f"n_inits must be >= 2, got {self.n_inits}")
        if self.probe_batch < 1:
            raise ConfigurationError(f"probe_batch must be >= 1, got {self.probe_batch}")
        object.__setattr__(self, "qubit_values", tuple(int(q) for q in self.qubit_values))
        object.__setattr__(self, "layer_values", tuple(int(l) for l in self.layer_values))


@dataclass(frozen=True)
class VarianceRecord:
    n_qubits: int
    n_layers: int
    grad_variance: float
    n_inits: int


@dataclass(frozen=True)
class ReferencePoint:
    n_qubits: int
    poly_ref: float
    exp_ref: float


def sample_probe_init(config: CircuitConfig, seed) -> QuantumModule:
    """Module with effective angles uniform on the open interval
    (-pi, pi): raw = atanh(u) for u ~ U(-1, 1), endpoints excluded."""
    from .circuit import ParameterLayout

    total = ParameterLayout.for_config(config).total_count
    rng = np.random.default_rng(seed)
    u = rng.uniform(-1.0, 1.0, total)
    while np.any(np.abs(u) >= 1.0):  # uniform() can return the lower endpoint
        redraw = np.abs(u) >= 1.0
        u[redraw] = rng.uniform(-1.0, 1.0, int(np.sum(redraw)))
    return QuantumModule(config, np.arctanh(u), np.ones(config.n_qubits), 0.0)


def _probe_data(config: BarrenConfig) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(config.seed)
    xs = rng.uniform(0.0, 2.0, config.probe_batch)
    return xs[:, None], target_function(DEFAULT_COMPONENTS, xs)


def gradient_variance(
    n_qubits: int,
    n_layers: int,
    config: BarrenConfig,
    encoding_mode: EncodingMode = EncodingMode.FULL,
) -> VarianceRecord:
    """Unbiased variance of the probed gradient component over n_inits
    random modules, on a probe batch fixed by the sweep seed."""
    circuit = CircuitConfig(n_qubits, n_layers, input_dim=1, encoding_mode=encoding_mode)
    features, targets = _probe_data(config)
    samples = np.empty(config.n_inits)
    for i in range(config.n_inits):
        seed = np.random.SeedSequence([int(config.seed), int(n_qubits), int(n_layers), i])
        module = sample_probe_init(circuit, seed)
        _, grads = forward_backward_batch(module, features, targets)
        samples[i] = grads.raw_params[0]
    return VarianceRecord(n_qubits, n_layers, float(np.var(samples, ddof=1)), config.n_inits)


def run_barren_sweep(
    config: BarrenConfig,
) -> tuple[list[VarianceRecord], list[ReferencePoint]]:
    """One record per (qubits, layers) cell plus anchored reference curves."""
    records = [
        gradient_variance(n, layers, config)
        for n in config.qubit_values
        for layers in config.layer_values
    ]
    n0 = min(config.qubit_values)
    l_max = max(config.layer_values)
    anchor = next(
        r.grad_variance for r in records if r.n_qubits == n0 and r.n_layers == l_max
    )
    c_poly = anchor * n0
    c_exp = anchor * np.exp(0.5 * n0)
    references = [
        ReferencePoint(n, c_poly / n, float(c_exp * np.exp(-0.5 * n)))
        for n in sorted(set(config.qubit_values))
    ]
    return records, references


BARREN_HEADER = ["n_qubits", "n_layers", "grad_variance", "n_inits"]
REFERENCE_HEADER = ["n_qubits", "poly_ref", "exp_ref"]


def write_barren_csv(records: list[VarianceRecord], path) -> None:
    write_csv(
        path,
        BARREN_HEADER,
        [(r.n_qubits, r.n_layers, r.grad_variance, r.n_inits) for r in records],
    )


def write_reference_csv(references: list[ReferencePoint], path) -> None:
    write_csv(path, REFERENCE_HEADER, [(r.n_qubits, r.poly_ref, r.exp_ref) for r in references])
