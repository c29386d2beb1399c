"""One-sided amplitude spectra of grid-sampled signals and per-stage
residual analysis.

Normalization: a unit-amplitude sinusoid sitting exactly on a bin reads
amplitude 1.0.  With the default domain [0, 2) the bin spacing is 0.5 Hz,
so every benchmark frequency {0.5, 3, 7, 12, 20} lands on a bin and no
windowing is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, InputError
from .model import QuantumModule, forward_batch
from .runio import write_csv
from .training import ResidualEnsemble


@dataclass(frozen=True)
class GridSpec:
    x_min: float = 0.0
    x_max: float = 2.0
    n_points: int = 2000

    def __post_init__(self) -> None:
        if not self.x_max > self.x_min:
            raise ConfigurationError("grid needs x_max > x_min")
        if self.n_points < 2:
            raise ConfigurationError(f"n_points must be >= 2, got {self.n_points}")

    @property
    def span(self) -> float:
        return self.x_max - self.x_min

    @property
    def nyquist(self) -> float:
        return 0.5 * self.n_points / self.span


@dataclass(frozen=True)
class SpectrumReport:
    frequencies: np.ndarray
    amplitudes: np.ndarray


def dense_grid(spec: GridSpec) -> np.ndarray:
    """Uniform grid over [x_min, x_max); the right endpoint is excluded so
    bin frequencies are exact multiples of 1/span."""
    step = spec.span / spec.n_points
    return spec.x_min + step * np.arange(spec.n_points)


def amplitude_spectrum(values, spec: GridSpec) -> SpectrumReport:
    """One-sided amplitudes: A_0 = |X_0|/N, interior A_k = 2|X_k|/N, and
    A_{N/2} = |X_{N/2}|/N when N is even."""
    signal = np.asarray(values, dtype=float)
    if signal.shape != (spec.n_points,):
        raise InputError(f"expected {spec.n_points} samples, got shape {signal.shape}")
    n = spec.n_points
    transform = np.fft.rfft(signal)
    amps = np.abs(transform) / n
    amps[1:] *= 2.0
    if n % 2 == 0:
        amps[-1] /= 2.0
    freqs = np.arange(amps.size) / spec.span
    return SpectrumReport(freqs, amps)


def amplitude_at(report: SpectrumReport, target_freq: float) -> float:
    """Amplitude of the bin nearest to the target frequency.  Targets must
    not exceed the report's top bin (the Nyquist bin for even grids)."""
    freqs = report.frequencies
    if target_freq < 0 or target_freq > freqs[-1]:
        raise InputError(f"target frequency {target_freq} outside [0, {freqs[-1]}]")
    return float(report.amplitudes[int(np.argmin(np.abs(freqs - target_freq)))])


@dataclass
class StageSpectrum:
    stage: int
    grid_predictions: np.ndarray
    pred_spectrum: SpectrumReport
    residual_spectrum: SpectrumReport
    pred_amplitudes: list[float]


def stage_spectra(
    predictor, y_true_grid, spec: GridSpec, target_freqs
) -> list[StageSpectrum]:
    """Per-stage cumulative grid predictions and their spectra.

    ``predictor`` is a ResidualEnsemble or a single QuantumModule (treated
    as a one-stage chain).  ``y_true_grid`` must hold clean targets on
    dense_grid(spec).
    """
    modules = [predictor] if isinstance(predictor, QuantumModule) else predictor.modules
    y_true = np.asarray(y_true_grid, dtype=float)
    if y_true.shape != (spec.n_points,):
        raise InputError(f"expected {spec.n_points} grid targets, got shape {y_true.shape}")
    xs = dense_grid(spec)
    feats = xs[:, None]
    cumulative = np.zeros_like(xs)
    records = []
    for stage, module in enumerate(modules, start=1):
        out = forward_batch(module, feats)
        cumulative = cumulative + out
        feats = np.column_stack([xs, out])
        pred_spectrum = amplitude_spectrum(cumulative, spec)
        residual_spectrum = amplitude_spectrum(y_true - cumulative, spec)
        records.append(
            StageSpectrum(
                stage,
                cumulative.copy(),
                pred_spectrum,
                residual_spectrum,
                [amplitude_at(pred_spectrum, f) for f in target_freqs],
            )
        )
    return records


def spectrum_csv_header(n_stages: int) -> list[str]:
    return (
        ["freq_hz", "amp_true"]
        + [f"amp_pred_s{s}" for s in range(1, n_stages + 1)]
        + [f"amp_resid_s{s}" for s in range(1, n_stages + 1)]
    )


def write_spectrum_csv(true_report: SpectrumReport, records: list[StageSpectrum], path) -> None:
    rows = []
    for k in range(true_report.frequencies.size):
        row = [float(true_report.frequencies[k]), float(true_report.amplitudes[k])]
        row += [float(r.pred_spectrum.amplitudes[k]) for r in records]
        row += [float(r.residual_spectrum.amplitudes[k]) for r in records]
        rows.append(row)
    write_csv(path, spectrum_csv_header(len(records)), rows)


FREQ_BARS_HEADER = ["target_freq", "true_amp", "stage", "pred_amp"]


def write_freq_bars_csv(
    target_freqs, true_report: SpectrumReport, records: list[StageSpectrum], path
) -> None:
    rows = []
    for i, freq in enumerate(target_freqs):
        true_amp = amplitude_at(true_report, freq)
        for record in records:
            rows.append([float(freq), true_amp, record.stage, record.pred_amplitudes[i]])
    write_csv(path, FREQ_BARS_HEADER, rows)


def write_grid_predictions_csv(xs, y_true, records: list[StageSpectrum], path) -> None:
    header = ["x", "y_true"] + [f"pred_s{r.stage}" for r in records]
    rows = []
    for k in range(len(xs)):
        rows.append(
            [float(xs[k]), float(y_true[k])] + [float(r.grid_predictions[k]) for r in records]
        )
    write_csv(path, header, rows)
