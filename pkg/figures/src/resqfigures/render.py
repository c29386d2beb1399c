"""Figure rendering: one entry point, seven figure kinds.

Every renderer draws exactly what its CSV holds.  Output is deterministic
for identical inputs: fixed style, fixed dpi, metadata stripped from the
saved image.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import schemas
from .schemas import SchemaError


class FigureKind(Enum):
    DATA_REGIONS = "data-regions"
    QUBIT_MSE = "qubit-mse"
    BASELINE_COMPARE = "baseline-compare"
    FREQ_BARS = "freq-bars"
    RESIDUAL_SPECTRUM = "residual-spectrum"
    BARREN = "barren"
    STAGE_PANEL = "stage-panel"


# required input files per kind; a trailing name in brackets is optional
_INPUTS: dict[FigureKind, tuple[list[str], list[str]]] = {
    FigureKind.DATA_REGIONS: (["dataset CSV"], []),
    FigureKind.QUBIT_MSE: (["sweep CSV"], []),
    FigureKind.BASELINE_COMPARE: (["staged-run log CSV", "baseline log CSV"], []),
    FigureKind.FREQ_BARS: (["frequency-bars CSV"], []),
    FigureKind.RESIDUAL_SPECTRUM: (["spectrum CSV"], []),
    FigureKind.BARREN: (["variance CSV"], ["reference-curve CSV"]),
    FigureKind.STAGE_PANEL: (["grid-predictions CSV"], []),
}

REGION_COLORS = ("tab:blue", "tab:orange", "tab:green", "tab:red", "tab:purple")
_DPI = 150


@dataclass(frozen=True)
class FigureJob:
    kind: FigureKind
    inputs: tuple[str, ...]
    output: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "inputs", tuple(str(p) for p in self.inputs))
        required, optional = _INPUTS[self.kind]
        lo, hi = len(required), len(required) + len(optional)
        if not lo <= len(self.inputs) <= hi:
            names = " + ".join(required + [f"[{o}]" for o in optional])
            raise SchemaError(
                f"{self.kind.value} needs {names}; got {len(self.inputs)} input(s)"
            )


@dataclass(frozen=True)
class RenderResult:
    output: Path
    meta: dict = field(default_factory=dict)


def _save(fig, output) -> Path:
    out = Path(output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=_DPI, metadata={"Software": None})
    plt.close(fig)
    return out


def _render_data_regions(job: FigureJob) -> RenderResult:
    data = schemas.read_dataset(job.inputs[0])
    regions = sorted(set(int(d) for d in data["dominant"]))
    fig, ax = plt.subplots(figsize=(8, 4))
    for region in regions:
        mask = data["dominant"] == region
        ax.scatter(
            data["x"][mask],
            data["y"][mask],
            s=4,
            color=REGION_COLORS[region % len(REGION_COLORS)],
            label=f"region {region}",
        )
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title("Samples by dominant frequency region")
    ax.legend(markerscale=3, fontsize=8)
    out = _save(fig, job.output)
    return RenderResult(out, {"n_points": int(data["x"].size), "n_regions": len(regions)})


def _render_qubit_mse(job: FigureJob) -> RenderResult:
    data = schemas.read_sweep(job.inputs[0])
    stages = sorted(set(int(s) for s in data["stage"]))
    qubit_counts = sorted(set(int(q) for q in data["n_qubits"]))
    fig, ax = plt.subplots(figsize=(6, 4))
    for stage in stages:
        means = []
        for n in qubit_counts:
            mask = (data["stage"] == stage) & (data["n_qubits"] == n)
            means.append(float(np.mean(data["test_mse"][mask])))
        ax.plot(qubit_counts, means, marker="o", label=f"stage {stage}")
    ax.set_xlabel("qubits")
    ax.set_ylabel("test MSE")
    ax.set_title("Test MSE per stage versus qubit count")
    ax.legend(fontsize=8)
    out = _save(fig, job.output)
    return RenderResult(out, {"n_stages": len(stages), "qubit_counts": qubit_counts})


def _stage_epoch_order(log: dict) -> np.ndarray:
    """Row order that walks a stage log stage by stage, epoch by epoch."""
    return np.lexsort((log["epoch"], log["stage"]))


def _render_baseline_compare(job: FigureJob) -> RenderResult:
    staged = schemas.read_stage_log(job.inputs[0])
    flat = schemas.read_stage_log(job.inputs[1])
    fig, ax = plt.subplots(figsize=(6, 4))
    order = _stage_epoch_order(staged)
    ax.plot(np.arange(1, order.size + 1), staged["val_mse"][order], label="staged")
    boundaries = np.flatnonzero(np.diff(staged["stage"][order])) + 1
    for b in boundaries:
        ax.axvline(b + 0.5, color="gray", linewidth=0.6, linestyle=":")
    order_f = _stage_epoch_order(flat)
    ax.plot(np.arange(1, order_f.size + 1), flat["val_mse"][order_f], label="baseline")
    ax.set_xlabel("epoch")
    ax.set_ylabel("validation MSE")
    ax.set_title("Staged training versus equal-budget baseline")
    ax.legend(fontsize=8)
    out = _save(fig, job.output)
    return RenderResult(
        out,
        {"staged_epochs": int(order.size), "baseline_epochs": int(order_f.size)},
    )


def _render_freq_bars(job: FigureJob) -> RenderResult:
    data = schemas.read_freq_bars(job.inputs[0])
    freqs = sorted(set(float(f) for f in data["target_freq"]))
    stages = sorted(set(int(s) for s in data["stage"]))
    n_series = 1 + len(stages)
    width = 0.8 / n_series
    fig, ax = plt.subplots(figsize=(7, 4))
    base = np.arange(len(freqs))
    true_amps = []
    for f in freqs:
        mask = data["target_freq"] == f
        true_amps.append(float(data["true_amp"][mask][0]))
    ax.bar(base - 0.4 + 0.5 * width, true_amps, width, label="true", color="black")
    n_bars = len(freqs)
    for k, stage in enumerate(stages, start=1):
        amps = []
        for f in freqs:
            mask = (data["target_freq"] == f) & (data["stage"] == stage)
            amps.append(float(data["pred_amp"][mask][0]))
        ax.bar(base - 0.4 + (k + 0.5) * width, amps, width, label=f"stage {stage}")
        n_bars += len(freqs)
    ax.set_xticks(base)
    ax.set_xticklabels([f"{f:g} Hz" for f in freqs])
    ax.set_ylabel("amplitude")
    ax.set_title("Amplitude at each target frequency")
    ax.legend(fontsize=8)
    out = _save(fig, job.output)
    return RenderResult(
        out, {"n_bars": n_bars, "n_groups": len(freqs), "n_stages": len(stages)}
    )


def _render_residual_spectrum(job: FigureJob) -> RenderResult:
    data = schemas.read_spectrum(job.inputs[0])
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(data["freq_hz"], data["amp_true"], color="black", linewidth=1.2, label="true")
    for s in range(data["n_stages"]):
        ax.plot(
            data["freq_hz"],
            data["amp_resid"][s],
            linewidth=0.9,
            label=f"residual after stage {s + 1}",
        )
    ax.set_xlabel("frequency (Hz)")
    ax.set_ylabel("amplitude")
    ax.set_xlim(0, min(25.0, float(data["freq_hz"][-1])))
    ax.set_title("Residual spectrum by stage")
    ax.legend(fontsize=8)
    out = _save(fig, job.output)
    return RenderResult(out, {"n_stages": data["n_stages"], "n_bins": int(data["freq_hz"].size)})


def _render_barren(job: FigureJob) -> RenderResult:
    data = schemas.read_barren(job.inputs[0])
    layer_counts = sorted(set(int(l) for l in data["n_layers"]))
    fig, ax = plt.subplots(figsize=(6, 4))
    for layers in layer_counts:
        mask = data["n_layers"] == layers
        qs = data["n_qubits"][mask]
        order = np.argsort(qs)
        ax.plot(qs[order], data["grad_variance"][mask][order], marker="o", label=f"{layers} layers")
    n_reference_curves = 0
    if len(job.inputs) > 1:
        refs = schemas.read_reference(job.inputs[1])
        order = np.argsort(refs["n_qubits"])
        ax.plot(refs["n_qubits"][order], refs["poly_ref"][order], "k--", linewidth=0.9, label="~1/n")
        ax.plot(refs["n_qubits"][order], refs["exp_ref"][order], "k:", linewidth=0.9, label="~exp(-n/2)")
        n_reference_curves = 2
    ax.set_yscale("log")
    ax.set_xlabel("qubits")
    ax.set_ylabel("gradient variance")
    ax.set_title("Gradient variance versus circuit size")
    ax.legend(fontsize=8)
    y_scale = ax.get_yaxis().get_scale()
    out = _save(fig, job.output)
    return RenderResult(
        out,
        {
            "y_scale": y_scale,
            "n_reference_curves": n_reference_curves,
            "n_cells": int(data["n_qubits"].size),
        },
    )


def _render_stage_panel(job: FigureJob) -> RenderResult:
    data = schemas.read_grid_predictions(job.inputs[0])
    n_stages = data["n_stages"]
    fig, axes = plt.subplots(
        n_stages, 1, figsize=(7, 2.2 * n_stages), sharex=True, squeeze=False
    )
    for s in range(n_stages):
        ax = axes[s][0]
        ax.plot(data["x"], data["y_true"], color="black", linewidth=0.8, label="target")
        ax.plot(data["x"], data["pred"][s], linewidth=0.9, label=f"after stage {s + 1}")
        ax.set_ylabel("y")
        ax.legend(fontsize=7, loc="upper right")
    axes[-1][0].set_xlabel("x")
    fig.suptitle("Cumulative prediction per stage")
    out = _save(fig, job.output)
    return RenderResult(out, {"n_stages": n_stages, "n_points": int(data["x"].size)})


_RENDERERS = {
    FigureKind.DATA_REGIONS: _render_data_regions,
    FigureKind.QUBIT_MSE: _render_qubit_mse,
    FigureKind.BASELINE_COMPARE: _render_baseline_compare,
    FigureKind.FREQ_BARS: _render_freq_bars,
    FigureKind.RESIDUAL_SPECTRUM: _render_residual_spectrum,
    FigureKind.BARREN: _render_barren,
    FigureKind.STAGE_PANEL: _render_stage_panel,
}


def render(job: FigureJob) -> RenderResult:
    return _RENDERERS[job.kind](job)
