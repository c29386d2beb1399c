"""End-to-end smoke suite: drive the result-producing command line at a
tiny scale, then render every figure kind from the files it wrote.

Covers: every kind produces a nonempty image; the frequency-bars figure
draws groups x (1 true + stages) bars; the variance figure overlays both
reference curves and uses a log y-axis.
"""

import csv
import subprocess
import sys

import pytest

from resqfigures.render import FigureJob, FigureKind, render

TINY = [
    "--n-total", "60", "--n-qubits", "2", "--n-layers", "1",
    "--epochs-per-stage", "1", "--n-stages", "2", "--n-points", "128",
]


def run_cli(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "resqlearn.cli", *args],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="module")
def results(tmp_path_factory):
    root = tmp_path_factory.mktemp("runs")
    base = ["--output-dir", str(root)]
    run_cli("train", *base, "--run-id", "train", *TINY)
    run_cli("baseline", *base, "--run-id", "baseline", *TINY)
    run_cli(
        "sweep-qubits", *base, "--run-id", "sweep", *TINY,
        "--qubit-values", "2,3", "--sweep-seeds", "0,1",
    )
    run_cli(
        "barren", *base, "--run-id", "barren",
        "--qubit-values", "2,3", "--layer-values", "1,2",
        "--n-inits", "3", "--probe-batch", "4",
    )
    return root


def render_ok(results, kind, inputs, name):
    out = results / "figs" / name
    result = render(FigureJob(kind, tuple(str(p) for p in inputs), str(out)))
    assert result.output.exists()
    assert result.output.stat().st_size > 0
    return result


def test_data_regions_smoke(results):
    render_ok(results, FigureKind.DATA_REGIONS, [results / "train" / "dataset.csv"], "regions.png")


def test_qubit_mse_smoke(results):
    render_ok(results, FigureKind.QUBIT_MSE, [results / "sweep" / "sweep.csv"], "qubit_mse.png")


def test_baseline_compare_smoke(results):
    render_ok(
        results,
        FigureKind.BASELINE_COMPARE,
        [results / "train" / "stage_log.csv", results / "baseline" / "stage_log.csv"],
        "baseline.png",
    )


def test_freq_bars_smoke_counts_bars(results):
    path = results / "train" / "freq_bars.csv"
    result = render_ok(results, FigureKind.FREQ_BARS, [path], "freq_bars.png")
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    groups = {row["target_freq"] for row in rows}
    stages = {row["stage"] for row in rows}
    assert result.meta["n_bars"] == len(groups) * (1 + len(stages))
    assert result.meta["n_bars"] == 5 * (1 + 2)


def test_residual_spectrum_smoke(results):
    result = render_ok(
        results, FigureKind.RESIDUAL_SPECTRUM, [results / "train" / "spectrum.csv"], "spectrum.png"
    )
    assert result.meta["n_stages"] == 2


def test_barren_smoke_has_references(results):
    result = render_ok(
        results,
        FigureKind.BARREN,
        [results / "barren" / "barren.csv", results / "barren" / "barren_reference.csv"],
        "barren.png",
    )
    assert result.meta["n_reference_curves"] == 2
    assert result.meta["y_scale"] == "log"


def test_stage_panel_smoke(results):
    result = render_ok(
        results, FigureKind.STAGE_PANEL, [results / "train" / "grid_predictions.csv"], "panel.png"
    )
    assert result.meta["n_stages"] == 2
