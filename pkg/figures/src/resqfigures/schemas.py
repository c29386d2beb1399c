"""CSV schema contracts for the result files this package plots.

Headers are matched column by column so an error can name exactly which
column broke the contract.  Stage-indexed files (spectrum, grid
predictions) carry a variable number of ``*_s<stage>`` columns; the
stage count is recovered from the header and validated for contiguity.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np


class SchemaError(Exception):
    """An input file does not match its documented schema."""


DATASET_HEADER = ["x", "y", "split", "dominant"]
SWEEP_HEADER = ["n_qubits", "seed", "stage", "test_mse", "baseline_mse", "rel_improvement"]
STAGE_LOG_HEADER = ["stage", "epoch", "train_mse", "val_mse"]
FREQ_BARS_HEADER = ["target_freq", "true_amp", "stage", "pred_amp"]
BARREN_HEADER = ["n_qubits", "n_layers", "grad_variance", "n_inits"]
REFERENCE_HEADER = ["n_qubits", "poly_ref", "exp_ref"]


def load_rows(path) -> tuple[list[str], list[list[str]]]:
    p = Path(path)
    if not p.exists():
        raise SchemaError(f"input file not found: {p}")
    with open(p, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{p}: empty file, expected a header row")
        rows = list(reader)
    for i, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise SchemaError(f"{p}: line {i} has {len(row)} fields, header has {len(header)}")
    return header, rows


def check_header(header: list[str], expected: list[str], path) -> None:
    for got, want in zip(header, expected):
        if got != want:
            raise SchemaError(f"{path}: unexpected column {got!r} (wanted {want!r})")
    if len(header) < len(expected):
        raise SchemaError(f"{path}: missing column {expected[len(header)]!r}")
    if len(header) > len(expected):
        raise SchemaError(f"{path}: unexpected column {header[len(expected)]!r}")


def staged_names(prefix: str, n_stages: int) -> list[str]:
    return [f"{prefix}{s}" for s in range(1, n_stages + 1)]


def check_staged_header(header: list[str], fixed: list[str], prefixes: list[str], path) -> int:
    """Validate ``fixed`` columns then ``len(prefixes)`` stage blocks;
    returns the stage count."""
    check_header(header[: len(fixed)], fixed, path)
    rest = len(header) - len(fixed)
    if rest <= 0 or rest % len(prefixes) != 0:
        raise SchemaError(
            f"{path}: expected {len(prefixes)} stage column blocks after {fixed}, got {rest} columns"
        )
    n_stages = rest // len(prefixes)
    expected = list(fixed)
    for prefix in prefixes:
        expected += staged_names(prefix, n_stages)
    check_header(header, expected, path)
    return n_stages


def float_column(rows: list[list[str]], index: int, name: str, path) -> np.ndarray:
    try:
        return np.array([float(row[index]) for row in rows])
    except ValueError as exc:
        raise SchemaError(f"{path}: column {name!r} has a non-numeric value ({exc})") from exc


def int_column(rows: list[list[str]], index: int, name: str, path) -> np.ndarray:
    try:
        return np.array([int(row[index]) for row in rows])
    except ValueError as exc:
        raise SchemaError(f"{path}: column {name!r} has a non-integer value ({exc})") from exc


def read_dataset(path) -> dict:
    header, rows = load_rows(path)
    check_header(header, DATASET_HEADER, path)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return {
        "x": float_column(rows, 0, "x", path),
        "y": float_column(rows, 1, "y", path),
        "split": [row[2] for row in rows],
        "dominant": int_column(rows, 3, "dominant", path),
    }


def read_sweep(path) -> dict:
    header, rows = load_rows(path)
    check_header(header, SWEEP_HEADER, path)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return {
        "n_qubits": int_column(rows, 0, "n_qubits", path),
        "seed": int_column(rows, 1, "seed", path),
        "stage": int_column(rows, 2, "stage", path),
        "test_mse": float_column(rows, 3, "test_mse", path),
        "baseline_mse": float_column(rows, 4, "baseline_mse", path),
        "rel_improvement": float_column(rows, 5, "rel_improvement", path),
    }


def read_stage_log(path) -> dict:
    header, rows = load_rows(path)
    check_header(header, STAGE_LOG_HEADER, path)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return {
        "stage": int_column(rows, 0, "stage", path),
        "epoch": int_column(rows, 1, "epoch", path),
        "train_mse": float_column(rows, 2, "train_mse", path),
        "val_mse": float_column(rows, 3, "val_mse", path),
    }


def read_freq_bars(path) -> dict:
    header, rows = load_rows(path)
    check_header(header, FREQ_BARS_HEADER, path)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return {
        "target_freq": float_column(rows, 0, "target_freq", path),
        "true_amp": float_column(rows, 1, "true_amp", path),
        "stage": int_column(rows, 2, "stage", path),
        "pred_amp": float_column(rows, 3, "pred_amp", path),
    }


def read_spectrum(path) -> dict:
    header, rows = load_rows(path)
    n_stages = check_staged_header(header, ["freq_hz", "amp_true"], ["amp_pred_s", "amp_resid_s"], path)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    out = {
        "n_stages": n_stages,
        "freq_hz": float_column(rows, 0, "freq_hz", path),
        "amp_true": float_column(rows, 1, "amp_true", path),
        "amp_pred": [],
        "amp_resid": [],
    }
    for s in range(n_stages):
        out["amp_pred"].append(float_column(rows, 2 + s, f"amp_pred_s{s + 1}", path))
        out["amp_resid"].append(
            float_column(rows, 2 + n_stages + s, f"amp_resid_s{s + 1}", path)
        )
    return out


def read_grid_predictions(path) -> dict:
    header, rows = load_rows(path)
    n_stages = check_staged_header(header, ["x", "y_true"], ["pred_s"], path)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return {
        "n_stages": n_stages,
        "x": float_column(rows, 0, "x", path),
        "y_true": float_column(rows, 1, "y_true", path),
        "pred": [float_column(rows, 2 + s, f"pred_s{s + 1}", path) for s in range(n_stages)],
    }


def read_barren(path) -> dict:
    header, rows = load_rows(path)
    check_header(header, BARREN_HEADER, path)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return {
        "n_qubits": int_column(rows, 0, "n_qubits", path),
        "n_layers": int_column(rows, 1, "n_layers", path),
        "grad_variance": float_column(rows, 2, "grad_variance", path),
        "n_inits": int_column(rows, 3, "n_inits", path),
    }


def read_reference(path) -> dict:
    header, rows = load_rows(path)
    check_header(header, REFERENCE_HEADER, path)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return {
        "n_qubits": int_column(rows, 0, "n_qubits", path),
        "poly_ref": float_column(rows, 1, "poly_ref", path),
        "exp_ref": float_column(rows, 2, "exp_ref", path),
    }
