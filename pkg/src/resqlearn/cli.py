"""Config-driven command line runner.

One flat key=value namespace covers dataset, circuit, training, spectral
grid, and variance-probe settings; every key can come from a config file
or a same-named flag (flag wins).  Each subcommand writes its result
files into ``output_dir/run_id`` and finishes with a checksum manifest,
written last so a manifest always describes complete files.

Exit codes: 0 success, 1 invalid configuration or input, 2 runtime
failure, 3 sweep finished with some failed cells.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, fields, replace
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .circuit import CircuitConfig, EncodingMode
from .datagen import (
    DEFAULT_COMPONENTS,
    DatasetSpec,
    Envelope,
    FrequencyComponent,
    generate_dataset,
    read_dataset_csv,
    target_function,
    write_dataset_csv,
)
from .diagnostics import (
    BarrenConfig,
    run_barren_sweep,
    write_barren_csv,
    write_reference_csv,
)
from .errors import ConfigurationError, InputError, ResqError
from .model import save_checkpoint
from .runio import fmt_value, write_csv, write_manifest
from .spectral import (
    GridSpec,
    amplitude_spectrum,
    dense_grid,
    stage_spectra,
    write_freq_bars_csv,
    write_grid_predictions_csv,
    write_spectrum_csv,
)
from .training import TrainConfig, train_baseline, train_residual, write_stage_log_csv, write_stage_summary_csv

_DEF_FREQS = tuple(c.omega for c in DEFAULT_COMPONENTS)
_DEF_CENTERS = tuple(c.center for c in DEFAULT_COMPONENTS)
_DEF_WIDTHS = tuple(c.width for c in DEFAULT_COMPONENTS)
_DEF_AMPS = tuple(c.amplitude for c in DEFAULT_COMPONENTS)
_DEF_ENVELOPES = tuple(c.envelope.value for c in DEFAULT_COMPONENTS)


@dataclass(frozen=True)
class RunConfig:
    """Union of every module's settings plus run plumbing.

    The frequency-component table is flattened into five parallel lists
    so it stays editable in a plain-text config; split_fractions is a
    three-value list.  qubit_values doubles as the qubit list for both
    the variance probe and the qubit sweep.
    """

    # dataset
    component_freqs: tuple[float, ...] = _DEF_FREQS
    component_centers: tuple[float, ...] = _DEF_CENTERS
    component_widths: tuple[float, ...] = _DEF_WIDTHS
    component_amps: tuple[float, ...] = _DEF_AMPS
    component_envelopes: tuple[str, ...] = _DEF_ENVELOPES
    n_total: int = 5000
    x_min: float = 0.0
    x_max: float = 2.0
    noise_sigma: float = 0.0
    split_fractions: tuple[float, ...] = (0.7, 0.15, 0.15)
    seed: int = 0
    # circuit
    n_qubits: int = 6
    n_layers: int = 2
    encoding_mode: str = "full"
    # training
    batch_size: int = 64
    learning_rate: float = 0.005
    epochs_per_stage: int = 25
    n_stages: int = 4
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    # spectral grid
    n_points: int = 2000
    # variance probe / qubit sweep
    qubit_values: tuple[int, ...] = tuple(range(2, 11))
    layer_values: tuple[int, ...] = (1, 2, 3, 4)
    n_inits: int = 100
    probe_batch: int = 32
    sweep_seeds: tuple[int, ...] = (0, 1, 2)
    # run plumbing
    output_dir: str = "runs"
    run_id: str = "run"
    dataset_file: str = ""

    def __post_init__(self) -> None:
        for f in fields(self):
            if f.type.startswith("tuple"):
                object.__setattr__(self, f.name, tuple(getattr(self, f.name)))
        if not self.run_id:
            raise ConfigurationError("run_id must be non-empty")
        # build every sub-config so all fields are validated up front
        self.to_dataset_spec()
        self.to_circuit_config()
        self.to_train_config()
        self.to_grid_spec()
        self.to_barren_config()

    def to_dataset_spec(self) -> DatasetSpec:
        lists = (
            self.component_freqs,
            self.component_centers,
            self.component_widths,
            self.component_amps,
            self.component_envelopes,
        )
        if len({len(l) for l in lists}) != 1:
            raise ConfigurationError("component_* lists must all have the same length")
        try:
            envelopes = [Envelope(name) for name in self.component_envelopes]
        except ValueError as exc:
            raise ConfigurationError(f"component_envelopes: {exc}") from exc
        comps = tuple(
            FrequencyComponent(f, c, w, a, e)
            for f, c, w, a, e in zip(*lists[:4], envelopes)
        )
        return DatasetSpec(
            components=comps,
            n_total=self.n_total,
            x_min=self.x_min,
            x_max=self.x_max,
            noise_sigma=self.noise_sigma,
            split_fractions=tuple(self.split_fractions),
            seed=self.seed,
        )

    def to_circuit_config(self, input_dim: int = 1) -> CircuitConfig:
        try:
            mode = EncodingMode(self.encoding_mode)
        except ValueError as exc:
            raise ConfigurationError(f"encoding_mode: {exc}") from exc
        return CircuitConfig(self.n_qubits, self.n_layers, input_dim, mode)

    def to_train_config(self) -> TrainConfig:
        return TrainConfig(
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            epochs_per_stage=self.epochs_per_stage,
            n_stages=self.n_stages,
            adam_beta1=self.adam_beta1,
            adam_beta2=self.adam_beta2,
            adam_epsilon=self.adam_epsilon,
            seed=self.seed,
        )

    def to_grid_spec(self) -> GridSpec:
        return GridSpec(self.x_min, self.x_max, self.n_points)

    def to_barren_config(self) -> BarrenConfig:
        return BarrenConfig(
            qubit_values=self.qubit_values,
            layer_values=self.layer_values,
            n_inits=self.n_inits,
            probe_batch=self.probe_batch,
            seed=self.seed,
        )


def _parse_int(text: str) -> int:
    return int(text)


def _parse_float(text: str) -> float:
    return float(text)


def _parse_str(text: str) -> str:
    return text


def _split_items(text: str) -> list[str]:
    items = [part.strip() for part in text.split(",") if part.strip()]
    if not items:
        raise ValueError("empty list")
    return items


def _parse_int_tuple(text: str) -> tuple[int, ...]:
    return tuple(int(p) for p in _split_items(text))


def _parse_float_tuple(text: str) -> tuple[float, ...]:
    return tuple(float(p) for p in _split_items(text))


def _parse_str_tuple(text: str) -> tuple[str, ...]:
    return tuple(_split_items(text))


_PARSERS = {
    "int": _parse_int,
    "float": _parse_float,
    "str": _parse_str,
    "tuple[int, ...]": _parse_int_tuple,
    "tuple[float, ...]": _parse_float_tuple,
    "tuple[str, ...]": _parse_str_tuple,
}

_FIELDS = {f.name: f for f in fields(RunConfig)}


def encode_value(value) -> str:
    if isinstance(value, tuple):
        return ",".join(fmt_value(v) for v in value)
    return fmt_value(value)


def snapshot_config(config: RunConfig) -> dict[str, str]:
    """String form of every field; feeding it back rebuilds the config."""
    return {f.name: encode_value(getattr(config, f.name)) for f in fields(RunConfig)}


def parse_config_file(path) -> dict[str, str]:
    """Flat key=value lines; blank lines and # comments are ignored."""
    p = Path(path)
    if not p.exists():
        raise InputError(f"config file not found: {p}")
    values: dict[str, str] = {}
    for lineno, raw in enumerate(p.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigurationError(f"{p}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key in values:
            raise ConfigurationError(f"{p}:{lineno}: duplicate key {key}")
        values[key] = value.strip()
    return values


def build_run_config(values: dict[str, str]) -> RunConfig:
    kwargs = {}
    for key, text in values.items():
        if key not in _FIELDS:
            raise ConfigurationError(f"unknown config key: {key}")
        try:
            kwargs[key] = _PARSERS[_FIELDS[key].type](text)
        except ValueError as exc:
            raise ConfigurationError(f"invalid value for {key}: {text!r} ({exc})") from exc
    return RunConfig(**kwargs)


def _utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _run_dir(config: RunConfig) -> Path:
    d = Path(config.output_dir) / config.run_id
    d.mkdir(parents=True, exist_ok=True)
    return d


def _finish(config: RunConfig, run_dir: Path, files: list[Path], started: str) -> None:
    write_manifest(
        run_dir / "manifest.json",
        config.run_id,
        __version__,
        snapshot_config(config),
        files,
        started,
        _utc_now(),
    )


def _load_dataset(config: RunConfig, run_dir: Path, files: list[Path]):
    """Existing CSV when dataset_file is set, else generate and persist."""
    if config.dataset_file:
        path = Path(config.dataset_file)
        if not path.exists():
            raise InputError(f"dataset_file not found: {path}")
        return read_dataset_csv(path)
    samples = generate_dataset(config.to_dataset_spec())
    out = run_dir / "dataset.csv"
    write_dataset_csv(samples, out)
    files.append(out)
    return samples


def _write_spectra(config: RunConfig, run_dir: Path, files: list[Path], predictor) -> None:
    spec = config.to_dataset_spec()
    grid = config.to_grid_spec()
    xs = dense_grid(grid)
    y_grid = target_function(spec.components, xs)
    records = stage_spectra(predictor, y_grid, grid, config.component_freqs)
    true_report = amplitude_spectrum(y_grid, grid)
    for name, write in (
        ("spectrum.csv", lambda p: write_spectrum_csv(true_report, records, p)),
        ("freq_bars.csv", lambda p: write_freq_bars_csv(config.component_freqs, true_report, records, p)),
        ("grid_predictions.csv", lambda p: write_grid_predictions_csv(xs, y_grid, records, p)),
    ):
        path = run_dir / name
        write(path)
        files.append(path)


def _write_logs(run_dir: Path, files: list[Path], log) -> None:
    for name, write in (
        ("stage_log.csv", write_stage_log_csv),
        ("stage_summary.csv", write_stage_summary_csv),
    ):
        path = run_dir / name
        write(log, path)
        files.append(path)


def _cmd_gen_data(config: RunConfig) -> int:
    started = _utc_now()
    run_dir = _run_dir(config)
    samples = generate_dataset(config.to_dataset_spec())
    out = run_dir / "dataset.csv"
    write_dataset_csv(samples, out)
    _finish(config, run_dir, [out], started)
    return 0


def _cmd_train(config: RunConfig) -> int:
    started = _utc_now()
    run_dir = _run_dir(config)
    files: list[Path] = []
    samples = _load_dataset(config, run_dir, files)
    ensemble, log = train_residual(samples, config.to_train_config(), config.to_circuit_config())
    _write_logs(run_dir, files, log)
    for stage, module in enumerate(ensemble.modules, start=1):
        path = run_dir / f"checkpoint_stage_{stage}.txt"
        save_checkpoint(module, path)
        files.append(path)
    _write_spectra(config, run_dir, files, ensemble)
    _finish(config, run_dir, files, started)
    return 0


def _cmd_baseline(config: RunConfig) -> int:
    started = _utc_now()
    run_dir = _run_dir(config)
    files: list[Path] = []
    samples = _load_dataset(config, run_dir, files)
    module, log = train_baseline(samples, config.to_train_config(), config.to_circuit_config())
    _write_logs(run_dir, files, log)
    path = run_dir / "checkpoint_baseline.txt"
    save_checkpoint(module, path)
    files.append(path)
    _write_spectra(config, run_dir, files, module)
    _finish(config, run_dir, files, started)
    return 0


SWEEP_HEADER = ["n_qubits", "seed", "stage", "test_mse", "baseline_mse", "rel_improvement"]


def _cmd_sweep_qubits(config: RunConfig) -> int:
    started = _utc_now()
    run_dir = _run_dir(config)
    files: list[Path] = []
    samples = _load_dataset(config, run_dir, files)
    base_train = config.to_train_config()
    rows: list[list] = []
    n_ok = 0
    n_failed = 0
    for n_qubits in config.qubit_values:
        for seed in config.sweep_seeds:
            try:
                cc = replace(config.to_circuit_config(), n_qubits=n_qubits)
                tc = replace(base_train, seed=seed)
                _, log = train_residual(samples, tc, cc)
                _, base_log = train_baseline(samples, tc, cc)
                baseline_mse = base_log.summaries[0].test_mse
                stage1_mse = log.summaries[0].test_mse
                for summary in log.summaries:
                    rel = 0.0
                    if summary.stage > 1 and stage1_mse != 0.0:
                        rel = (stage1_mse - summary.test_mse) / stage1_mse
                    rows.append(
                        [n_qubits, seed, summary.stage, summary.test_mse, baseline_mse, rel]
                    )
                n_ok += 1
            except (ResqError, FloatingPointError) as exc:
                print(f"sweep cell n_qubits={n_qubits} seed={seed} failed: {exc}", file=sys.stderr)
                n_failed += 1
    out = run_dir / "sweep.csv"
    write_csv(out, SWEEP_HEADER, rows)
    files.append(out)
    _finish(config, run_dir, files, started)
    if n_failed == 0:
        return 0
    return 3 if n_ok else 2


def _cmd_barren(config: RunConfig) -> int:
    started = _utc_now()
    run_dir = _run_dir(config)
    records, references = run_barren_sweep(config.to_barren_config())
    bpath = run_dir / "barren.csv"
    rpath = run_dir / "barren_reference.csv"
    write_barren_csv(records, bpath)
    write_reference_csv(references, rpath)
    _finish(config, run_dir, [bpath, rpath], started)
    return 0


_DISPATCH = {
    "gen-data": _cmd_gen_data,
    "train": _cmd_train,
    "baseline": _cmd_baseline,
    "sweep-qubits": _cmd_sweep_qubits,
    "barren": _cmd_barren,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resqlearn",
        description="Staged residual training of variational quantum circuit models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "gen-data": "generate the synthetic dataset CSV",
        "train": "run staged residual training",
        "baseline": "train a single module with the same total epoch budget",
        "sweep-qubits": "residual + baseline runs over qubit counts and seeds",
        "barren": "gradient-variance probe over qubit and layer counts",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", default=None, metavar="FILE", help="flat key=value config file")
        for f in fields(RunConfig):
            p.add_argument(
                "--" + f.name.replace("_", "-"),
                dest=f.name,
                default=None,
                metavar="V",
                help=f"override {f.name}",
            )
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        values = parse_config_file(args.config) if args.config else {}
        for f in fields(RunConfig):
            flag = getattr(args, f.name)
            if flag is not None:
                values[f.name] = flag
        config = build_run_config(values)
        return _DISPATCH[args.command](config)
    except (ConfigurationError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ResqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


def cli_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    cli_entry()
