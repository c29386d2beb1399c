"""Synthetic benchmark: sinusoids localized by envelope functions.

The target is y(x) = sum_k a_k * e_k(x) * sin(2*pi*omega_k*x), where each
envelope e_k peaks at 1 over its center.  Samples are drawn uniformly over
the domain with a seeded generator, labeled by the component whose
amplitude-weighted envelope dominates at that x, and partitioned into
train/val/test by a seeded permutation (not by x-interval, so every
dominant region appears in every split).

The dataset CSV (`x,y,split,dominant`, one row per sample in draw order,
shortest round-trip decimals) is the interchange format consumed by every
downstream command and by the figures package.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigurationError, InputError


class Envelope(Enum):
    GAUSSIAN = "gaussian"
    LORENTZIAN = "lorentzian"
    TRIANGULAR = "triangular"


class Split(Enum):
    TRAIN = "train"
    VAL = "val"
    TEST = "test"


@dataclass(frozen=True)
class FrequencyComponent:
    omega: float
    center: float
    width: float
    amplitude: float
    envelope: Envelope

    def __post_init__(self) -> None:
        if not self.width > 0:
            raise ConfigurationError(f"width must be positive, got {self.width}")
        if self.omega < 0:
            raise ConfigurationError(f"omega must be non-negative, got {self.omega}")
        values = (self.omega, self.center, self.width, self.amplitude)
        if not all(np.isfinite(v) for v in values):
            raise ConfigurationError("component fields must be finite")


DEFAULT_COMPONENTS: tuple[FrequencyComponent, ...] = (
    FrequencyComponent(0.5, 1.0, 0.8, 1.0, Envelope.GAUSSIAN),
    FrequencyComponent(3.0, 0.4, 0.25, 1.0, Envelope.LORENTZIAN),
    FrequencyComponent(7.0, 1.0, 0.5, 1.0, Envelope.TRIANGULAR),
    FrequencyComponent(12.0, 1.5, 0.12, 1.0, Envelope.GAUSSIAN),
    FrequencyComponent(20.0, 1.8, 0.08, 1.0, Envelope.GAUSSIAN),
)


@dataclass(frozen=True)
class DatasetSpec:
    components: tuple[FrequencyComponent, ...] = DEFAULT_COMPONENTS
    n_total: int = 5000
    x_min: float = 0.0
    x_max: float = 2.0
    noise_sigma: float = 0.0
    split_fractions: tuple[float, float, float] = (0.7, 0.15, 0.15)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_total <= 0:
            raise ConfigurationError(f"n_total must be positive, got {self.n_total}")
        if not self.x_max > self.x_min:
            raise ConfigurationError("domain must satisfy x_max > x_min")
        if self.noise_sigma < 0:
            raise ConfigurationError("noise_sigma must be non-negative")
        fracs = self.split_fractions
        if len(fracs) != 3 or any(f <= 0 for f in fracs):
            raise ConfigurationError(f"split fractions must be three positive values, got {fracs}")
        if abs(sum(fracs) - 1.0) > 1e-9:
            raise ConfigurationError(f"split fractions must sum to 1, got {sum(fracs)}")
        object.__setattr__(self, "components", tuple(self.components))


@dataclass(frozen=True)
class LabeledSample:
    x: float
    y: float
    split: Split
    dominant: int


def envelope_value(kind: Envelope, x, center: float, width: float):
    """Envelope weight in [0, 1]; peaks at 1 when x equals the center."""
    if not width > 0:
        raise ConfigurationError(f"width must be positive, got {width}")
    u = (np.asarray(x, dtype=float) - center) / width
    if kind is Envelope.GAUSSIAN:
        out = np.exp(-0.5 * u * u)
    elif kind is Envelope.LORENTZIAN:
        out = 1.0 / (1.0 + u * u)
    else:
        out = np.maximum(0.0, 1.0 - np.abs(u))
    return float(out) if np.ndim(x) == 0 else out


def target_function(components, x):
    """Clean target value(s); noise is added at sampling time only."""
    xs = np.asarray(x, dtype=float)
    total = np.zeros_like(xs, dtype=float)
    for comp in components:
        env = envelope_value(comp.envelope, xs, comp.center, comp.width)
        total = total + comp.amplitude * env * np.sin(2.0 * np.pi * comp.omega * xs)
    return float(total) if np.ndim(x) == 0 else total


def _weighted_envelopes(components, xs: np.ndarray) -> np.ndarray:
    """|a_k| is not used: dominance follows the signed-amplitude weighting
    a_k * e_k, matching how the components add up."""
    return np.stack(
        [c.amplitude * envelope_value(c.envelope, xs, c.center, c.width) for c in components]
    )


def dominant_component(components, x) -> int:
    """Index of the largest amplitude-weighted envelope; ties pick the
    lowest index."""
    if not components:
        raise ConfigurationError("dominant_component needs at least one component")
    weights = _weighted_envelopes(components, np.asarray([x], dtype=float))
    return int(np.argmax(weights[:, 0]))


def generate_dataset(spec: DatasetSpec) -> list[LabeledSample]:
    """Draw, label, and split the full dataset; deterministic per seed.

    Val and test sizes are round(fraction * n_total); train takes the
    remainder.  The noise draw happens even at sigma = 0 so the x-values
    match across noise settings with the same seed.
    """
    rng = np.random.default_rng(spec.seed)
    xs = rng.uniform(spec.x_min, spec.x_max, spec.n_total)
    noise = rng.normal(0.0, spec.noise_sigma, spec.n_total)
    ys = target_function(spec.components, xs) + noise
    dominants = np.argmax(_weighted_envelopes(spec.components, xs), axis=0)

    n_val = int(round(spec.split_fractions[1] * spec.n_total))
    n_test = int(round(spec.split_fractions[2] * spec.n_total))
    n_train = spec.n_total - n_val - n_test
    if n_train <= 0:
        raise ConfigurationError("split fractions leave no training samples")
    perm = rng.permutation(spec.n_total)
    splits = np.empty(spec.n_total, dtype=object)
    splits[perm[:n_train]] = Split.TRAIN
    splits[perm[n_train : n_train + n_val]] = Split.VAL
    splits[perm[n_train + n_val :]] = Split.TEST

    return [
        LabeledSample(float(xs[i]), float(ys[i]), splits[i], int(dominants[i]))
        for i in range(spec.n_total)
    ]


def split_xy(samples: list[LabeledSample], split: Split) -> tuple[np.ndarray, np.ndarray]:
    """x and y arrays of one split, in dataset order."""
    xs = np.array([s.x for s in samples if s.split is split])
    ys = np.array([s.y for s in samples if s.split is split])
    return xs, ys


DATASET_HEADER = ["x", "y", "split", "dominant"]


def write_dataset_csv(samples: list[LabeledSample], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(DATASET_HEADER)
        for s in samples:
            writer.writerow([repr(s.x), repr(s.y), s.split.value, s.dominant])


def read_dataset_csv(path) -> list[LabeledSample]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != DATASET_HEADER:
            raise InputError(f"unexpected dataset header {header} in {path}")
        samples = []
        for row in reader:
            if len(row) != 4:
                raise InputError(f"malformed dataset row {row} in {path}")
            samples.append(
                LabeledSample(float(row[0]), float(row[1]), Split(row[2]), int(row[3]))
            )
    if not samples:
        raise InputError(f"dataset file {path} has no samples")
    return samples
