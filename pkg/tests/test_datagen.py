"""Synthetic dataset: envelope shapes, dominance labeling, splits, CSV."""

import numpy as np
import pytest

from resqlearn.datagen import (
    DEFAULT_COMPONENTS,
    DatasetSpec,
    Envelope,
    FrequencyComponent,
    Split,
    dominant_component,
    envelope_value,
    generate_dataset,
    read_dataset_csv,
    split_xy,
    target_function,
    write_dataset_csv,
)
from resqlearn.errors import ConfigurationError, InputError


def test_envelopes_peak_at_center():
    for kind in Envelope:
        assert envelope_value(kind, 1.3, 1.3, 0.4) == pytest.approx(1.0)


def test_envelope_shapes():
    assert envelope_value(Envelope.TRIANGULAR, 2.0, 1.0, 0.5) == 0.0
    assert envelope_value(Envelope.TRIANGULAR, 1.25, 1.0, 0.5) == pytest.approx(0.5)
    assert envelope_value(Envelope.LORENTZIAN, 1.5, 1.0, 0.5) == pytest.approx(0.5)
    assert envelope_value(Envelope.GAUSSIAN, 1.5, 1.0, 0.5) == pytest.approx(np.exp(-0.5))


def test_envelope_rejects_bad_width():
    with pytest.raises(ConfigurationError):
        envelope_value(Envelope.GAUSSIAN, 0.0, 0.0, 0.0)
    with pytest.raises(ConfigurationError):
        FrequencyComponent(1.0, 0.0, -1.0, 1.0, Envelope.GAUSSIAN)


def test_target_function_trivial_values():
    assert target_function([], 0.7) == 0.0
    comp = FrequencyComponent(2.0, 0.0, 1.0, 1.5, Envelope.GAUSSIAN)
    assert target_function([comp], 0.25) == pytest.approx(0.0, abs=1e-12)  # sine zero
    assert target_function(DEFAULT_COMPONENTS, 0.0) == pytest.approx(0.0, abs=1e-12)


def test_target_function_matches_manual_sum():
    rng = np.random.default_rng(0)
    for x in rng.uniform(0, 2, 20):
        manual = 0.0
        for c in DEFAULT_COMPONENTS:
            u = (x - c.center) / c.width
            if c.envelope is Envelope.GAUSSIAN:
                env = np.exp(-0.5 * u * u)
            elif c.envelope is Envelope.LORENTZIAN:
                env = 1.0 / (1.0 + u * u)
            else:
                env = max(0.0, 1.0 - abs(u))
            manual += c.amplitude * env * np.sin(2 * np.pi * c.omega * x)
        assert target_function(DEFAULT_COMPONENTS, x) == pytest.approx(manual, abs=1e-12)


def test_dominant_component_basics():
    comp = FrequencyComponent(1.0, 0.5, 0.3, 1.0, Envelope.GAUSSIAN)
    assert dominant_component([comp], 1.7) == 0
    assert dominant_component([comp, comp], 0.5) == 0  # tie goes to lowest index
    with pytest.raises(ConfigurationError):
        dominant_component([], 0.0)


def test_dominant_component_matches_envelope_argmax():
    rng = np.random.default_rng(1)
    for x in rng.uniform(0, 2, 25):
        weights = [
            c.amplitude * envelope_value(c.envelope, x, c.center, c.width)
            for c in DEFAULT_COMPONENTS
        ]
        assert dominant_component(DEFAULT_COMPONENTS, x) == int(np.argmax(weights))


def test_dominant_component_scale_invariant():
    scaled = tuple(
        FrequencyComponent(c.omega, c.center, c.width, 3.7 * c.amplitude, c.envelope)
        for c in DEFAULT_COMPONENTS
    )
    rng = np.random.default_rng(2)
    for x in rng.uniform(0, 2, 10):
        assert dominant_component(scaled, x) == dominant_component(DEFAULT_COMPONENTS, x)


def test_lowest_frequency_dominates_its_center():
    assert dominant_component(DEFAULT_COMPONENTS, DEFAULT_COMPONENTS[0].center) == 0


def test_generate_dataset_split_sizes():
    samples = generate_dataset(DatasetSpec(n_total=5000))
    counts = {split: sum(1 for s in samples if s.split is split) for split in Split}
    assert counts == {Split.TRAIN: 3500, Split.VAL: 750, Split.TEST: 750}
    small = generate_dataset(DatasetSpec(n_total=1428))
    counts = {split: sum(1 for s in small if s.split is split) for split in Split}
    assert counts == {Split.TRAIN: 1000, Split.VAL: 214, Split.TEST: 214}


def test_generate_dataset_is_deterministic_and_clean():
    spec = DatasetSpec(n_total=400, seed=5)
    first = generate_dataset(spec)
    second = generate_dataset(spec)
    assert first == second
    bound = sum(abs(c.amplitude) for c in spec.components)
    for s in first:
        assert spec.x_min <= s.x < spec.x_max or s.x == pytest.approx(spec.x_max)
        assert s.y == target_function(spec.components, s.x)  # noise_sigma = 0
        assert abs(s.y) <= bound
        assert s.dominant == dominant_component(spec.components, s.x)


def test_noise_changes_targets_but_not_inputs():
    clean = generate_dataset(DatasetSpec(n_total=100, seed=3))
    noisy = generate_dataset(DatasetSpec(n_total=100, seed=3, noise_sigma=0.1))
    assert [s.x for s in clean] == [s.x for s in noisy]
    assert any(c.y != n.y for c, n in zip(clean, noisy))


def test_spec_validation():
    with pytest.raises(ConfigurationError):
        DatasetSpec(n_total=0)
    with pytest.raises(ConfigurationError):
        DatasetSpec(x_min=2.0, x_max=2.0)
    with pytest.raises(ConfigurationError):
        DatasetSpec(split_fractions=(0.5, 0.5, 0.5))
    with pytest.raises(ConfigurationError):
        DatasetSpec(split_fractions=(1.0, -0.5, 0.5))
    with pytest.raises(ConfigurationError):
        DatasetSpec(noise_sigma=-0.1)


def test_split_xy_partitions_dataset():
    samples = generate_dataset(DatasetSpec(n_total=200, seed=1))
    total = 0
    for split in Split:
        xs, ys = split_xy(samples, split)
        assert xs.shape == ys.shape
        total += xs.size
    assert total == 200


def test_csv_roundtrip_is_exact(tmp_path):
    samples = generate_dataset(DatasetSpec(n_total=150, seed=9))
    path = tmp_path / "data.csv"
    write_dataset_csv(samples, path)
    assert read_dataset_csv(path) == samples
    # byte-identical on rewrite
    first = path.read_bytes()
    write_dataset_csv(samples, path)
    assert path.read_bytes() == first


def test_csv_reader_validates(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(InputError):
        read_dataset_csv(path)
    path.write_text("x,y,split,dominant\n")
    with pytest.raises(InputError):
        read_dataset_csv(path)
