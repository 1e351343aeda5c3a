import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from scncel.harness.synthetic import PRESETS, PRESET_ORDER, generate_synthetic_recording
from scncel.signal_pipeline import (
    LabeledFeatureSet,
    Recording,
    WindowSpec,
    extract_cloud_features,
    normalize_minmax,
    sliding_windows,
    wavelet_denoise,
)


@pytest.mark.parametrize("x, expected", [
    ([2, 4, 6], [0, 0.5, 1]),
    ([-1, 0, 3], [0, 0.25, 1]),
])
def test_normalize_examples(x, expected):
    np.testing.assert_allclose(normalize_minmax(Recording(x, 0)).samples, expected)


def test_normalize_constant_is_zero_with_warning():
    with pytest.warns(RuntimeWarning):
        out = normalize_minmax(Recording([7, 7, 7], 1))
    assert out.samples.tolist() == [0, 0, 0]
    assert out.label == 1


def test_normalize_empty():
    with pytest.raises(ValueError):
        normalize_minmax(Recording([], 0))


@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=40),
       st.floats(0.01, 100), st.floats(-1e3, 1e3))
def test_normalize_range_and_affine_invariance(x, a, b):
    x = np.asarray(x)
    if np.ptp(x) < 1e-6:
        return
    y = normalize_minmax(Recording(x, 0)).samples
    z = normalize_minmax(Recording(a * x + b, 0)).samples
    assert np.all((y >= 0) & (y <= 1))
    np.testing.assert_allclose(y, z, atol=1e-9)


def test_wavelet_zero_and_constant():
    assert np.all(wavelet_denoise(Recording(np.zeros(256), 0)).samples == 0)
    out = wavelet_denoise(Recording(np.full(256, 3.25), 0)).samples
    np.testing.assert_allclose(out, 3.25, atol=1e-12)


@pytest.mark.parametrize("n", [64, 1000, 1023])
def test_wavelet_preserves_length(n):
    x = np.random.default_rng(0).normal(size=n)
    assert len(wavelet_denoise(Recording(x, 0)).samples) == n


def test_wavelet_reduces_noise():
    rng = np.random.default_rng(12)
    t = np.arange(2048)
    clean = np.sin(2 * np.pi * t / 512)
    noisy = clean + rng.normal(0, 0.05, t.size)
    out = wavelet_denoise(Recording(noisy, 0)).samples
    assert np.mean((out - clean) ** 2) < np.mean((noisy - clean) ** 2)


def test_wavelet_too_short():
    with pytest.raises(ValueError, match="too short"):
        wavelet_denoise(Recording(np.ones(7), 0), levels=3)


@pytest.mark.parametrize("n, length, step, starts", [
    (1000, 500, 200, [0, 200, 400]),
    (500, 500, 200, [0]),
    (1024, 1024, 200, [0]),
])
def test_sliding_windows_examples(n, length, step, starts):
    x = np.arange(n, dtype=float)
    w = sliding_windows(Recording(x, 0), WindowSpec(length, step))
    assert w.shape == (len(starts), length)
    assert w[:, 0].tolist() == starts


def test_sliding_windows_too_short():
    with pytest.raises(ValueError, match="shorter than one window"):
        sliding_windows(Recording(np.ones(10), 0), WindowSpec(11, 1))


@given(st.integers(2, 300), st.integers(2, 300), st.integers(1, 300))
def test_window_count_matches_enumeration(n, length, step):
    if n < length:
        return
    brute = [s for s in range(0, n) if s % step == 0 and s + length <= n]
    w = sliding_windows(Recording(np.arange(n, dtype=float), 0), WindowSpec(length, step))
    assert len(w) == len(brute) == (n - length) // step + 1
    assert w[:, 0].tolist() == brute


def test_window_spec_invariants():
    with pytest.raises(ValueError):
        WindowSpec(1, 1)
    with pytest.raises(ValueError):
        WindowSpec(10, 0)


def test_extract_constant_recording():
    fs = extract_cloud_features([Recording(np.full(1200, 4.0), 2)], WindowSpec(500, 200))
    assert len(fs) == 4
    assert np.all(fs.features == 0)
    assert set(fs.labels) == {2}


def test_extract_counts_and_labels():
    rng = np.random.default_rng(0)
    recs = [Recording(rng.normal(size=900), 0), Recording(rng.normal(size=1300), 1)]
    fs = extract_cloud_features(recs, WindowSpec(500, 200))
    assert fs.class_counts() == {0: 3, 1: 5}
    assert fs.labels.tolist() == [0] * 3 + [1] * 5
    assert fs.names == ("ex", "en", "he")


def test_extract_names_offending_recording():
    recs = [Recording(np.ones(600), 0), Recording(np.ones(100), 1)]
    with pytest.raises(ValueError, match="recording 1"):
        extract_cloud_features(recs, WindowSpec(500, 200))


def test_extract_with_denoise_runs():
    x = np.random.default_rng(1).normal(size=2000)
    fs = extract_cloud_features([Recording(x, 0)], WindowSpec(500, 200), denoise=True)
    assert len(fs) == 8 and np.all(np.isfinite(fs.features))


def test_labeled_feature_set_checks():
    with pytest.raises(ValueError, match="row count"):
        LabeledFeatureSet(np.zeros((3, 3)), [0, 1])
    with pytest.raises(ValueError):
        LabeledFeatureSet(np.zeros((1, 3)), [-1])
    fs = LabeledFeatureSet(np.arange(6.0).reshape(2, 3), [0, 2])
    assert fs.n_classes == 3 and fs.d == 3
    with pytest.raises(ValueError):
        fs.features[0, 0] = 1.0


def test_preset_features_are_separated():
    # centroids in the (Ex, En) plane sit further apart than the mean within-class spread
    rng = np.random.default_rng(2024)
    spec = WindowSpec(500, 200)
    recs = [generate_synthetic_recording(PRESETS[n], 40300, i, rng) for i, n in enumerate(PRESET_ORDER)]
    fs = extract_cloud_features(recs, spec)
    cents, spreads = [], []
    for c in range(len(PRESET_ORDER)):
        rows = fs.rows_of(c)[:, :2]
        cents.append(rows.mean(axis=0))
        spreads.append(rows.std(axis=0, ddof=1).mean())
    spread = np.mean(spreads)
    for a, b in itertools.combinations(range(len(cents)), 2):
        assert np.linalg.norm(cents[a] - cents[b]) > spread, (PRESET_ORDER[a], PRESET_ORDER[b])
