import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scncel.cloud_model import (
    CloudDescriptor,
    backward_cloud,
    cloud_features,
    entropy_floor,
    forward_cloud,
    membership,
    sample_stats,
)

# (ex, en, he) of [0, 1, 2, 3, 4]; mean 2, mean |dev| 6/5, S^2 10/4, evaluated at 30 digits
HAND_EN = 1.50397696477860030
HAND_HE = 0.48790704997504275


def test_hand_oracle_matches_formulae():
    en = math.sqrt(math.pi / 2) * 6 / 5
    assert en == pytest.approx(HAND_EN, abs=1e-15)
    assert math.sqrt(abs(10 / 4 - en**2)) == pytest.approx(HAND_HE, abs=1e-14)


@pytest.mark.parametrize("sample, expected", [
    ([0, 1, 2, 3, 4], (2.0, 1.2, 2.5)),
    ([3.5, 3.5, 3.5], (3.5, 0.0, 0.0)),
    ([-1, 1], (0.0, 1.0, 2.0)),
])
def test_sample_stats(sample, expected):
    assert sample_stats(sample) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("bad", [[], [1.0]])
def test_sample_stats_insufficient(bad):
    with pytest.raises(ValueError, match="insufficient sample"):
        sample_stats(bad)
    with pytest.raises(ValueError, match="insufficient sample"):
        backward_cloud(bad)


def test_backward_cloud_hand_case():
    d = backward_cloud([0, 1, 2, 3, 4])
    assert d.ex == pytest.approx(2.0, abs=1e-12)
    assert d.en == pytest.approx(HAND_EN, abs=1e-12)
    assert d.he == pytest.approx(HAND_HE, abs=1e-12)


def test_backward_cloud_constant():
    assert backward_cloud([5, 5, 5, 5]).as_tuple() == (5.0, 0.0, 0.0)


def test_backward_cloud_standard_normal():
    x = np.random.default_rng(7).standard_normal(10**6)
    d = backward_cloud(x)
    assert abs(d.ex) < 0.01
    assert d.en == pytest.approx(1.0, rel=0.01)
    assert d.he < 0.1


def test_cloud_features_matches_scalar_path():
    rng = np.random.default_rng(0)
    windows = rng.normal(size=(7, 50))
    batch = cloud_features(windows, axis=-1)
    for row, w in zip(batch, windows):
        assert row == pytest.approx(backward_cloud(w).as_tuple(), rel=1e-12)
    cols = cloud_features(windows.T, axis=0)
    np.testing.assert_allclose(cols, batch, rtol=1e-12)


@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=60))
def test_backward_cloud_never_negative(values):
    d = backward_cloud(values)
    assert d.en >= 0 and d.he >= 0


def test_descriptor_rejects_negative_spread():
    with pytest.raises(ValueError):
        CloudDescriptor(0, -1, 0)
    with pytest.raises(ValueError):
        CloudDescriptor(0, 1, -0.1)


def test_forward_degenerate_descriptor():
    drops = forward_cloud(CloudDescriptor(0, 0, 0), 5, np.random.default_rng(0))
    assert len(drops) == 5
    assert list(drops) == [(0.0, 1.0)] * 5


def test_forward_empty_request():
    with pytest.raises(ValueError, match="empty request"):
        forward_cloud(CloudDescriptor(0, 1, 0), 0, np.random.default_rng(0))


def test_forward_zero_he_is_normal():
    v = forward_cloud(CloudDescriptor(5, 2, 0), 10**5, np.random.default_rng(1)).values
    assert v.mean() == pytest.approx(5, abs=0.02)
    assert v.std(ddof=1) == pytest.approx(2, rel=0.02)


def test_forward_zero_he_moment_match():
    # mean, variance and mean |x - ex| of N(ex, en^2), each within 3 Monte Carlo sigmas
    n, ex, en = 10**5, -1.5, 0.7
    v = forward_cloud(CloudDescriptor(ex, en, 0), n, np.random.default_rng(3)).values
    assert abs(v.mean() - ex) < 3 * en / math.sqrt(n)
    assert abs(v.var(ddof=1) - en**2) < 3 * en**2 * math.sqrt(2 / (n - 1))
    mad_sd = en * math.sqrt((1 - 2 / math.pi) / n)
    assert abs(np.abs(v - ex).mean() - en * math.sqrt(2 / math.pi)) < 3 * mad_sd


def test_forward_variance_composition():
    # law of total variance: Var x = E[en'^2] = en^2 + he^2
    v = forward_cloud(CloudDescriptor(0, 1, 0.1), 10**5, np.random.default_rng(2)).values
    assert v.var(ddof=1) == pytest.approx(1.01, rel=0.02)


def test_forward_memberships_consistent_with_draws():
    desc = CloudDescriptor(3, 1.5, 0.3)
    drops = forward_cloud(desc, 1000, np.random.default_rng(4))
    expected = np.exp(-((drops.values - 3) ** 2) / (2 * drops.en_prime**2))
    np.testing.assert_allclose(drops.memberships, expected, rtol=1e-12)
    assert np.all((drops.memberships > 0) & (drops.memberships <= 1))
    v, mu = drops[0]
    assert mu == membership(desc, drops.en_prime[0], v)


def test_forward_redraw_policy_keeps_entropy_away_from_zero():
    desc = CloudDescriptor(0, 1e-13, 1e-13)  # about half the en' draws fall under the floor
    drops = forward_cloud(desc, 2000, np.random.default_rng(5))
    assert np.all(np.abs(drops.en_prime) >= entropy_floor(desc.en))
    assert np.all(np.isfinite(drops.memberships))


def test_forward_deterministic():
    desc = CloudDescriptor(1, 2, 0.5)
    a = forward_cloud(desc, 500, np.random.default_rng(11))
    b = forward_cloud(desc, 500, np.random.default_rng(11))
    assert a.values.tobytes() == b.values.tobytes()
    assert a.memberships.tobytes() == b.memberships.tobytes()


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("ratio", [0.15, 0.2, 0.3])
def test_round_trip(seed, ratio):
    rng = np.random.default_rng(seed)
    desc = CloudDescriptor(rng.uniform(-10, 10), rng.uniform(0.1, 5), 0)
    desc = CloudDescriptor(desc.ex, desc.en, ratio * desc.en)
    back = backward_cloud(forward_cloud(desc, 10**5, rng).values)
    assert abs(back.ex - desc.ex) <= 0.01 * desc.en
    assert back.en == pytest.approx(desc.en, rel=0.02)
    assert back.he == pytest.approx(desc.he, rel=0.15)


@pytest.mark.parametrize("ratio", [0.0, 0.01, 0.05])
def test_round_trip_small_he_recovers_ex_and_en(ratio):
    desc = CloudDescriptor(4.0, 2.0, 2.0 * ratio)
    back = backward_cloud(forward_cloud(desc, 10**5, np.random.default_rng(9)).values)
    assert abs(back.ex - desc.ex) <= 0.01 * desc.en
    assert back.en == pytest.approx(desc.en, rel=0.02)


@pytest.mark.parametrize("desc, en_prime, x, expected", [
    (CloudDescriptor(0, 1, 0), 1.0, 0.0, 1.0),
    (CloudDescriptor(0, 1, 0), 1.0, 1.0, math.exp(-0.5)),
    (CloudDescriptor(3, 2, 0), 2.0, 3.0, 1.0),
])
def test_membership_values(desc, en_prime, x, expected):
    assert membership(desc, en_prime, x) == pytest.approx(expected, abs=1e-12)


def test_membership_zero_entropy():
    with pytest.raises(ValueError, match="degenerate entropy"):
        membership(CloudDescriptor(0, 1, 0), 0.0, 1.0)


@settings(max_examples=50)
@given(st.floats(-100, 100), st.floats(0.01, 10), st.floats(0, 50), st.floats(0, 50))
def test_membership_symmetric_and_decreasing(ex, en_prime, a, b):
    desc = CloudDescriptor(ex, abs(en_prime), 0)
    assert membership(desc, en_prime, ex + a) == pytest.approx(membership(desc, en_prime, ex - a), abs=1e-15)
    near, far = sorted((a, b))
    if far - near > 1e-6 and membership(desc, en_prime, ex + far) > 0:
        assert membership(desc, en_prime, ex + far) < membership(desc, en_prime, ex + near)
