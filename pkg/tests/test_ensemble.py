import itertools

import numpy as np
import pytest

from scncel.ensemble import (
    ScnCelModel,
    member_seed,
    member_seeds,
    predict_scn_cel,
    train_scn_cel,
    vote,
)
from scncel.oversampling import SamplerRequest, cloud_sample
from scncel.scn import ScnConfig, ScnModel, predict_scn, train_scn
from scncel.signal_pipeline import LabeledFeatureSet


def mode_oracle(column, m):
    counts = [list(column).count(j) for j in range(m)]
    best = max(counts)
    return counts.index(best)


def small_set(seed=0):
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.normal(c, 0.4, (8, 3)) for c in range(3)])
    return LabeledFeatureSet(X, np.repeat(np.arange(3), 8))


def fixed_model(cls, m=3, d=2):
    beta = np.zeros((1, m))
    beta[0, cls] = 1.0
    return ScnModel(np.zeros((1, d)), np.zeros(1), beta, m)


def test_vote_exhaustive_k3_m3():
    patterns = list(itertools.product(range(3), repeat=3))
    assert len(patterns) == 27
    P = np.array(patterns).T
    expected = [mode_oracle(col, 3) for col in patterns]
    assert vote(P, 3).tolist() == expected


@pytest.mark.parametrize("column, expected", [([1, 1, 2], 1), ([0, 1, 2], 0), ([4] * 6, 4)])
def test_vote_examples(column, expected):
    assert vote(np.array(column)[:, None], 5).tolist() == [expected]


def test_vote_out_of_range():
    with pytest.raises(ValueError):
        vote([[0, 3]], 3)


def test_vote_permutation_invariant_and_strict_majority():
    rng = np.random.default_rng(1)
    for _ in range(200):
        k, m, n = rng.integers(1, 8), rng.integers(2, 5), 10
        P = rng.integers(0, m, (k, n))
        np.testing.assert_array_equal(vote(P, m), vote(P[rng.permutation(k)], m))
        j = int(rng.integers(0, m))
        agree = k // 2 + 1
        P[:agree] = j
        assert np.all(vote(P, m) == j)


def test_member_seeds_distinct():
    assert len(set(member_seeds(0, 6))) == 6
    assert member_seed(3, 1) == member_seed(3, 1) != member_seed(3, 2)


def test_k1_equals_cloud_sample_plus_train():
    data = small_set()
    req, cfg = SamplerRequest(30, seed=4), ScnConfig(l_max=30, seed=9)
    ens = train_scn_cel(data, 1, req, cfg)
    single = train_scn(cloud_sample(data, SamplerRequest(30, seed=member_seed(4, 0))),
                       ScnConfig(l_max=30, seed=member_seed(9, 0)), n_classes=3)
    assert ens.members[0].weights.tobytes() == single.weights.tobytes()
    X = np.random.default_rng(2).normal(1, 1, (40, 3))
    np.testing.assert_array_equal(predict_scn_cel(ens, X), predict_scn(single, X))


def test_k6_members_use_distinct_sampler_seeds():
    ens = train_scn_cel(small_set(), 6, SamplerRequest(20, seed=1), ScnConfig(l_max=10, seed=2))
    assert ens.k == 6
    assert len({r.seed for r in ens.requests}) == 6
    assert len({m.weights.tobytes() for m in ens.members}) == 6


def test_parallel_members_match_serial():
    args = (small_set(), 4, SamplerRequest(20, seed=1), ScnConfig(l_max=10, seed=2))
    a, b = train_scn_cel(*args), train_scn_cel(*args, jobs=3)
    assert [m.weights.tobytes() for m in a.members] == [m.weights.tobytes() for m in b.members]


def test_constructed_members_vote():
    ens = ScnCelModel(tuple(fixed_model(c) for c in [2, 2, 2, 0, 0]), 3)
    assert predict_scn_cel(ens, np.zeros((4, 2))).tolist() == [2] * 4


def test_dimension_mismatch():
    ens = ScnCelModel((fixed_model(1),), 3)
    with pytest.raises(ValueError):
        predict_scn_cel(ens, np.zeros((2, 4)))
    with pytest.raises(ValueError):
        ScnCelModel((fixed_model(1), fixed_model(1, d=3)), 3)
    with pytest.raises(ValueError):
        ScnCelModel((), 3)


def test_member_errors_carry_index():
    data = LabeledFeatureSet([[0.0], [1.0], [2.0]], [0, 0, 1])
    with pytest.raises(ValueError, match="ensemble member 0"):
        train_scn_cel(data, 2, SamplerRequest(5), ScnConfig(l_max=5))


def test_serialization_round_trip():
    ens = train_scn_cel(small_set(), 3, SamplerRequest({1: 20, 2: 20}, seed=1), ScnConfig(l_max=10))
    back = ScnCelModel.loads(ens.dumps())
    assert back.k == 3 and back.requests == ens.requests
    X = np.random.default_rng(0).normal(1, 1, (30, 3))
    np.testing.assert_array_equal(back.predict(X), ens.predict(X))
