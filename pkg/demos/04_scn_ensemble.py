"""
A stochastic configuration network and its cloud ensemble
=========================================================

An SCN grows one hidden node at a time; a random candidate is only kept
if it passes the supervisory inequality, so the training error never
increases. SCN-CEL trains several SCNs on independent cloud-sampled sets
and takes a majority vote.
"""

import numpy as np

from scncel import LabeledFeatureSet, SamplerRequest, ScnConfig, cloud_sample, train_scn, train_scn_cel

rng = np.random.default_rng(3)
centres = np.array([[0.50, 0.15, 0.03], [0.43, 0.22, 0.09], [0.42, 0.20, 0.08]])
spread = np.array([0.005, 0.004, 0.004])


def draw(n):
    X = np.vstack([rng.normal(c, spread, (n, 3)) for c in centres])
    return LabeledFeatureSet(X, np.repeat(np.arange(3), n))


small, test = draw(10), draw(30)
cfg = ScnConfig(t_max=100, l_max=100, tol=0.1, seed=0)

# a single network on cloud-sampled data
single = train_scn(cloud_sample(small, SamplerRequest(70, seed=1)), cfg)
print(f"SCN: {single.n_nodes} nodes, first RMSE values {np.round(single.rmse_trace[:4], 3)}")
print("SCN test accuracy:", np.mean(single.predict(test.features) == test.labels))

# six members, each with its own cloud-sampled training set
ensemble = train_scn_cel(small, 6, SamplerRequest(70, seed=1), cfg)
print("member sampler seeds:", [r.seed for r in ensemble.requests])
print("SCN-CEL test accuracy:", np.mean(ensemble.predict(test.features) == test.labels))
