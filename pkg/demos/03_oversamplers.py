"""
Five ways to grow a few-shot class
==================================

Ten rows of a fault class are expanded to seventy with each sampler.
Interpolating samplers stay inside the original rows' bounding box; cloud
sampling and KDE draw from a fitted distribution and may leave it.
"""

import numpy as np

from scncel import SAMPLERS, LabeledFeatureSet, SamplerRequest, class_cloud_profile, get_sampler

rng = np.random.default_rng(2)
normal = rng.normal([0.50, 0.15, 0.03], [0.005, 0.004, 0.006], (70, 3))
fault = rng.normal([0.43, 0.22, 0.09], [0.005, 0.004, 0.004], (10, 3))
data = LabeledFeatureSet(np.vstack([normal, fault]), [0] * 70 + [1] * 10)

# the cloud sampler works from one descriptor per feature column
for name, desc in zip(data.names, class_cloud_profile(data, 1).descriptors):
    print(f"{name}: Ex={desc.ex:.4f} En={desc.en:.4f} He={desc.he:.4f}")

request = SamplerRequest({1: 70}, seed=0)
lo, hi = fault.min(axis=0), fault.max(axis=0)
for name in SAMPLERS:
    rows = get_sampler(name)(data, request).rows_of(1)
    outside = np.any((rows < lo) | (rows > hi), axis=1).mean()
    print(f"{name:>9s}: {len(rows)} rows, spread {rows.std(axis=0).round(4)}, outside box {outside:.0%}")
