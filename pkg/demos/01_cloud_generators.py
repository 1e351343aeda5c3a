"""
Forward and backward cloud generators
=====================================

A concept is described by three numbers: expectation Ex, entropy En and
hyper entropy He. The forward generator turns them into droplets, the
backward generator estimates them back from a sample.
"""

import numpy as np

from scncel import CloudDescriptor, backward_cloud, forward_cloud

rng = np.random.default_rng(0)

# a concept centred at 5 with spread 2 and a fuzzy spread of 0.2
concept = CloudDescriptor(ex=5.0, en=2.0, he=0.2)
drops = forward_cloud(concept, 100_000, rng)
print("first droplets (value, membership):")
for value, mu in list(drops)[:3]:
    print(f"  {value:8.4f}  {mu:.4f}")

# the backward generator recovers the three numbers from the values alone
print("recovered:", backward_cloud(drops.values))

# droplet variance is En^2 + He^2 by the law of total variance
print("variance:", drops.values.var(ddof=1), "expected:", 2.0**2 + 0.2**2)

# a tiny sample, worked by hand: mean 2, mean |dev| 1.2, S^2 2.5
print("backward_cloud([0, 1, 2, 3, 4]) =", backward_cloud([0, 1, 2, 3, 4]))
