"""
From vibration signals to (Ex, En, He) rows
===========================================

Each recording is min-max normalised, cut into windows of 500 samples
every 200 samples, and every window becomes one cloud feature row.
"""

import numpy as np

from scncel import WindowSpec, extract_cloud_features
from scncel.harness import PRESETS, PRESET_ORDER, generate_synthetic_recording

rng = np.random.default_rng(1)

# one synthetic recording per health state
recordings = [generate_synthetic_recording(PRESETS[name], 20_000, label, rng)
              for label, name in enumerate(PRESET_ORDER)]

features = extract_cloud_features(recordings, WindowSpec(length=500, step=200))
print(features)

# class centroids: impacts pull Ex below 0.5, stronger signals raise En and He
print(f"{'state':>8s} {'Ex':>7s} {'En':>7s} {'He':>7s}")
for label, name in enumerate(PRESET_ORDER):
    ex, en, he = features.rows_of(label).mean(axis=0)
    print(f"{name:>8s} {ex:7.3f} {en:7.3f} {he:7.3f}")

# the optional wavelet step runs before normalisation
denoised = extract_cloud_features(recordings[:1], WindowSpec(), denoise=True)
print("normal state, denoised centroid:", denoised.features.mean(axis=0).round(3))
