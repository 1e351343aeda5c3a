"""Raw vibration recordings -> labelled (Ex, En, He) feature rows.

Per recording: optional wavelet denoising, min-max normalisation over the
whole recording, sliding-window segmentation, then the backward cloud
generator on every window.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import pywt

from .cloud_model import cloud_features

log = logging.getLogger(__name__)

CLOUD_FEATURE_NAMES = ("ex", "en", "he")


@dataclass(frozen=True)
class Recording:
    samples: np.ndarray
    label: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=float).ravel())
        if int(self.label) < 0:
            raise ValueError(f"label must be >= 0, got {self.label}")
        object.__setattr__(self, "label", int(self.label))

    def __len__(self):
        return len(self.samples)

    def with_samples(self, samples) -> "Recording":
        return Recording(samples, self.label, dict(self.meta))


@dataclass(frozen=True)
class WindowSpec:
    length: int = 500
    step: int = 200

    def __post_init__(self):
        if self.length < 2:
            raise ValueError(f"window length must be >= 2, got {self.length}")
        if self.step < 1:
            raise ValueError(f"window step must be >= 1, got {self.step}")

    def count(self, n_samples: int) -> int:
        """Number of fully contained windows over ``n_samples`` samples."""
        if n_samples < self.length:
            return 0
        return (n_samples - self.length) // self.step + 1


class LabeledFeatureSet:
    """Feature rows with integer class labels.

    ``features`` is ``(n, d)`` float, ``labels`` is ``(n,)`` int. Both
    arrays are read-only views; derive new sets instead of mutating.
    """

    def __init__(self, features, labels, names: Sequence[str] | None = None):
        features = np.array(features, dtype=float)
        labels = np.array(labels, dtype=int).ravel()
        if features.ndim == 1:
            features = features.reshape(len(labels), -1) if len(labels) else features.reshape(0, 0)
        if features.ndim != 2:
            raise ValueError("features must be a 2-D matrix")
        if features.shape[0] != labels.shape[0]:
            raise ValueError(
                f"row count mismatch: {features.shape[0]} feature rows vs {labels.shape[0]} labels"
            )
        if labels.size and labels.min() < 0:
            raise ValueError("labels must be non-negative class ids")
        features.setflags(write=False)
        labels.setflags(write=False)
        self.features = features
        self.labels = labels
        if names is None:
            names = CLOUD_FEATURE_NAMES if features.shape[1] == 3 else [f"x{j}" for j in range(features.shape[1])]
        if len(names) != features.shape[1]:
            raise ValueError("one name per feature column required")
        self.names = tuple(names)

    def __len__(self):
        return self.features.shape[0]

    def __repr__(self):
        counts = ", ".join(f"{c}: {n}" for c, n in self.class_counts().items())
        return f"LabeledFeatureSet(n={len(self)}, d={self.d}, classes={{{counts}}})"

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        """Class count implied by the labels, ``max(label) + 1``."""
        return int(self.labels.max()) + 1 if len(self) else 0

    @property
    def classes(self) -> np.ndarray:
        return np.unique(self.labels)

    def class_counts(self) -> dict[int, int]:
        values, counts = np.unique(self.labels, return_counts=True)
        return {int(v): int(c) for v, c in zip(values, counts)}

    def rows_of(self, class_id: int) -> np.ndarray:
        return self.features[self.labels == class_id]

    def take(self, index) -> "LabeledFeatureSet":
        index = np.asarray(index)
        return LabeledFeatureSet(self.features[index], self.labels[index], self.names)

    @classmethod
    def concat(cls, parts: Iterable["LabeledFeatureSet"]) -> "LabeledFeatureSet":
        parts = [p for p in parts]
        if not parts:
            raise ValueError("nothing to concatenate")
        d = {p.d for p in parts if len(p)}
        if len(d) > 1:
            raise ValueError(f"feature dimension mismatch: {sorted(d)}")
        feats = [p.features for p in parts if len(p)]
        labs = [p.labels for p in parts if len(p)]
        if not feats:
            return parts[0]
        return cls(np.vstack(feats), np.concatenate(labs), parts[0].names)


def normalize_minmax(recording: Recording) -> Recording:
    """Map samples to ``(x - min) / (max - min)`` over the whole recording.

    A constant recording maps to zeros, with a warning.
    """
    x = recording.samples
    if x.size == 0:
        raise ValueError("cannot normalise an empty recording")
    lo, hi = x.min(), x.max()
    if hi == lo:
        warnings.warn("constant recording normalised to zeros", RuntimeWarning, stacklevel=2)
        return recording.with_samples(np.zeros_like(x))
    return recording.with_samples((x - lo) / (hi - lo))


def wavelet_denoise(recording: Recording, levels: int = 3, wavelet: str = "db2") -> Recording:
    """Soft-threshold wavelet shrinkage with the universal threshold.

    The noise level is the median absolute finest-scale detail divided by
    0.6745; every detail band is soft-thresholded at
    ``sigma * sqrt(2 ln n)`` and the approximation band is kept.
    """
    x = recording.samples
    n = len(x)
    if levels < 1:
        raise ValueError("levels must be >= 1")
    if n < 2**levels:
        raise ValueError(f"recording too short for {levels} levels: {n} < {2 ** levels}")
    coeffs = pywt.wavedec(x, wavelet, level=levels)
    sigma = np.median(np.abs(coeffs[-1])) / 0.6745
    thr = sigma * np.sqrt(2.0 * np.log(n))
    if thr > 0:
        coeffs[1:] = [pywt.threshold(c, thr, mode="soft") for c in coeffs[1:]]
    out = pywt.waverec(coeffs, wavelet)[:n]
    return recording.with_samples(out)


def sliding_windows(recording: Recording, spec: WindowSpec) -> np.ndarray:
    """Return a ``(count, spec.length)`` array of fully contained windows
    starting at ``0, step, 2*step, ...``."""
    x = recording.samples
    if len(x) < spec.length:
        raise ValueError(f"recording of length {len(x)} is shorter than one window ({spec.length})")
    view = np.lib.stride_tricks.sliding_window_view(x, spec.length)
    return view[:: spec.step]


def recording_features(recording: Recording, spec: WindowSpec, denoise: bool = False,
                       levels: int = 3) -> np.ndarray:
    """``(windows, 3)`` cloud features of a single recording."""
    if denoise:
        recording = wavelet_denoise(recording, levels)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        normed = normalize_minmax(recording)
    if np.ptp(recording.samples) == 0:
        log.warning("recording with label %d is constant; features are all zero", recording.label)
    return cloud_features(sliding_windows(normed, spec), axis=-1)


def extract_cloud_features(recordings: Sequence[Recording], spec: WindowSpec,
                           denoise: bool = False, levels: int = 3) -> LabeledFeatureSet:
    """Cloud feature rows for every window of every recording, in input order."""
    feats, labels = [], []
    for i, rec in enumerate(recordings):
        try:
            rows = recording_features(rec, spec, denoise, levels)
        except ValueError as exc:
            raise ValueError(f"recording {i} (label {rec.label}): {exc}") from exc
        feats.append(rows)
        labels.append(np.full(len(rows), rec.label, dtype=int))
    if not feats:
        return LabeledFeatureSet(np.empty((0, 3)), np.empty(0, dtype=int))
    return LabeledFeatureSet(np.vstack(feats), np.concatenate(labels))
