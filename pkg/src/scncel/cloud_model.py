"""Normal cloud model: backward (sample -> descriptor) and forward
(descriptor -> droplets) generators.

A concept is described by three numbers: the expectation ``ex``, the
entropy ``en`` and the hyper entropy ``he``. The backward generator
estimates them from data with moment formulas; the forward generator
draws droplets through a two-stage normal law.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np

SQRT_HALF_PI = np.sqrt(np.pi / 2.0)

# redraw budget for near-zero entropy draws
MAX_REDRAWS = 100


@dataclass(frozen=True)
class CloudDescriptor:
    """(Ex, En, He) triple of a one-dimensional normal cloud."""

    ex: float
    en: float
    he: float

    def __post_init__(self):
        if not (self.en >= 0 and self.he >= 0):
            raise ValueError(f"en and he must be non-negative, got en={self.en}, he={self.he}")

    @property
    def degenerate(self) -> bool:
        return self.en == 0 and self.he == 0

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.ex, self.en, self.he)


class CloudDroplet(NamedTuple):
    value: float
    membership: float


class SampleStats(NamedTuple):
    mean: float
    first_center_distance: float
    variance: float


@dataclass(frozen=True)
class DropletBatch:
    """Droplets from one forward-generator call, stored column-wise.

    ``en_prime`` holds the per-droplet entropy draw used for the value and
    its membership degree.
    """

    values: np.ndarray
    memberships: np.ndarray
    en_prime: np.ndarray

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i) -> CloudDroplet:
        return CloudDroplet(float(self.values[i]), float(self.memberships[i]))

    def __iter__(self) -> Iterator[CloudDroplet]:
        for v, mu in zip(self.values, self.memberships):
            yield CloudDroplet(float(v), float(mu))


def _as_samples(sample, axis=-1) -> np.ndarray:
    x = np.asarray(sample, dtype=float)
    if x.ndim == 0 or x.shape[axis] < 2:
        raise ValueError("insufficient sample: need at least 2 values")
    return x


def sample_stats(sample: Sequence[float]) -> SampleStats:
    """Mean, mean absolute deviation about the mean and unbiased variance."""
    x = _as_samples(sample)
    if x.ndim != 1:
        raise ValueError("sample must be one-dimensional")
    mean = x.mean()
    dev = x - mean
    mad = np.abs(dev).mean()
    var = (dev @ dev) / (len(x) - 1)
    return SampleStats(float(mean), float(mad), float(var))


def cloud_features(samples, axis: int = -1) -> np.ndarray:
    """Vectorised backward cloud generator.

    Reduces ``axis`` of ``samples`` and returns an array whose last axis
    holds ``(ex, en, he)``. Used for window batches and per-column class
    profiles.
    """
    x = _as_samples(samples, axis)
    x = np.moveaxis(x, axis, -1)
    n = x.shape[-1]
    ex = x.mean(axis=-1)
    # a constant sample must give exactly (value, 0, 0); the float mean can drift by an ulp
    constant = x.min(axis=-1) == x.max(axis=-1)
    ex = np.where(constant, x[..., 0], ex)
    dev = x - ex[..., None]
    en = SQRT_HALF_PI * np.abs(dev).mean(axis=-1)
    s2 = np.einsum("...i,...i->...", dev, dev) / (n - 1)
    he = np.sqrt(np.abs(s2 - en**2))
    return np.stack([ex, en, he], axis=-1)


def backward_cloud(sample: Sequence[float]) -> CloudDescriptor:
    """Estimate (Ex, En, He) from a one-dimensional sample.

    ``ex`` is the sample mean, ``en = sqrt(pi/2) * mean|x - ex|`` and
    ``he = sqrt(|S^2 - en^2|)`` with ``S^2`` the unbiased variance.

    >>> backward_cloud([5, 5, 5, 5])
    CloudDescriptor(ex=5.0, en=0.0, he=0.0)
    """
    x = _as_samples(sample)
    if x.ndim != 1:
        raise ValueError("sample must be one-dimensional")
    ex, en, he = cloud_features(x)
    return CloudDescriptor(float(ex), float(en), float(he))


def entropy_floor(en: float) -> float:
    return 1e-12 * max(en, 1.0)


def membership(desc: CloudDescriptor, en_prime: float, x):
    """Certainty degree of ``x`` under a bell of width ``en_prime`` centred on ``desc.ex``."""
    if en_prime == 0:
        raise ValueError("degenerate entropy draw: en_prime must be non-zero")
    x = np.asarray(x, dtype=float)
    mu = np.exp(-((x - desc.ex) ** 2) / (2.0 * en_prime**2))
    return float(mu) if mu.ndim == 0 else mu


def _draw_entropies(desc: CloudDescriptor, n: int, rng: np.random.Generator) -> np.ndarray:
    if desc.he == 0:
        return np.full(n, desc.en, dtype=float)
    en_prime = rng.normal(desc.en, desc.he, size=n)
    eps = entropy_floor(desc.en)
    bad = np.abs(en_prime) < eps
    for _ in range(MAX_REDRAWS):
        if not bad.any():
            break
        en_prime[bad] = rng.normal(desc.en, desc.he, size=int(bad.sum()))
        bad = np.abs(en_prime) < eps
    en_prime[bad] = eps
    return en_prime


def forward_cloud(desc: CloudDescriptor, n: int, rng: np.random.Generator) -> DropletBatch:
    """Draw ``n`` droplets from ``desc``.

    Each droplet first draws ``en' ~ N(en, he^2)``, then a value
    ``x ~ N(ex, en'^2)`` with membership ``exp(-(x - ex)^2 / (2 en'^2))``.
    With ``he == 0`` every droplet uses ``en' = en``. Draws with
    ``|en'|`` below a tiny floor are redrawn (at most ``MAX_REDRAWS``
    times) and then pinned to the floor. A fully degenerate descriptor
    yields ``n`` copies of ``ex`` with membership 1.
    """
    if n < 1:
        raise ValueError("empty request: n must be >= 1")
    n = int(n)
    if desc.degenerate:
        return DropletBatch(
            values=np.full(n, desc.ex, dtype=float),
            memberships=np.ones(n),
            en_prime=np.zeros(n),
        )
    en_prime = _draw_entropies(desc, n, rng)
    values = desc.ex + en_prime * rng.standard_normal(n)
    memberships = np.exp(-((values - desc.ex) ** 2) / (2.0 * en_prime**2))
    return DropletBatch(values=values, memberships=memberships, en_prime=en_prime)
