"""Few-shot training-set augmentation.

Cloud sampling draws every feature column of a class independently from
its backward-estimated normal cloud. Bootstrap, SMOTE, ADASYN and a
Gaussian KDE sampler are provided as comparison methods.

All samplers share one request type and the same output convention:
classes named by the request are replaced by their synthetic rows (plus
their originals when ``include_originals`` is set); every other class is
passed through unchanged. Randomness is derived per class from
``(seed, class_id)`` so results do not depend on class processing order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np
from scipy.spatial import cKDTree

from .cloud_model import CloudDescriptor, cloud_features, forward_cloud
from .signal_pipeline import LabeledFeatureSet

SAMPLERS = ("cloud", "bootstrap", "smote", "adasyn", "kde")


@dataclass(frozen=True)
class SamplerRequest:
    """How many synthetic rows to make, and for which classes.

    ``per_class_target`` is either one count applied to every class in the
    input, or a ``{class_id: count}`` map naming the classes to sample.
    """

    per_class_target: int | Mapping[int, int]
    include_originals: bool = False
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.per_class_target, Mapping):
            targets = dict(self.per_class_target)
            object.__setattr__(self, "per_class_target", targets)
            bad = [c for c, n in targets.items() if int(n) < 1]
        else:
            bad = [] if int(self.per_class_target) >= 1 else ["*"]
        if bad:
            raise ValueError(f"zero target: per_class_target must be >= 1 (classes {bad})")

    def targets_for(self, data: LabeledFeatureSet) -> dict[int, int]:
        if isinstance(self.per_class_target, Mapping):
            return {int(c): int(n) for c, n in sorted(self.per_class_target.items())}
        return {int(c): int(self.per_class_target) for c in data.classes}

    def rng_for(self, class_id: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence([int(self.seed), int(class_id)]))


@dataclass(frozen=True)
class ClassCloudProfile:
    class_id: int
    descriptors: tuple[CloudDescriptor, ...]

    @property
    def d(self) -> int:
        return len(self.descriptors)


def _class_rows(data: LabeledFeatureSet, class_id: int, minimum: int, what: str) -> np.ndarray:
    rows = data.rows_of(class_id)
    if len(rows) < minimum:
        raise ValueError(f"{what}: class {class_id} has {len(rows)} rows, need >= {minimum}")
    return rows


def class_cloud_profile(data: LabeledFeatureSet, class_id: int) -> ClassCloudProfile:
    """Backward cloud of each feature column restricted to one class."""
    rows = _class_rows(data, class_id, 2, "class too small to profile")
    params = cloud_features(rows, axis=0)
    descs = tuple(CloudDescriptor(float(ex), float(en), float(he)) for ex, en, he in params)
    return ClassCloudProfile(int(class_id), descs)


def _assemble(data: LabeledFeatureSet, req: SamplerRequest, synth: dict[int, np.ndarray]) -> LabeledFeatureSet:
    feats, labels = [], []
    for c in data.classes:
        c = int(c)
        orig = data.rows_of(c)
        if c not in synth:
            feats.append(orig)
            labels.append(np.full(len(orig), c))
            continue
        if req.include_originals:
            feats.append(orig)
            labels.append(np.full(len(orig), c))
        feats.append(synth[c])
        labels.append(np.full(len(synth[c]), c))
    return LabeledFeatureSet(np.vstack(feats), np.concatenate(labels), data.names)


def _check_targets(data: LabeledFeatureSet, targets: dict[int, int]):
    present = set(int(c) for c in data.classes)
    missing = sorted(set(targets) - present)
    if missing:
        raise ValueError(f"requested classes absent from the data: {missing}")


def cloud_sample(data: LabeledFeatureSet, req: SamplerRequest) -> LabeledFeatureSet:
    """Cloud sampling.

    For each targeted class every feature column gets its own cloud
    profile and ``N`` droplets; the q-th droplet of every column forms
    synthetic row q. Membership degrees are produced but not kept.
    """
    targets = req.targets_for(data)
    _check_targets(data, targets)
    synth = {}
    for c, n in targets.items():
        profile = class_cloud_profile(data, c)
        rng = req.rng_for(c)
        cols = [forward_cloud(desc, n, rng).values for desc in profile.descriptors]
        synth[c] = np.column_stack(cols)
    return _assemble(data, req, synth)


def bootstrap_oversample(data: LabeledFeatureSet, req: SamplerRequest) -> LabeledFeatureSet:
    """Uniform resampling with replacement from the class's own rows."""
    targets = req.targets_for(data)
    _check_targets(data, targets)
    synth = {}
    for c, n in targets.items():
        rows = _class_rows(data, c, 1, "empty class")
        idx = req.rng_for(c).integers(0, len(rows), size=n)
        synth[c] = rows[idx]
    return _assemble(data, req, synth)


def _same_class_neighbors(rows: np.ndarray, k: int) -> np.ndarray:
    """Indices of the ``k`` nearest other rows (Euclidean), shape ``(n, k)``."""
    tree = cKDTree(rows)
    _, idx = tree.query(rows, k=k + 1)
    idx = np.atleast_2d(idx)
    # drop self; duplicates can displace self from column 0
    out = np.empty((len(rows), k), dtype=int)
    for i, nb in enumerate(idx):
        nb = nb[nb != i]
        out[i] = nb[:k]
    return out


def _interpolate(rows, base, neighbors, rng) -> np.ndarray:
    """x + u (x_nb - x) with a random neighbor per synthetic row."""
    pick = rng.integers(0, neighbors.shape[1], size=len(base))
    nb = neighbors[base, pick]
    u = rng.random((len(base), 1))
    return rows[base] + u * (rows[nb] - rows[base])


def _smote_class(rows: np.ndarray, n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    k = min(k, len(rows) - 1)
    neighbors = _same_class_neighbors(rows, k)
    rounds, rest = divmod(n, len(rows))
    base = np.concatenate([np.tile(np.arange(len(rows)), rounds),
                           rng.choice(len(rows), size=rest, replace=False)])
    return _interpolate(rows, base, neighbors, rng)


def smote(data: LabeledFeatureSet, req: SamplerRequest, k: int = 5) -> LabeledFeatureSet:
    """SMOTE: interpolate between a base row and one of its ``k`` nearest
    same-class rows.

    Base rows cycle through the class in order, and the remainder beyond
    whole rounds is drawn at random without replacement. ``k`` is capped
    at the class size minus one.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    targets = req.targets_for(data)
    _check_targets(data, targets)
    synth = {}
    for c, n in targets.items():
        rows = _class_rows(data, c, 2, "SMOTE needs >= 2 rows")
        synth[c] = _smote_class(rows, n, k, req.rng_for(c))
    return _assemble(data, req, synth)


def majority_class(data: LabeledFeatureSet) -> int:
    """Largest class; the lowest id wins ties."""
    counts = data.class_counts()
    best = max(counts.values())
    return min(c for c, n in counts.items() if n == best)


def allocate(weights: np.ndarray, total: int) -> np.ndarray:
    """Split ``total`` into integers proportional to ``weights``.

    Largest-remainder rounding, so the parts always sum to ``total``;
    all-zero weights fall back to a uniform split.
    """
    w = np.asarray(weights, dtype=float)
    if w.sum() <= 0:
        w = np.ones_like(w)
    share = w / w.sum() * total
    g = np.floor(share).astype(int)
    short = total - g.sum()
    if short:
        order = np.argsort(-(share - g), kind="stable")
        g[order[:short]] += 1
    return g


def adasyn_ratios(data: LabeledFeatureSet, class_id: int, k: int) -> np.ndarray:
    """Share of other-class rows among each class row's ``k`` nearest
    neighbours over the whole set."""
    X = data.features
    k_eff = min(k, len(X) - 1)
    tree = cKDTree(X)
    own = np.flatnonzero(data.labels == class_id)
    _, idx = tree.query(X[own], k=k_eff + 1)
    idx = np.atleast_2d(idx)
    ratios = np.empty(len(own))
    for i, (row, nb) in enumerate(zip(own, idx)):
        nb = nb[nb != row][:k_eff]
        ratios[i] = np.count_nonzero(data.labels[nb] != class_id) / k_eff
    return ratios


def adasyn(data: LabeledFeatureSet, req: SamplerRequest, k: int = 5,
           balance_threshold: float = 0.75) -> LabeledFeatureSet:
    """ADASYN: SMOTE with per-row counts proportional to how many of the
    row's neighbours belong to other classes.

    A targeted class generates ``G`` rows in total, ``G`` being the
    request count for that class. Classes whose size ratio against the
    majority class is at least ``balance_threshold`` generate nothing.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    targets = req.targets_for(data)
    _check_targets(data, targets)
    counts = data.class_counts()
    majority = counts[majority_class(data)]
    synth = {}
    for c, G in targets.items():
        rows = _class_rows(data, c, 1, "no minority rows")
        if counts[c] / majority >= balance_threshold:
            synth[c] = np.empty((0, data.d))
            continue
        if len(rows) < 2:
            raise ValueError(f"ADASYN needs >= 2 rows in class {c}")
        g = allocate(adasyn_ratios(data, c, k), G)
        rng = req.rng_for(c)
        neighbors = _same_class_neighbors(rows, min(k, len(rows) - 1))
        base = np.repeat(np.arange(len(rows)), g)
        synth[c] = _interpolate(rows, base, neighbors, rng)
    return _assemble(data, req, synth)


def silverman_bandwidth(rows: np.ndarray) -> np.ndarray:
    """Per-dimension normal-reference bandwidth."""
    n, d = rows.shape
    if n < 2:
        raise ValueError("automatic bandwidth needs >= 2 rows")
    factor = (4.0 / ((d + 2) * n)) ** (1.0 / (d + 4))
    return factor * rows.std(axis=0, ddof=1)


def kde_sample(data: LabeledFeatureSet, req: SamplerRequest, bandwidth="auto") -> LabeledFeatureSet:
    """Draw from a diagonal-bandwidth Gaussian KDE of each class.

    ``bandwidth`` is ``"auto"`` (Silverman per dimension), a scalar or a
    per-dimension vector.
    """
    targets = req.targets_for(data)
    _check_targets(data, targets)
    synth = {}
    for c, n in targets.items():
        if isinstance(bandwidth, str):
            if bandwidth != "auto":
                raise ValueError(f"unknown bandwidth rule {bandwidth!r}")
            rows = _class_rows(data, c, 2, "KDE bandwidth")
            h = silverman_bandwidth(rows)
        else:
            rows = _class_rows(data, c, 1, "empty class")
            h = np.broadcast_to(np.asarray(bandwidth, dtype=float), (data.d,))
        rng = req.rng_for(c)
        idx = rng.integers(0, len(rows), size=n)
        synth[c] = rows[idx] + h * rng.standard_normal((n, data.d))
    return _assemble(data, req, synth)


def get_sampler(name: str, **options) -> Callable[[LabeledFeatureSet, SamplerRequest], LabeledFeatureSet]:
    """Look up a sampler by name, binding its keyword options."""
    funcs = {
        "cloud": cloud_sample,
        "bootstrap": bootstrap_oversample,
        "smote": smote,
        "adasyn": adasyn,
        "kde": kde_sample,
    }
    try:
        fn = funcs[name]
    except KeyError:
        raise ValueError(f"unknown sampler {name!r}; choose from {', '.join(SAMPLERS)}") from None
    if not options:
        return fn
    return lambda data, req: fn(data, req, **options)
