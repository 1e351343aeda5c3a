"""SCN-CEL: several SCNs, each trained on its own cloud-sampled training
set, combined by majority vote."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .oversampling import SamplerRequest, cloud_sample
from .scn import ScnConfig, ScnModel, predict_scn, train_scn
from .signal_pipeline import LabeledFeatureSet

ENSEMBLE_FORMAT = "scncel.ensemble"
ENSEMBLE_VERSION = 1


def member_seed(base_seed: int, member: int) -> int:
    """Seed for one ensemble member, derived from ``(base_seed, member)``."""
    ss = np.random.SeedSequence([int(base_seed), int(member)])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def member_seeds(base_seed: int, k: int) -> list[int]:
    seeds = [member_seed(base_seed, i) for i in range(k)]
    if len(set(seeds)) != k:
        raise ValueError(f"member seed collision for base seed {base_seed}")
    return seeds


@dataclass(frozen=True)
class ScnCelModel:
    members: tuple[ScnModel, ...]
    n_classes: int
    requests: tuple[SamplerRequest, ...] = ()

    def __post_init__(self):
        if not self.members:
            raise ValueError("an ensemble needs at least one member")
        dims = {m.input_dim for m in self.members}
        classes = {m.n_classes for m in self.members}
        if len(dims) != 1 or classes != {self.n_classes}:
            raise ValueError("all members must share input dimension and class count")

    @property
    def k(self) -> int:
        return len(self.members)

    @property
    def input_dim(self) -> int:
        return self.members[0].input_dim

    def predict(self, X) -> np.ndarray:
        return predict_scn_cel(self, X)

    def to_dict(self) -> dict:
        manifest = {
            "format": ENSEMBLE_FORMAT,
            "version": ENSEMBLE_VERSION,
            "k": self.k,
            "n_classes": self.n_classes,
            "input_dim": self.input_dim,
            "sampling": [
                {"seed": r.seed, "include_originals": r.include_originals,
                 "per_class_target": _target_doc(r.per_class_target)}
                for r in self.requests
            ],
        }
        manifest["members"] = [m.to_dict() for m in self.members]
        return manifest

    @classmethod
    def from_dict(cls, doc: dict) -> "ScnCelModel":
        if doc.get("format") != ENSEMBLE_FORMAT:
            raise ValueError(f"not an ensemble document (format={doc.get('format')!r})")
        if doc.get("version") != ENSEMBLE_VERSION:
            raise ValueError(f"unsupported ensemble version {doc.get('version')!r}")
        members = tuple(ScnModel.from_dict(m) for m in doc["members"])
        reqs = tuple(
            SamplerRequest(_target_from_doc(s["per_class_target"]), s["include_originals"], s["seed"])
            for s in doc.get("sampling", [])
        )
        return cls(members, int(doc["n_classes"]), reqs)

    def dumps(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def loads(cls, text: str) -> "ScnCelModel":
        return cls.from_dict(json.loads(text))


def _target_doc(target):
    if isinstance(target, dict):
        return {str(c): n for c, n in target.items()}
    return target


def _target_from_doc(doc):
    if isinstance(doc, dict):
        return {int(c): int(n) for c, n in doc.items()}
    return int(doc)


def train_scn_cel(small_train: LabeledFeatureSet, k: int, sampler_req: SamplerRequest,
                  scn_cfg: ScnConfig, n_classes: int | None = None, sampler=cloud_sample,
                  jobs: int = 1) -> ScnCelModel:
    """Train ``k`` members, each on an independent cloud-sampled set.

    Member ``i`` uses sampler seed ``member_seed(sampler_req.seed, i)`` and
    SCN seed ``member_seed(scn_cfg.seed, i)``. ``sampler`` may be swapped
    for any function with the oversampling signature.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    m = n_classes if n_classes is not None else small_train.n_classes
    s_seeds = member_seeds(sampler_req.seed, k)
    c_seeds = member_seeds(scn_cfg.seed, k)
    requests = [replace(sampler_req, seed=s) for s in s_seeds]

    def fit(i):
        try:
            data = sampler(small_train, requests[i])
            return train_scn(data, replace(scn_cfg, seed=c_seeds[i]), n_classes=m)
        except ValueError as exc:
            raise ValueError(f"ensemble member {i}: {exc}") from exc

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            members = list(pool.map(fit, range(k)))
    else:
        members = [fit(i) for i in range(k)]
    return ScnCelModel(tuple(members), m, tuple(requests))


def vote(predictions, m: int) -> np.ndarray:
    """Column-wise majority vote over a ``(K, n)`` matrix of class ids.

    Ties go to the lowest class index.
    """
    P = np.asarray(predictions, dtype=int)
    if P.ndim == 1:
        P = P[None, :]
    if P.size and (P.min() < 0 or P.max() >= m):
        raise ValueError(f"prediction out of range for {m} classes")
    counts = np.zeros((m, P.shape[1]), dtype=int)
    for row in P:
        counts[row, np.arange(P.shape[1])] += 1
    return np.argmax(counts, axis=0)


def predict_scn_cel(model: ScnCelModel, rows) -> np.ndarray:
    preds = np.vstack([predict_scn(member, rows) for member in model.members])
    return vote(preds, model.n_classes)
