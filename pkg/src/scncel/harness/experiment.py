"""Seeded, paired experiment protocol.

One trial: build the per-class window pool (regenerated synthetic signals
or the fixed CSV recordings), split every class into a few-shot training
partition and a held-out test partition, augment the training partition
only, train, and score on the untouched test rows.

``(seed, trial)`` fully determines the data, the split, the sampler draws
and the SCN candidates, so trials run in any order or in parallel with
identical results, and different samplers see identical splits.
"""

from __future__ import annotations

import hashlib
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from ..ensemble import train_scn_cel
from ..oversampling import SAMPLERS, SamplerRequest, get_sampler
from ..scn import predict_scn, train_scn
from ..signal_pipeline import LabeledFeatureSet, Recording, extract_cloud_features
from .config import ConfigError, DataError, ExperimentConfig
from .datasets import load_csv_dataset
from .metrics import metrics
from .report import write_comparison, write_report
from .synthetic import generate_synthetic_recording

log = logging.getLogger(__name__)

JOBS_ENV = "SCNCEL_JOBS"

# independent random streams within a trial
DATA_STREAM, SPLIT_STREAM, SAMPLER_STREAM, SCN_STREAM = range(4)


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


def derive_seed(seed: int, trial: int, stream: int) -> int:
    ss = np.random.SeedSequence([int(seed), int(trial), int(stream)])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


@dataclass
class TrialResult:
    trial: int
    train_accuracy: float
    test_accuracy: float
    confusion: np.ndarray
    node_counts: list
    train_rows: int
    split_hash: str
    train_seconds: float = 0.0


@dataclass
class TrialReport:
    name: str
    n_classes: int
    class_names: list
    trials: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def _acc(self, key):
        return np.array([getattr(t, key) for t in self.trials])

    @property
    def test_accuracies(self) -> np.ndarray:
        return self._acc("test_accuracy")

    @property
    def train_accuracies(self) -> np.ndarray:
        return self._acc("train_accuracy")

    @property
    def mean_test_accuracy(self) -> float:
        return float(self.test_accuracies.mean())

    @property
    def var_test_accuracy(self) -> float:
        """Across-trial population variance."""
        return float(self.test_accuracies.var())

    @property
    def confusion(self) -> np.ndarray:
        return sum((t.confusion for t in self.trials), np.zeros((self.n_classes,) * 2, dtype=int))

    @property
    def mean_nodes(self) -> float:
        return float(np.mean([np.mean(t.node_counts) for t in self.trials]))

    @property
    def mean_train_seconds(self) -> float:
        return float(np.mean([t.train_seconds for t in self.trials]))

    def summary(self) -> dict:
        tr, te = self.train_accuracies, self.test_accuracies
        return {
            "trials": len(self.trials),
            "train_accuracy_mean": float(tr.mean()),
            "train_accuracy_var": float(tr.var()),
            "test_accuracy_mean": float(te.mean()),
            "test_accuracy_var": float(te.var()),
            "mean_nodes": self.mean_nodes,
        }


def _auto_length(cfg: ExperimentConfig) -> int:
    need = 2 * max(a + b for a, b in zip(cfg.train_per_class, cfg.test_per_class))
    return cfg.window.length + (need - 1) * cfg.window.step


def synthetic_pool(cfg: ExperimentConfig, trial: int) -> LabeledFeatureSet:
    rng = np.random.default_rng(derive_seed(cfg.seed, trial, DATA_STREAM))
    length = cfg.dataset.recording_length or _auto_length(cfg)
    recs = [generate_synthetic_recording(spec, length, i, rng) for i, spec in enumerate(cfg.dataset.specs)]
    return extract_cloud_features(recs, cfg.window, denoise=cfg.denoise)


def csv_pool(cfg: ExperimentConfig, recordings: Optional[Sequence[Recording]] = None) -> LabeledFeatureSet:
    if recordings is None:
        recordings = load_csv_dataset(cfg.dataset.paths)
    bad = sorted({r.label for r in recordings if r.label >= cfg.n_classes})
    if bad:
        raise DataError(f"CSV labels {bad} exceed the {cfg.n_classes} classes configured in train_per_class")
    try:
        return extract_cloud_features(recordings, cfg.window, denoise=cfg.denoise)
    except ValueError as exc:
        raise DataError(str(exc)) from None


def split_pool(pool: LabeledFeatureSet, cfg: ExperimentConfig, rng: np.random.Generator):
    """Random per-class train/test partition of the window pool."""
    train_idx, test_idx = [], []
    for c in range(cfg.n_classes):
        idx = np.flatnonzero(pool.labels == c)
        n_tr, n_te = cfg.train_per_class[c], cfg.test_per_class[c]
        if len(idx) < n_tr + n_te:
            raise DataError(f"class {c} has {len(idx)} windows, needs {n_tr} train + {n_te} test")
        perm = rng.permutation(idx)
        train_idx.append(perm[:n_tr])
        test_idx.append(perm[n_tr:n_tr + n_te])
    return pool.take(np.concatenate(train_idx)), pool.take(np.concatenate(test_idx))


def split_hash(train: LabeledFeatureSet, test: LabeledFeatureSet) -> str:
    h = hashlib.sha256()
    for part in (train, test):
        h.update(np.ascontiguousarray(part.features).tobytes())
        h.update(np.ascontiguousarray(part.labels).tobytes())
    return h.hexdigest()[:16]


def sampler_request(cfg: ExperimentConfig, train: LabeledFeatureSet, seed: int) -> Optional[SamplerRequest]:
    sc = cfg.sampler
    if sc.method == "none":
        return None
    counts = train.class_counts()
    if sc.classes == "all":
        chosen = sorted(counts)
    else:
        top = max(counts.values())
        chosen = sorted(c for c, n in counts.items() if n < top)
    if not chosen:
        return None
    return SamplerRequest({c: sc.target for c in chosen}, sc.include_originals, seed)


def run_trial(cfg: ExperimentConfig, trial: int, pool: Optional[LabeledFeatureSet] = None) -> TrialResult:
    if pool is None:
        pool = synthetic_pool(cfg, trial)
    train, test = split_pool(pool, cfg, np.random.default_rng(derive_seed(cfg.seed, trial, SPLIT_STREAM)))
    m = cfg.n_classes
    req = sampler_request(cfg, train, derive_seed(cfg.seed, trial, SAMPLER_STREAM))
    scn_cfg = replace(cfg.classifier.scn, seed=derive_seed(cfg.seed, trial, SCN_STREAM))
    sampler = get_sampler(cfg.sampler.method, **cfg.sampler.options) if req is not None else None

    t0 = time.perf_counter()
    if cfg.classifier.kind == "scn":
        fit_set = sampler(train, req) if req is not None else train
        model = train_scn(fit_set, scn_cfg, n_classes=m)
        predict = lambda X: predict_scn(model, X)  # noqa: E731
        nodes = [model.n_nodes]
        train_rows = len(fit_set)
    else:
        if req is None:
            # no augmentation: members differ only by their SCN seeds
            req = SamplerRequest(1, seed=derive_seed(cfg.seed, trial, SAMPLER_STREAM))
            sampler = lambda data, r: data  # noqa: E731
        model = train_scn_cel(train, cfg.classifier.members, req, scn_cfg, m, sampler=sampler)
        predict = model.predict
        nodes = [mm.n_nodes for mm in model.members]
        train_rows = len(sampler(train, req))
    seconds = time.perf_counter() - t0

    train_acc = metrics(train.labels, predict(train.features), m).accuracy
    scores = metrics(test.labels, predict(test.features), m)
    return TrialResult(trial, train_acc, scores.accuracy, scores.confusion, nodes, train_rows,
                       split_hash(train, test), seconds)


def _trial_worker(args):
    cfg, trial, pool = args
    try:
        return run_trial(cfg, trial, pool)
    except DataError:
        raise
    except Exception as exc:
        raise RuntimeError(f"trial {trial} failed: {exc}") from exc


def run_experiment(cfg: ExperimentConfig, jobs: Optional[int] = None, write: bool = True) -> TrialReport:
    """Run every trial and aggregate; write reports when ``cfg.output`` is set."""
    if cfg.trials < 1:
        raise ConfigError("trials must be >= 1")
    jobs = default_jobs() if jobs is None else max(1, jobs)
    fixed_pool = csv_pool(cfg) if cfg.dataset.source == "csv" else None
    tasks = [(cfg, t, fixed_pool) for t in range(cfg.trials)]
    if jobs > 1 and cfg.trials > 1:
        with ProcessPoolExecutor(min(jobs, cfg.trials)) as pool:
            results = list(pool.map(_trial_worker, tasks))
    else:
        results = [_trial_worker(task) for task in tasks]
    names = list(cfg.dataset.classes) or [str(c) for c in range(cfg.n_classes)]
    report = TrialReport(cfg.name, cfg.n_classes, names, results, cfg.to_dict())
    for r in results:
        log.info("trial %d: train %.4f test %.4f", r.trial, r.train_accuracy, r.test_accuracy)
    if write and cfg.output:
        write_report(report, cfg.output)
    return report


@dataclass
class Comparison:
    reports: dict

    def table(self) -> list[dict]:
        rows = []
        for name, rep in self.reports.items():
            rows.append({"sampler": name, **rep.summary(), "mean_train_seconds": rep.mean_train_seconds})
        return rows

    def paired(self) -> bool:
        hashes = [tuple(t.split_hash for t in rep.trials) for rep in self.reports.values()]
        return all(h == hashes[0] for h in hashes)


def compare_samplers(cfg: ExperimentConfig, samplers: Sequence[str], jobs: Optional[int] = None,
                     write: bool = True) -> Comparison:
    """Run the same trials once per sampler; data splits are shared."""
    if not samplers:
        raise ConfigError("sampler list is empty")
    unknown = [s for s in samplers if s not in SAMPLERS + ("none",)]
    if unknown:
        raise ConfigError(f"sampler list: unknown sampler(s) {unknown}; choose from {', '.join(SAMPLERS)}, none")
    reports = {}
    for name in samplers:
        options = cfg.sampler.options if name == cfg.sampler.method else {}
        sub = replace(cfg, sampler=replace(cfg.sampler, method=name, options=options),
                      name=f"{cfg.name}:{name}", output=None)
        reports[name] = run_experiment(sub, jobs=jobs, write=False)
    comp = Comparison(reports)
    if write and cfg.output:
        write_comparison(comp, cfg.output)
    return comp
