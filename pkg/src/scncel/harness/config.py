"""Experiment configuration: YAML/JSON documents -> validated dataclasses.

Every problem is reported as a :class:`ConfigError` naming the offending
key path, before any computation starts.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Optional

import yaml

from ..oversampling import SAMPLERS
from ..scn import DEFAULT_LAMBDAS, DEFAULT_R, ScnConfig
from ..signal_pipeline import WindowSpec
from .synthetic import PRESETS, PRESET_ORDER, SyntheticClassSpec


class ConfigError(ValueError):
    """Invalid experiment configuration."""


class DataError(ValueError):
    """Unreadable or inadequate input data."""


@dataclass(frozen=True)
class DatasetConfig:
    source: str = "synthetic"
    classes: tuple = PRESET_ORDER
    specs: tuple = tuple(PRESETS[c] for c in PRESET_ORDER)
    paths: tuple = ()
    recording_length: Optional[int] = None


@dataclass(frozen=True)
class SamplerConfig:
    method: str = "cloud"
    target: int = 70
    classes: str = "minority"
    include_originals: bool = False
    options: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ClassifierConfig:
    kind: str = "scn"
    members: int = 6
    scn: ScnConfig = field(default_factory=ScnConfig)


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    window: WindowSpec = field(default_factory=WindowSpec)
    denoise: bool = False
    train_per_class: tuple = (70, 10, 10, 10, 10, 10)
    test_per_class: tuple = (30,) * 6
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    classifier: ClassifierConfig = field(default_factory=ClassifierConfig)
    trials: int = 20
    seed: int = 0
    output: Optional[str] = None
    name: str = "experiment"

    @property
    def n_classes(self) -> int:
        return len(self.train_per_class)

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["window"] = {"length": self.window.length, "step": self.window.step}
        doc["classifier"]["scn"] = asdict(self.classifier.scn)
        doc["classifier"]["scn"]["lambdas"] = list(self.classifier.scn.lambdas)
        doc["classifier"]["scn"]["r_sequence"] = list(self.classifier.scn.r_sequence)
        doc["dataset"]["classes"] = list(self.dataset.classes)
        doc["dataset"]["specs"] = [asdict(s) for s in self.dataset.specs]
        doc["dataset"]["paths"] = list(self.dataset.paths)
        doc["train_per_class"] = list(self.train_per_class)
        doc["test_per_class"] = list(self.test_per_class)
        return doc

    def replace(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)


def _take(doc: dict, allowed: set, where: str) -> dict:
    if doc is None:
        return {}
    if not isinstance(doc, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(doc).__name__}")
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(map(str, unknown))}")
    return doc


def _int(value, where: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{where}: must be >= {minimum}, got {value}")
    return value


def _float(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _bool(value, where: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"{where}: expected true/false, got {value!r}")
    return value


def _per_class(value, m: int, where: str, minimum: int) -> tuple:
    if isinstance(value, int) and not isinstance(value, bool):
        return (_int(value, where, minimum),) * m
    if isinstance(value, (list, tuple)):
        if len(value) != m:
            raise ConfigError(f"{where}: expected {m} entries (one per class), got {len(value)}")
        return tuple(_int(v, f"{where}[{i}]", minimum) for i, v in enumerate(value))
    raise ConfigError(f"{where}: expected an integer or a list of {m} integers")


def _dataset(doc, base: Path | None) -> DatasetConfig:
    doc = _take(doc, {"source", "classes", "specs", "paths", "recording_length"}, "dataset")
    source = doc.get("source", "synthetic")
    if source not in ("synthetic", "csv"):
        raise ConfigError(f"dataset.source: expected 'synthetic' or 'csv', got {source!r}")
    length = doc.get("recording_length")
    if length is not None:
        length = _int(length, "dataset.recording_length", 2)
    if source == "csv":
        paths = doc.get("paths")
        if not paths or not isinstance(paths, list):
            raise ConfigError("dataset.paths: a non-empty list of CSV files is required for source 'csv'")
        resolved = tuple(str((base / p) if base and not Path(p).is_absolute() else Path(p)) for p in paths)
        return DatasetConfig(source="csv", classes=(), paths=resolved)
    specs_doc = doc.get("specs")
    classes = doc.get("classes", list(PRESET_ORDER))
    if specs_doc is not None:
        if not isinstance(specs_doc, list) or not specs_doc:
            raise ConfigError("dataset.specs: expected a non-empty list of signal specs")
        specs = []
        for i, s in enumerate(specs_doc):
            where = f"dataset.specs[{i}]"
            s = _take(s, {"name", "amplitude", "impulse_rate", "impulse_jitter", "noise_std", "carrier_freq"}, where)
            kwargs = {k: _float(v, f"{where}.{k}") for k, v in s.items() if k != "name"}
            try:
                specs.append(SyntheticClassSpec(**kwargs))
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{where}: {exc}") from None
        names = tuple(str(s.get("name", f"class{i}")) for i, s in enumerate(specs_doc))
        return DatasetConfig("synthetic", names, tuple(specs), (), length)
    if not isinstance(classes, list) or not classes:
        raise ConfigError("dataset.classes: expected a non-empty list of preset names")
    unknown = [c for c in classes if c not in PRESETS]
    if unknown:
        raise ConfigError(f"dataset.classes: unknown preset(s) {unknown}; known: {', '.join(PRESETS)}")
    return DatasetConfig("synthetic", tuple(classes), tuple(PRESETS[c] for c in classes), (), length)


def _scn(doc, where="classifier.scn") -> ScnConfig:
    doc = _take(doc, {"t_max", "l_max", "tol", "lambdas", "r_sequence"}, where)
    kwargs: dict[str, Any] = {}
    for key in ("t_max", "l_max"):
        if key in doc:
            kwargs[key] = _int(doc[key], f"{where}.{key}", 1)
    if "tol" in doc:
        kwargs["tol"] = _float(doc["tol"], f"{where}.tol")
    for key in ("lambdas", "r_sequence"):
        if key in doc:
            if not isinstance(doc[key], list):
                raise ConfigError(f"{where}.{key}: expected a list of numbers")
            kwargs[key] = tuple(_float(v, f"{where}.{key}[{i}]") for i, v in enumerate(doc[key]))
    try:
        return ScnConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _sampler(doc) -> SamplerConfig:
    doc = _take(doc, {"method", "target", "classes", "include_originals", "options"}, "sampler")
    method = doc.get("method", "cloud")
    if method not in SAMPLERS + ("none",):
        raise ConfigError(f"sampler.method: unknown method {method!r}; choose from {', '.join(SAMPLERS)}, none")
    target = _int(doc.get("target", 70), "sampler.target", 1)
    classes = doc.get("classes", "minority")
    if classes not in ("minority", "all"):
        raise ConfigError(f"sampler.classes: expected 'minority' or 'all', got {classes!r}")
    options = doc.get("options") or {}
    allowed = {"smote": {"k"}, "adasyn": {"k", "balance_threshold"}, "kde": {"bandwidth"}}.get(method, set())
    _take(options, allowed, "sampler.options")
    return SamplerConfig(method, target, classes,
                         _bool(doc.get("include_originals", False), "sampler.include_originals"), dict(options))


def _classifier(doc) -> ClassifierConfig:
    doc = _take(doc, {"kind", "members", "scn"}, "classifier")
    kind = doc.get("kind", "scn")
    if kind not in ("scn", "scn-cel"):
        raise ConfigError(f"classifier.kind: expected 'scn' or 'scn-cel', got {kind!r}")
    members = _int(doc.get("members", 6), "classifier.members", 1)
    return ClassifierConfig(kind, members, _scn(doc.get("scn")))


def config_from_dict(doc: dict, base: Path | None = None) -> ExperimentConfig:
    doc = _take(doc, {"name", "dataset", "window", "denoise", "train_per_class", "test_per_class",
                      "sampler", "classifier", "trials", "seed", "output"}, "config")
    dataset = _dataset(doc.get("dataset"), base)
    wdoc = _take(doc.get("window"), {"length", "step"}, "window")
    window = WindowSpec(_int(wdoc.get("length", 500), "window.length", 2),
                        _int(wdoc.get("step", 200), "window.step", 1))
    if dataset.source == "synthetic":
        m = len(dataset.classes)
    else:
        # class count comes from the CSV labels; per-class lists must agree
        tp = doc.get("train_per_class")
        m = len(tp) if isinstance(tp, list) else None
        if m is None:
            raise ConfigError("train_per_class: a per-class list is required for CSV datasets")
    train = _per_class(doc.get("train_per_class", [70] + [10] * (m - 1)), m, "train_per_class", 1)
    test = _per_class(doc.get("test_per_class", 30), m, "test_per_class", 1)
    output = doc.get("output")
    if output is not None:
        output = str((base / output) if base and not Path(output).is_absolute() else Path(output))
    return ExperimentConfig(
        dataset=dataset,
        window=window,
        denoise=_bool(doc.get("denoise", False), "denoise"),
        train_per_class=train,
        test_per_class=test,
        sampler=_sampler(doc.get("sampler")),
        classifier=_classifier(doc.get("classifier")),
        trials=_int(doc.get("trials", 20), "trials", 1),
        seed=_int(doc.get("seed", 0), "seed", 0),
        output=output,
        name=str(doc.get("name", "experiment")),
    )


def load_config(path) -> ExperimentConfig:
    """Read a YAML (or JSON) experiment file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return config_from_dict(doc, base=path.parent)


__all__ = [
    "ConfigError", "DataError", "DatasetConfig", "SamplerConfig", "ClassifierConfig",
    "ExperimentConfig", "config_from_dict", "load_config", "DEFAULT_LAMBDAS", "DEFAULT_R",
]
