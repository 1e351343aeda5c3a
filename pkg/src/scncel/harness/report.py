"""Machine-readable experiment reports.

``report.json`` holds everything that is a deterministic function of the
configuration and seed, so repeated runs produce byte-identical files.
Wall-clock timings go to ``timing.csv`` instead.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import jsonschema
import numpy as np

REPORT_FORMAT = "scncel.report"
REPORT_VERSION = 1

_number = {"type": "number"}
_accuracy = {"type": "number", "minimum": 0, "maximum": 1}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["format", "version", "name", "n_classes", "class_names", "config", "summary",
                 "confusion", "trials"],
    "properties": {
        "format": {"const": REPORT_FORMAT},
        "version": {"const": REPORT_VERSION},
        "name": {"type": "string"},
        "n_classes": {"type": "integer", "minimum": 1},
        "class_names": {"type": "array", "items": {"type": "string"}},
        "config": {"type": "object"},
        "summary": {
            "type": "object",
            "required": ["trials", "train_accuracy_mean", "train_accuracy_var",
                         "test_accuracy_mean", "test_accuracy_var", "mean_nodes"],
            "properties": {
                "trials": {"type": "integer", "minimum": 1},
                "train_accuracy_mean": _accuracy,
                "test_accuracy_mean": _accuracy,
                "train_accuracy_var": _number,
                "test_accuracy_var": _number,
                "mean_nodes": _number,
            },
        },
        "confusion": {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
        "trials": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["trial", "train_accuracy", "test_accuracy", "node_counts", "train_rows",
                             "split_hash", "confusion"],
                "properties": {
                    "trial": {"type": "integer", "minimum": 0},
                    "train_accuracy": _accuracy,
                    "test_accuracy": _accuracy,
                    "node_counts": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    "train_rows": {"type": "integer", "minimum": 1},
                    "split_hash": {"type": "string"},
                    "confusion": {"type": "array"},
                },
            },
        },
    },
}

TRIAL_COLUMNS = ["trial", "train_accuracy", "test_accuracy", "mean_nodes", "train_rows", "split_hash"]


def report_to_dict(report) -> dict:
    return {
        "format": REPORT_FORMAT,
        "version": REPORT_VERSION,
        "name": report.name,
        "n_classes": report.n_classes,
        "class_names": list(report.class_names),
        "config": report.config,
        "summary": report.summary(),
        "confusion": report.confusion.tolist(),
        "trials": [
            {
                "trial": t.trial,
                "train_accuracy": t.train_accuracy,
                "test_accuracy": t.test_accuracy,
                "node_counts": [int(n) for n in t.node_counts],
                "train_rows": int(t.train_rows),
                "split_hash": t.split_hash,
                "confusion": np.asarray(t.confusion).tolist(),
            }
            for t in report.trials
        ],
    }


def validate_report(doc: dict) -> None:
    jsonschema.validate(doc, REPORT_SCHEMA)


def dumps_report(report) -> str:
    doc = report_to_dict(report)
    validate_report(doc)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _write_rows(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def write_report(report, outdir) -> Path:
    """Write ``report.json``, ``trials.csv``, ``confusion.csv`` and ``timing.csv``."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(dumps_report(report), encoding="utf-8")
    _write_rows(out / "trials.csv", TRIAL_COLUMNS, [
        [t.trial, repr(t.train_accuracy), repr(t.test_accuracy), repr(float(np.mean(t.node_counts))),
         t.train_rows, t.split_hash]
        for t in report.trials
    ])
    _write_rows(out / "confusion.csv", ["true"] + list(report.class_names),
                [[name, *row] for name, row in zip(report.class_names, report.confusion.tolist())])
    _write_rows(out / "timing.csv", ["trial", "train_seconds"],
                [[t.trial, f"{t.train_seconds:.6f}"] for t in report.trials])
    return out / "report.json"


def read_trials_csv(path) -> list[dict]:
    """Load ``trials.csv`` back into typed rows."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    casts = {"trial": int, "train_accuracy": float, "test_accuracy": float, "mean_nodes": float,
             "train_rows": int, "split_hash": str}
    return [{k: casts[k](v) for k, v in row.items()} for row in rows]


def write_comparison(comparison, outdir) -> Path:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    for name, rep in comparison.reports.items():
        write_report(rep, out / name)
    table = comparison.table()
    doc = {
        "format": "scncel.comparison",
        "version": REPORT_VERSION,
        "paired": comparison.paired(),
        "samplers": [{k: v for k, v in row.items() if k != "mean_train_seconds"} for row in table],
    }
    (out / "comparison.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    header = ["sampler", "trials", "train_accuracy_mean", "train_accuracy_var", "test_accuracy_mean",
              "test_accuracy_var", "mean_nodes", "mean_train_seconds"]
    _write_rows(out / "comparison.csv", header, [[row[h] for h in header] for row in table])
    return out / "comparison.json"
