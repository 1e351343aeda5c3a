"""CSV input/output for recordings, feature tables and predicted labels.

Recording CSV: UTF-8, header row with ``label`` and ``value`` columns and
an optional ``recording_id`` column. Rows are grouped by
``recording_id`` (one recording per file when the column is absent),
keeping file order within each recording.

Feature CSV: header ``label,<feature names...>``, one row per window.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..signal_pipeline import LabeledFeatureSet, Recording
from .config import DataError


def _open_rows(path: Path):
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"{path}: cannot open ({exc.strerror})") from None
    return fh


def _parse_label(text: str, path, line: int) -> int:
    try:
        value = int(text)
    except (TypeError, ValueError):
        raise DataError(f"{path}:{line}: label {text!r} is not an integer") from None
    if value < 0:
        raise DataError(f"{path}:{line}: label must be >= 0, got {value}")
    return value


def _parse_float(text: str, column: str, path, line: int) -> float:
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise DataError(f"{path}:{line}: {column} {text!r} is not a number") from None
    if not np.isfinite(value):
        raise DataError(f"{path}:{line}: {column} is not finite")
    return value


def load_csv_recordings(path) -> list[Recording]:
    """Recordings from a single CSV file."""
    path = Path(path)
    with _open_rows(path) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataError(f"{path}: empty file")
        header = [h.strip() for h in header]
        if "label" not in header or "value" not in header:
            raise DataError(f"{path}:1: header must contain 'label' and 'value' columns, got {header}")
        i_label, i_value = header.index("label"), header.index("value")
        i_id = header.index("recording_id") if "recording_id" in header else None
        groups: dict[str, tuple[int, list[float]]] = {}
        for line, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DataError(f"{path}:{line}: expected {len(header)} fields, got {len(row)}")
            label = _parse_label(row[i_label].strip(), path, line)
            value = _parse_float(row[i_value].strip(), "value", path, line)
            key = row[i_id].strip() if i_id is not None else ""
            if key not in groups:
                groups[key] = (label, [])
            elif groups[key][0] != label:
                raise DataError(f"{path}:{line}: recording {key!r} changes label "
                                f"from {groups[key][0]} to {label}")
            groups[key][1].append(value)
    if not groups:
        raise DataError(f"{path}: no data rows")
    return [Recording(np.asarray(values), label, {"source": str(path), "recording_id": key})
            for key, (label, values) in groups.items()]


def load_csv_dataset(paths: Iterable) -> list[Recording]:
    """Recordings from several CSV files, in file then first-appearance order."""
    out: list[Recording] = []
    for p in paths:
        out.extend(load_csv_recordings(p))
    if not out:
        raise DataError("no recordings loaded")
    return out


def write_recordings_csv(recordings: Sequence[Recording], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["recording_id", "label", "value"])
        for i, rec in enumerate(recordings):
            rid = rec.meta.get("recording_id") or f"r{i}"
            for v in rec.samples:
                w.writerow([rid, rec.label, repr(float(v))])


def write_features_csv(data: LabeledFeatureSet, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["label", *data.names])
        for label, row in zip(data.labels, data.features):
            w.writerow([int(label), *(repr(float(v)) for v in row)])


def read_features_csv(path, require_labels: bool = True) -> LabeledFeatureSet:
    """Read a feature table. Without a ``label`` column (and
    ``require_labels=False``) every row gets label 0."""
    path = Path(path)
    with _open_rows(path) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataError(f"{path}: empty file")
        header = [h.strip() for h in header]
        has_label = "label" in header
        if require_labels and not has_label:
            raise DataError(f"{path}:1: header must contain a 'label' column")
        names = [h for h in header if h != "label"]
        if not names:
            raise DataError(f"{path}:1: no feature columns")
        feats, labels = [], []
        for line, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DataError(f"{path}:{line}: expected {len(header)} fields, got {len(row)}")
            rec = dict(zip(header, (c.strip() for c in row)))
            labels.append(_parse_label(rec["label"], path, line) if has_label else 0)
            feats.append([_parse_float(rec[n], n, path, line) for n in names])
    if not feats:
        raise DataError(f"{path}: no data rows")
    return LabeledFeatureSet(np.asarray(feats), np.asarray(labels), names)


def write_labels_csv(pred: np.ndarray, path, true: np.ndarray | None = None) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["row", "predicted"] + (["label"] if true is not None else []))
        for i, p in enumerate(pred):
            w.writerow([i, int(p)] + ([int(true[i])] if true is not None else []))
