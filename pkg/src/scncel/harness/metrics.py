from __future__ import annotations

from typing import NamedTuple

import numpy as np


class Scores(NamedTuple):
    accuracy: float
    confusion: np.ndarray


def metrics(true, pred, m: int) -> Scores:
    """Accuracy and ``confusion[i, j] = #(true == i and pred == j)``."""
    true = np.asarray(true, dtype=int).ravel()
    pred = np.asarray(pred, dtype=int).ravel()
    if true.shape != pred.shape:
        raise ValueError(f"length mismatch: {true.size} true vs {pred.size} predicted labels")
    confusion = np.zeros((m, m), dtype=int)
    np.add.at(confusion, (true, pred), 1)
    acc = float(np.mean(true == pred)) if true.size else float("nan")
    return Scores(acc, confusion)
