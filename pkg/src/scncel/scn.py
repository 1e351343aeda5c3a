"""Stochastic configuration network (SC-III variant).

Hidden sigmoid nodes are added one at a time. For every node, random
candidates are drawn over a ladder of weight scales and accepted only if
they satisfy the supervisory inequality against the current residual;
after each addition all output weights are re-solved by least squares.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import expit

from .signal_pipeline import LabeledFeatureSet

MODEL_FORMAT = "scncel.scn"
MODEL_VERSION = 1

DEFAULT_LAMBDAS = (0.5, 1, 5, 10, 30, 50, 100, 150, 200, 250)
DEFAULT_R = (0.9, 0.99, 0.999, 0.9999, 0.99999, 0.999999)
PINV_RCOND = 1e-12


@dataclass(frozen=True)
class ScnConfig:
    """Construction hyperparameters.

    t_max : candidates drawn per weight scale when searching a node
    l_max : hidden node budget
    tol   : training RMSE at which construction stops
    lambdas : ascending weight/bias sampling half-widths
    r_sequence : ascending relaxation factors in (0, 1)
    """

    t_max: int = 100
    l_max: int = 150
    tol: float = 0.1
    lambdas: tuple = DEFAULT_LAMBDAS
    r_sequence: tuple = DEFAULT_R
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "lambdas", tuple(float(v) for v in self.lambdas))
        object.__setattr__(self, "r_sequence", tuple(float(v) for v in self.r_sequence))
        if self.t_max < 1:
            raise ValueError("t_max must be >= 1")
        if self.l_max < 1:
            raise ValueError("l_max must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be > 0")
        if not self.lambdas or any(v <= 0 for v in self.lambdas) or list(self.lambdas) != sorted(self.lambdas):
            raise ValueError("lambdas must be a non-empty ascending sequence of positive values")
        if (not self.r_sequence or any(not 0 < r < 1 for r in self.r_sequence)
                or list(self.r_sequence) != sorted(self.r_sequence)):
            raise ValueError("r_sequence must be a non-empty ascending sequence in (0, 1)")


@dataclass(frozen=True)
class ScnModel:
    weights: np.ndarray        # (L, d)
    biases: np.ndarray         # (L,)
    beta: np.ndarray           # (L, m)
    n_classes: int
    rmse_trace: tuple = ()
    converged: bool = False
    train_accuracy: float = float("nan")
    activation: str = "sigmoid"
    seed: Optional[int] = field(default=None, compare=False)

    @property
    def input_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def n_nodes(self) -> int:
        return self.weights.shape[0]

    def hidden(self, X) -> np.ndarray:
        X = _check_input(X, self.input_dim)
        return expit(X @ self.weights.T + self.biases)

    def decision_function(self, X) -> np.ndarray:
        return self.hidden(X) @ self.beta

    def predict(self, X) -> np.ndarray:
        return predict_scn(self, X)

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "activation": self.activation,
            "input_dim": self.input_dim,
            "n_nodes": self.n_nodes,
            "n_classes": self.n_classes,
            "converged": self.converged,
            "train_accuracy": self.train_accuracy,
            "seed": self.seed,
            "rmse_trace": list(self.rmse_trace),
            "weights": self.weights.tolist(),
            "biases": self.biases.tolist(),
            "beta": self.beta.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ScnModel":
        if doc.get("format") != MODEL_FORMAT:
            raise ValueError(f"not an SCN model document (format={doc.get('format')!r})")
        if doc.get("version") != MODEL_VERSION:
            raise ValueError(f"unsupported SCN model version {doc.get('version')!r}")
        d, L, m = int(doc["input_dim"]), int(doc["n_nodes"]), int(doc["n_classes"])
        W = np.asarray(doc["weights"], dtype=float).reshape(L, d)
        b = np.asarray(doc["biases"], dtype=float).reshape(L)
        beta = np.asarray(doc["beta"], dtype=float).reshape(L, m)
        return cls(W, b, beta, m, tuple(doc.get("rmse_trace", ())), bool(doc.get("converged", False)),
                   float(doc.get("train_accuracy", float("nan"))), doc.get("activation", "sigmoid"),
                   doc.get("seed"))

    def dumps(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def loads(cls, text: str) -> "ScnModel":
        return cls.from_dict(json.loads(text))


def _check_input(X, d: int) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.shape[1] != d:
        raise ValueError(f"input has {X.shape[1]} columns, model expects {d}")
    return X


def one_hot(labels: Sequence[int], m: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=int).ravel()
    if labels.size and (labels.min() < 0 or labels.max() >= m):
        raise ValueError(f"label out of range for {m} classes")
    T = np.zeros((labels.size, m))
    T[np.arange(labels.size), labels] = 1.0
    return T


def rmse(E: np.ndarray) -> float:
    """sqrt(sum of squared residuals / rows)."""
    return math.sqrt(float(np.sum(E * E)) / E.shape[0])


def supervisory_scores(E: np.ndarray, Hc: np.ndarray, r: float) -> np.ndarray:
    """xi_q = (e_q.h)^2 / (h.h) - (1 - r) e_q.e_q for every output q and
    candidate column of ``Hc``; shape ``(m, candidates)``."""
    proj = E.T @ Hc
    hh = np.einsum("ij,ij->j", Hc, Hc)
    ee = np.einsum("ij,ij->j", E, E)
    return proj**2 / hh - (1.0 - r) * ee[:, None]


def search_node(X, E, cfg: ScnConfig, rng: np.random.Generator):
    """Find one admissible hidden node, or ``None`` when every scale and
    relaxation level is exhausted.

    Among admissible candidates the one with the largest summed score
    wins, lowest candidate index on ties.
    """
    d = X.shape[1]
    for lam in cfg.lambdas:
        Wc = lam * (2.0 * rng.random((cfg.t_max, d)) - 1.0)
        bc = lam * (2.0 * rng.random(cfg.t_max) - 1.0)
        Hc = expit(X @ Wc.T + bc)
        # the projection term does not depend on r
        with np.errstate(divide="ignore", invalid="ignore"):
            gain = supervisory_scores(E, Hc, 1.0)
        ee = np.einsum("ij,ij->j", E, E)[:, None]
        for r in cfg.r_sequence:
            xi = gain - (1.0 - r) * ee
            ok = np.all(xi >= 0, axis=0)
            if ok.any():
                score = np.where(ok, xi.sum(axis=0), -np.inf)
                j = int(np.argmax(score))
                return Wc[j], bc[j]
    return None


StepCallback = Callable[[int, np.ndarray, np.ndarray, np.ndarray], None]


def build_network(X, T, cfg: ScnConfig, on_step: StepCallback | None = None):
    """Grow a network for target matrix ``T``.

    Returns ``(W, b, beta, trace, converged)``. ``on_step(L, H, beta, T)``
    is called after every node addition.
    """
    X = np.asarray(X, dtype=float)
    T = np.asarray(T, dtype=float)
    if T.ndim == 1:
        T = T[:, None]
    n, d = X.shape
    if n < 1 or d < 1:
        raise ValueError("need at least one row and one feature")
    rng = np.random.default_rng(cfg.seed)
    W = np.empty((0, d))
    b = np.empty(0)
    H = np.empty((n, 0))
    beta = np.empty((0, T.shape[1]))
    E = T.copy()
    err = rmse(E)
    trace = []
    while len(b) < cfg.l_max and err > cfg.tol:
        node = search_node(X, E, cfg, rng)
        if node is None:
            break
        w, bias = node
        W = np.vstack([W, w])
        b = np.append(b, bias)
        H = np.column_stack([H, expit(X @ w + bias)])
        beta = np.linalg.pinv(H, rcond=PINV_RCOND) @ T
        E = T - H @ beta
        err = rmse(E)
        trace.append(err)
        if on_step is not None:
            on_step(len(b), H, beta, T)
    return W, b, beta, tuple(trace), err <= cfg.tol


def train_scn(train: LabeledFeatureSet, cfg: ScnConfig, n_classes: int | None = None,
              on_step: StepCallback | None = None) -> ScnModel:
    """Train a classifier on one-hot targets.

    Construction stops at the RMSE tolerance, at ``l_max`` nodes, or when
    no admissible candidate exists; ``converged`` records whether the
    tolerance was reached.
    """
    if len(train) < 1:
        raise ValueError("need at least one training row")
    m = n_classes if n_classes is not None else train.n_classes
    T = one_hot(train.labels, m)
    W, b, beta, trace, converged = build_network(train.features, T, cfg, on_step)
    model = ScnModel(W, b, beta, m, trace, converged, seed=cfg.seed)
    acc = float(np.mean(predict_scn(model, train.features) == train.labels)) if model.n_nodes else 0.0
    return ScnModel(W, b, beta, m, trace, converged, acc, seed=cfg.seed)


def predict_scn(model: ScnModel, rows) -> np.ndarray:
    """Arg-max class of the network output; lowest index wins ties."""
    X = _check_input(rows, model.input_dim)
    if model.n_nodes == 0:
        return np.zeros(len(X), dtype=int)
    return np.argmax(model.decision_function(X), axis=1)
