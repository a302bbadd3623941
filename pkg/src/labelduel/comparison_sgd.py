"""Margin-gated stochastic training on graph-edge comparisons.

The student is a k x d matrix trained online: for each streamed point,
candidate class pairs come from a neighborhood graph; a pair is queried
only while the student's own margin on it is below a confidence gate.
Queried pairs contribute logistic terms log(1 + exp(-c * margin)) to an
accumulating buffer, and a gradient step is taken each time the buffer
fills. The buffer equalizes the number of parameter updates per queried
comparison across methods.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .graphs import NeighborhoodGraph
from .oracles import LinearModel, QueryLedger, check_points, comparison_query

__all__ = [
    "ComparisonSGDConfig",
    "pair_loss",
    "pair_loss_gradient",
    "train_comparison_sgd",
]

EDGE_MODES = ("iterate-all", "sample-one")


@dataclass
class ComparisonSGDConfig:
    """Hyperparameters for the margin-gated comparison trainer.

    ``confidence`` is the margin gate: a pair is queried only while the
    absolute student margin is strictly below it, so 0 disables querying
    entirely and ``math.inf`` queries every candidate pair.
    """

    graph: NeighborhoodGraph
    buffer_size: int = 32
    steps: int = 1000
    confidence: float = 0.5
    learning_rate: float = 0.1
    edge_mode: str = "iterate-all"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.graph.num_edges == 0:
            raise ValueError("graph must have at least one edge")
        if self.buffer_size < 1:
            raise ValueError("buffer_size must be at least 1")
        if self.steps < 1:
            raise ValueError("steps must be at least 1")
        if math.isnan(self.confidence) or self.confidence < 0:
            raise ValueError("confidence must be non-negative")
        if not (self.learning_rate > 0 and math.isfinite(self.learning_rate)):
            raise ValueError("learning_rate must be positive and finite")
        if self.edge_mode not in EDGE_MODES:
            raise ValueError(f"edge_mode must be one of {EDGE_MODES}")


def pair_loss(weights, x, i: int, j: int, c: float) -> float:
    """Logistic loss of one queried pair: log(1 + exp(-c * margin)).

    Evaluated as logaddexp(0, -c * margin): non-negative, stable for any
    margin, and decaying to 0 as c * margin grows.
    """
    if c not in (-1, 1, -1.0, 1.0):
        raise ValueError(f"comparison answer must be +1 or -1, got {c!r}")
    W = np.asarray(weights, dtype=float)
    delta = float((W[i] - W[j]) @ np.asarray(x, dtype=float))
    return float(np.logaddexp(0.0, -c * delta))


def pair_loss_gradient(weights, x, i: int, j: int, c: float) -> np.ndarray:
    """Gradient of :func:`pair_loss` in W: only rows i and j are nonzero.

    With margin delta = (w_i - w_j) @ x the row-i gradient is
    -c * sigmoid(-c * delta) * x and row j gets its negation.
    """
    W = np.asarray(weights, dtype=float)
    x = np.asarray(x, dtype=float)
    delta = float((W[i] - W[j]) @ x)
    g = -c * float(expit(-c * delta))
    grad = np.zeros_like(W)
    grad[i] = g * x
    grad[j] = -g * x
    return grad


def _as_stream(stream, d: int):
    if hasattr(stream, "points"):
        stream = stream.points
    if isinstance(stream, np.ndarray) or isinstance(stream, (list, tuple)):
        return iter(check_points(stream, d))
    return iter(stream)


def train_comparison_sgd(
    config: ComparisonSGDConfig,
    model: LinearModel,
    stream,
    ledger: QueryLedger,
    step_hook=None,
    log_path=None,
) -> tuple[LinearModel, int]:
    """Run the margin-gated trainer for ``config.steps`` streamed points.

    The student starts at zero, so every gated pair has margin 0 at
    first and querying is dense until the margins grow. Returns the
    trained model and the number of comparisons spent (which equals the
    ledger increment). ``step_hook(step, weights, queries)`` is called
    after every step; ``log_path`` appends one "step,queries,updates"
    row per gradient update.
    """
    W = np.zeros((model.k, model.d))
    rng = np.random.default_rng(config.seed)
    edges = config.graph.sorted_edges()
    tau = config.confidence
    eta = config.learning_rate

    buf_x: list[np.ndarray] = []
    buf_i: list[int] = []
    buf_j: list[int] = []
    buf_c: list[float] = []
    queries = 0
    updates = 0
    stream_iter = _as_stream(stream, model.d)
    log_fh = open(log_path, "a") if log_path is not None else None

    def flush() -> None:
        nonlocal W, updates
        X = np.stack(buf_x)
        ii = np.array(buf_i)
        jj = np.array(buf_j)
        cc = np.array(buf_c)
        deltas = np.einsum("nd,nd->n", W[ii] - W[jj], X)
        g = (-cc * expit(-cc * deltas))[:, None] * X
        grad = np.zeros_like(W)
        np.add.at(grad, ii, g)
        np.add.at(grad, jj, -g)
        W -= eta * grad
        if not np.all(np.isfinite(W)):
            raise ValueError("training diverged to non-finite weights; lower the learning rate")
        updates += 1
        buf_x.clear()
        buf_i.clear()
        buf_j.clear()
        buf_c.clear()

    try:
        for step in range(1, config.steps + 1):
            try:
                x = np.asarray(next(stream_iter), dtype=float)
            except StopIteration:
                raise ValueError(
                    f"stream exhausted after {step - 1} points; {config.steps} needed"
                ) from None
            if config.edge_mode == "sample-one":
                selected = [edges[int(rng.integers(len(edges)))]]
            else:
                selected = edges
            s = W @ x
            for i, j in selected:
                if abs(s[i] - s[j]) < tau:
                    answer = comparison_query(model, x, i, j, ledger)
                    buf_x.append(x)
                    buf_i.append(i)
                    buf_j.append(j)
                    buf_c.append(1.0 if answer else -1.0)
                    queries += 1
            if len(buf_x) >= config.buffer_size:
                flush()
                if log_fh is not None:
                    log_fh.write(f"{step},{queries},{updates}\n")
            if step_hook is not None:
                step_hook(step, W, queries)
    finally:
        if log_fh is not None:
            log_fh.close()
    return LinearModel(W), queries
