"""Tournament baselines: spend comparisons to simulate argmax supervision.

A sequential champion scan over the classes reveals the argmax with
exactly k - 1 comparisons. The passive learner reveals the label of
every uncertain point this way and trains a softmax student on the
revealed labels; the active variant lets a confident student answer
individual duels itself, saving oracle comparisons.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .oracles import LinearModel, QueryLedger, check_points, comparison_query

__all__ = [
    "TournamentResult",
    "TournamentConfig",
    "champion_tournament",
    "active_tournament",
    "passive_tournament_learner",
    "active_tournament_learner",
]


@dataclass(frozen=True)
class TournamentResult:
    """Outcome of one champion scan: winner, duel trace, oracle spend."""

    winner: int
    duels: tuple[tuple[int, int, str], ...]  # (champion, challenger, answered-by)
    oracle_queries: int


def champion_tournament(model: LinearModel, x, ledger: QueryLedger) -> TournamentResult:
    """Reveal the argmax at x with exactly k - 1 oracle comparisons.

    Ascending label scan: the challenger dethrones the champion only on
    a strict win, so the earlier champion survives exact ties and the
    winner always matches the argmax oracle's lowest-index tie-break.
    """
    champion = 0
    duels = []
    for challenger in range(1, model.k):
        wins = comparison_query(model, x, challenger, champion, ledger)
        duels.append((champion, challenger, "oracle"))
        if wins:
            champion = challenger
    return TournamentResult(champion, tuple(duels), model.k - 1)


def active_tournament(
    student, model: LinearModel, x, tau: float, ledger: QueryLedger
) -> TournamentResult:
    """Champion scan where a confident student answers duels itself.

    A duel with student margin at least tau is answered by the student
    (free); otherwise the oracle answers and is charged. Note the gate
    direction: tau = 0 means the student answers everything, while
    tau = inf sends every duel to the oracle.
    """
    sw = student.weights if isinstance(student, LinearModel) else np.asarray(student, dtype=float)
    s = sw @ np.asarray(x, dtype=float)
    champion = 0
    duels = []
    oracle_queries = 0
    for challenger in range(1, sw.shape[0]):
        if abs(s[challenger] - s[champion]) >= tau:
            wins = bool(s[challenger] > s[champion])
            source = "model"
        else:
            wins = comparison_query(model, x, challenger, champion, ledger)
            source = "oracle"
            oracle_queries += 1
        duels.append((champion, challenger, source))
        if wins:
            champion = challenger
    return TournamentResult(champion, tuple(duels), oracle_queries)


@dataclass
class TournamentConfig:
    """Hyperparameters shared by the tournament learners.

    ``margin`` gates which points get their label revealed (query while
    the student's top-two logit gap is strictly below it); ``duel_margin``
    is the active variant's per-duel confidence gate.
    """

    buffer_size: int = 32
    steps: int = 1000
    margin: float = 0.5
    learning_rate: float = 0.1
    duel_margin: float = math.inf

    def __post_init__(self) -> None:
        if self.buffer_size < 1:
            raise ValueError("buffer_size must be at least 1")
        if self.steps < 1:
            raise ValueError("steps must be at least 1")
        if math.isnan(self.margin) or self.margin < 0:
            raise ValueError("margin must be non-negative")
        if not (self.learning_rate > 0 and math.isfinite(self.learning_rate)):
            raise ValueError("learning_rate must be positive and finite")
        if math.isnan(self.duel_margin) or self.duel_margin < 0:
            raise ValueError("duel_margin must be non-negative")


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def _as_stream(stream, d: int):
    if hasattr(stream, "points"):
        stream = stream.points
    if isinstance(stream, (np.ndarray, list, tuple)):
        return iter(check_points(stream, d))
    return iter(stream)


def _tournament_train(
    config: TournamentConfig,
    model: LinearModel,
    stream,
    ledger: QueryLedger,
    active: bool,
    step_hook=None,
    log_path=None,
) -> tuple[LinearModel, int]:
    W = np.zeros((model.k, model.d))
    buf_x: list[np.ndarray] = []
    buf_y: list[int] = []
    pending = 0  # comparisons accumulated toward the next update
    queries = 0
    updates = 0
    stream_iter = _as_stream(stream, model.d)
    log_fh = open(log_path, "a") if log_path is not None else None

    def flush() -> None:
        nonlocal W, updates, pending
        X = np.stack(buf_x)
        P = _softmax(X @ W.T)
        P[np.arange(len(buf_y)), buf_y] -= 1.0
        W -= config.learning_rate * (P.T @ X)
        if not np.all(np.isfinite(W)):
            raise ValueError("training diverged to non-finite weights; lower the learning rate")
        updates += 1
        pending = 0
        buf_x.clear()
        buf_y.clear()

    try:
        for step in range(1, config.steps + 1):
            try:
                x = np.asarray(next(stream_iter), dtype=float)
            except StopIteration:
                raise ValueError(
                    f"stream exhausted after {step - 1} points; {config.steps} needed"
                ) from None
            s = W @ x
            top2 = np.partition(s, -2)[-2:]
            if top2[1] - top2[0] < config.margin:
                if active:
                    result = active_tournament(W, model, x, config.duel_margin, ledger)
                else:
                    result = champion_tournament(model, x, ledger)
                queries += result.oracle_queries
                pending += result.oracle_queries
                buf_x.append(x)
                buf_y.append(result.winner)
            if pending >= config.buffer_size and buf_x:
                flush()
                if log_fh is not None:
                    log_fh.write(f"{step},{queries},{updates}\n")
            if step_hook is not None:
                step_hook(step, W, queries)
    finally:
        if log_fh is not None:
            log_fh.close()
    return LinearModel(W), queries


def passive_tournament_learner(
    config: TournamentConfig,
    model: LinearModel,
    stream,
    ledger: QueryLedger,
    step_hook=None,
    log_path=None,
) -> tuple[LinearModel, int]:
    """Train a softmax student on labels revealed by full tournaments.

    Each point whose top-two logit gap is below the margin costs k - 1
    comparisons; revealed labels are buffered and applied once the
    accumulated comparisons fill the buffer.
    """
    return _tournament_train(config, model, stream, ledger, False, step_hook, log_path)


def active_tournament_learner(
    config: TournamentConfig,
    model: LinearModel,
    stream,
    ledger: QueryLedger,
    step_hook=None,
    log_path=None,
) -> tuple[LinearModel, int]:
    """Like the passive learner, but the student answers confident duels.

    With ``duel_margin = inf`` this degenerates to the passive learner
    exactly: same queries, same updates, same weights.
    """
    return _tournament_train(config, model, stream, ledger, True, step_hook, log_path)
