"""Desk-scale experiment harness: teachers, sparsity sweeps, method races.

Everything here is seeded and bit-reproducible: child seeds are derived
with ``numpy.random.SeedSequence`` from the top-level seed plus stable
integer coordinates, never from process state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .comparison_sgd import ComparisonSGDConfig, train_comparison_sgd
from .graphs import complete_graph, empirical_graph, sparsity_level, true_graph
from .oracles import Dataset, LinearModel, QueryLedger, effective_classes, load_dataset, sample_sphere
from .tournaments import TournamentConfig, active_tournament_learner, passive_tournament_learner

__all__ = [
    "random_teacher",
    "topk_accuracy",
    "sparsity_experiment",
    "SuiteConfig",
    "ExperimentRun",
    "run_comparison_suite",
    "matched_accuracy_table",
    "mean_trajectories",
    "ingest_and_project",
    "fit_linear_teacher",
]

SUITE_METHODS = (
    "comparison_sgd:true",
    "comparison_sgd:empirical",
    "comparison_sgd:complete",
    "passive_tournament",
    "active_tournament",
)


def _child_seed(*parts: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(p) for p in parts])


def random_teacher(d: int, k_hat: int, seed) -> LinearModel:
    """Draw a teacher with i.i.d. Gaussian rows, each normalized to unit length."""
    if d < 1 or k_hat < 2:
        raise ValueError("need d >= 1 and k_hat >= 2")
    rng = np.random.default_rng(seed)
    W = rng.standard_normal((k_hat, d))
    W /= np.linalg.norm(W, axis=1, keepdims=True)
    return LinearModel(W)


def topk_accuracy(student, teacher: LinearModel, testset, fraction: float = 0.1) -> float:
    """Fraction of test points whose teacher argmax is in the student's top K.

    K = max(1, ceil(fraction * k)); student ties break by class index.
    """
    if not (0 < fraction <= 1):
        raise ValueError("fraction must lie in (0, 1]")
    sw = student.weights if isinstance(student, LinearModel) else np.asarray(student, dtype=float)
    X = testset.points if isinstance(testset, Dataset) else np.asarray(testset, dtype=float)
    k = sw.shape[0]
    K = max(1, math.ceil(fraction * k))
    student_scores = X @ sw.T
    top = np.argsort(-student_scores, axis=1, kind="stable")[:, :K]
    truth = teacher.predict(X)
    return float(np.mean(np.any(top == truth[:, None], axis=1)))


def sparsity_experiment(
    d_values,
    k_hat_values,
    trials: int = 25,
    seed: int = 0,
    n_train: int = 2000,
    mc_samples: int = 2048,
    mc_tol: float = 1e-9,
) -> list[dict]:
    """Mean sparsity of the true and empirical graphs over random teachers.

    Returns one row per (d, k_hat) cell with means, standard errors, the
    mean measured effective class count, and a count of trials where the
    empirical graph was not contained in the sampled true graph (a
    Monte-Carlo miss).
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rows = []
    for di, d in enumerate(d_values):
        for ki, k_hat in enumerate(k_hat_values):
            true_vals, emp_vals, eff_vals = [], [], []
            mc_misses = 0
            for trial in range(trials):
                teacher = random_teacher(d, k_hat, _child_seed(seed, 1, di, ki, trial))
                train = sample_sphere(d, n_train, _child_seed(seed, 2, di, ki, trial))
                tg = true_graph(
                    teacher,
                    "montecarlo",
                    samples=mc_samples,
                    tol=mc_tol,
                    seed=_child_seed(seed, 3, di, ki, trial),
                )
                eg = empirical_graph(teacher, train)
                if not eg.edges <= tg.edges:
                    mc_misses += 1
                true_vals.append(sparsity_level(tg))
                emp_vals.append(sparsity_level(eg))
                eff_vals.append(len(effective_classes(teacher, train)))
            t = np.array(true_vals)
            e = np.array(emp_vals)
            denom = math.sqrt(trials)
            rows.append(
                {
                    "d": d,
                    "k_hat": k_hat,
                    "trials": trials,
                    "mean_effective_k": float(np.mean(eff_vals)),
                    "mean_true_sparsity": float(t.mean()),
                    "stderr_true_sparsity": float(t.std(ddof=1) / denom) if trials > 1 else 0.0,
                    "mean_empirical_sparsity": float(e.mean()),
                    "stderr_empirical_sparsity": float(e.std(ddof=1) / denom)
                    if trials > 1
                    else 0.0,
                    "mc_misses": mc_misses,
                }
            )
    return rows


@dataclass
class SuiteConfig:
    """Configuration of one method-comparison experiment."""

    d: int = 5
    k_hat: int = 30
    n_train: int = 2000
    n_test: int = 2000
    seeds: tuple = (0, 1, 2, 3, 4)
    methods: tuple = SUITE_METHODS
    steps: int = 1200
    batch_size: int = 1
    buffer_size: int = 64
    learning_rate: float = 0.25
    confidence: float = 0.25
    margin: float = 0.25
    duel_margin: float = 2.0
    topk_fraction: float = 0.1
    eval_every: int = 25
    mc_samples: int = 2048
    mc_tol: float = 1e-9
    accuracy_targets: tuple = (0.5, 0.7, 0.8, 0.9)

    def __post_init__(self) -> None:
        if not self.methods:
            raise ValueError("methods must be nonempty")
        unknown = [m for m in self.methods if m not in SUITE_METHODS]
        if unknown:
            raise ValueError(f"unknown methods {unknown}; choose from {SUITE_METHODS}")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("seeds must be distinct")
        for name in ("d", "k_hat", "n_train", "n_test", "steps", "batch_size", "buffer_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")

    def to_dict(self) -> dict:
        out = {}
        for key, value in self.__dict__.items():
            out[key] = list(value) if isinstance(value, tuple) else value
        return out


@dataclass
class ExperimentRun:
    """One (method, seed) cell: trajectory plus graph statistics."""

    method: str
    seed: int
    trajectory: list = field(default_factory=list)  # (round, comparisons, accuracy)
    graph_stats: dict = field(default_factory=dict)
    total_comparisons: int | None = None  # the run's ledger count, exactly
    error: str | None = None


def _run_cell(
    config: SuiteConfig,
    method: str,
    seed: int,
    teacher: LinearModel,
    graphs: dict,
    stream: np.ndarray,
    test: np.ndarray,
) -> ExperimentRun:
    ledger = QueryLedger()
    trajectory: list[tuple[int, int, float]] = []
    points_per_round = config.batch_size
    total_points = config.steps * points_per_round

    def hook(step: int, weights: np.ndarray, queries: int) -> None:
        rounds_done, rem = divmod(step, points_per_round)
        if rem != 0:
            return
        if rounds_done % config.eval_every == 0 or rounds_done == config.steps:
            acc = topk_accuracy(weights, teacher, test, config.topk_fraction)
            trajectory.append((rounds_done, queries, acc))

    if method.startswith("comparison_sgd:"):
        graph = graphs[method.split(":", 1)[1]]
        sgd_config = ComparisonSGDConfig(
            graph=graph,
            buffer_size=config.buffer_size,
            steps=total_points,
            confidence=config.confidence,
            learning_rate=config.learning_rate,
            edge_mode="iterate-all",
            seed=seed,
        )
        train_comparison_sgd(sgd_config, teacher, stream, ledger, step_hook=hook)
    else:
        t_config = TournamentConfig(
            buffer_size=config.buffer_size,
            steps=total_points,
            margin=config.margin,
            learning_rate=config.learning_rate,
            duel_margin=config.duel_margin,
        )
        learner = (
            active_tournament_learner
            if method == "active_tournament"
            else passive_tournament_learner
        )
        learner(t_config, teacher, stream, ledger, step_hook=hook)

    return ExperimentRun(
        method=method,
        seed=seed,
        trajectory=trajectory,
        total_comparisons=ledger.comparisons,
    )


def run_comparison_suite(config: SuiteConfig) -> list[ExperimentRun]:
    """Race the configured methods over shared teachers and streams.

    Per seed: one random teacher, its sampled true graph, the empirical
    graph of a shared training sample, and one shared stream of fresh
    points, so method comparisons are paired. A failing cell is recorded
    with its diagnostic instead of aborting the suite.
    """
    runs: list[ExperimentRun] = []
    for seed in config.seeds:
        teacher = random_teacher(config.d, config.k_hat, _child_seed(seed, 10))
        train = sample_sphere(config.d, config.n_train, _child_seed(seed, 11))
        test = sample_sphere(config.d, config.n_test, _child_seed(seed, 12))
        stream = sample_sphere(
            config.d, config.steps * config.batch_size, _child_seed(seed, 13)
        )
        tg = true_graph(
            teacher,
            "montecarlo",
            samples=config.mc_samples,
            tol=config.mc_tol,
            seed=_child_seed(seed, 14),
        )
        eg = empirical_graph(teacher, train)
        graphs = {"true": tg, "empirical": eg, "complete": complete_graph(config.k_hat)}
        stats = {
            "effective_k": len(effective_classes(teacher, train)),
            "true_edges": tg.num_edges,
            "empirical_edges": eg.num_edges,
            "true_sparsity": sparsity_level(tg),
            "empirical_sparsity": sparsity_level(eg),
            "empirical_subset_of_true": bool(eg.edges <= tg.edges),
        }
        for method in config.methods:
            try:
                run = _run_cell(
                    config, method, seed, teacher, graphs, stream.points, test.points
                )
            except Exception as exc:  # recorded, not raised: one cell must not kill the suite
                run = ExperimentRun(method=method, seed=seed, error=f"{type(exc).__name__}: {exc}")
            run.graph_stats = dict(stats)
            runs.append(run)
    return runs


def mean_trajectories(runs: list[ExperimentRun]) -> list[dict]:
    """Average each method's trajectory over seeds at matching rounds."""
    by_method: dict[str, dict[int, list[tuple[int, float]]]] = {}
    for run in runs:
        if run.error:
            continue
        per_round = by_method.setdefault(run.method, {})
        for rnd, queries, acc in run.trajectory:
            per_round.setdefault(rnd, []).append((queries, acc))
    rows = []
    for method in sorted(by_method):
        for rnd in sorted(by_method[method]):
            cells = by_method[method][rnd]
            rows.append(
                {
                    "method": method,
                    "round": rnd,
                    "runs": len(cells),
                    "mean_comparisons": float(np.mean([c[0] for c in cells])),
                    "mean_accuracy": float(np.mean([c[1] for c in cells])),
                }
            )
    return rows


def matched_accuracy_table(runs: list[ExperimentRun], targets) -> list[dict]:
    """First round and query count at which each run reaches each accuracy target."""
    rows = []
    for run in sorted(runs, key=lambda r: (r.method, r.seed)):
        if run.error:
            continue
        for target in targets:
            reached = next(
                ((rnd, q) for rnd, q, acc in run.trajectory if acc >= target), None
            )
            rows.append(
                {
                    "method": run.method,
                    "seed": run.seed,
                    "target": target,
                    "first_round": reached[0] if reached else "",
                    "comparisons": reached[1] if reached else "",
                }
            )
    return rows


def ingest_and_project(
    path, d: int, seed, projection: np.ndarray | None = None, labeled: bool = False
) -> tuple[Dataset, np.ndarray]:
    """Load a delimited numeric file and randomly project it into R^d.

    The projection matrix has i.i.d. Gaussian entries scaled by
    1/sqrt(d); pass ``projection`` explicitly (e.g. an identity) to
    override it. Labels, when requested, pass through unchanged.
    """
    data = load_dataset(path, labeled=labeled)
    if d < 1:
        raise ValueError("projection dimension must be at least 1")
    if projection is None:
        rng = np.random.default_rng(seed)
        projection = rng.standard_normal((data.d, d)) / math.sqrt(d)
    else:
        projection = np.asarray(projection, dtype=float)
        if projection.shape != (data.d, d):
            raise ValueError(
                f"projection must have shape ({data.d}, {d}), got {projection.shape}"
            )
    projected = data.points @ projection
    return Dataset(projected, data.labels), projection


def fit_linear_teacher(
    data: Dataset, epochs: int, learning_rate: float, seed, k: int | None = None
) -> LinearModel:
    """Fit a softmax-regression teacher by per-sample stochastic gradient.

    The sample order is reshuffled each epoch from a seeded generator,
    so identical inputs give an identical model. Zero epochs return the
    zero model.
    """
    if data.labels is None:
        raise ValueError("fitting a teacher requires labels")
    if epochs < 0:
        raise ValueError("epochs must be non-negative")
    labels = data.labels
    distinct = np.unique(labels)
    if distinct.size < 2:
        raise ValueError("degenerate data: need at least 2 distinct classes")
    k = int(labels.max()) + 1 if k is None else int(k)
    if k < int(labels.max()) + 1:
        raise ValueError("k is smaller than the largest label")
    X = data.points
    W = np.zeros((k, data.d))
    rng = np.random.default_rng(seed)
    for _ in range(epochs):
        for idx in rng.permutation(len(data)):
            x = X[idx]
            z = W @ x
            z -= z.max()
            p = np.exp(z)
            p /= p.sum()
            p[labels[idx]] -= 1.0
            W -= learning_rate * np.outer(p, x)
    return LinearModel(W)
