"""Duel aggregation: combine per-edge binary classifiers into a multiclass rule.

Each graph edge (i, j) with i < j carries a linear discriminator h; at a
point x the duel goes to i when h @ x >= 0 and to j otherwise (the lower
canonical index wins a zero). A class's aggregate score is the fraction
of its duels it wins, and the predicted label is the score argmax, ties
toward the lowest index. Isolated vertices receive the sentinel score -1
so they can never win the argmax.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import NeighborhoodGraph, canonical_edge
from .oracles import LinearModel, check_points

__all__ = [
    "BinaryClassifierSet",
    "AggregatedClassifier",
    "ConstantClassifier",
    "aggregate_scores",
    "aggregate_predict",
    "verify_aggregation_bound",
    "AggregationReport",
    "save_classifier",
    "load_classifier",
]


class BinaryClassifierSet:
    """Linear duel discriminators keyed by canonical graph edge.

    ``coefficients[(i, j)]`` with i < j is a d-vector h; ``h @ x >= 0``
    means class i wins the duel at x. The key set must equal the edge set
    of the companion graph exactly.
    """

    def __init__(self, graph: NeighborhoodGraph, coefficients: dict) -> None:
        coefs = {canonical_edge(*e): np.asarray(c, dtype=float) for e, c in coefficients.items()}
        if set(coefs) != set(graph.edges):
            missing = set(graph.edges) - set(coefs)
            extra = set(coefs) - set(graph.edges)
            raise ValueError(
                f"classifier set does not match graph edges (missing {sorted(missing)}, "
                f"extra {sorted(extra)})"
            )
        dims = {c.shape for c in coefs.values()}
        if len(dims) > 1 or any(len(s) != 1 for s in dims):
            raise ValueError("all discriminators must be vectors of one common dimension")
        for e, c in coefs.items():
            if not np.all(np.isfinite(c)):
                raise ValueError(f"non-finite discriminator on edge {e}")
        self.graph = graph
        self.edge_list = graph.sorted_edges()
        self.coefficients = {e: coefs[e] for e in self.edge_list}
        if self.edge_list:
            self._stack = np.stack([self.coefficients[e] for e in self.edge_list])
        else:
            self._stack = None

    @classmethod
    def from_model_differences(cls, model: LinearModel, graph: NeighborhoodGraph):
        """The exact duels of a teacher: h_ij = w_i - w_j on each edge."""
        W = model.weights
        return cls(graph, {(i, j): W[i] - W[j] for i, j in graph.edges})

    @property
    def d(self) -> int:
        if self._stack is None:
            raise ValueError("empty classifier set has no dimension")
        return self._stack.shape[1]

    def evaluate(self, X) -> np.ndarray:
        """Duel values: (n, d) points -> (n, E) discriminator outputs."""
        X = check_points(X, self.d)
        return X @ self._stack.T


def _as_batch(x):
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    return (x.reshape(1, -1) if single else x), single


def _check_match(graph: NeighborhoodGraph, classifiers: BinaryClassifierSet) -> None:
    if classifiers.graph.k != graph.k or classifiers.graph.edges != graph.edges:
        raise ValueError("classifier set was built for a different graph")


def aggregate_scores(graph: NeighborhoodGraph, classifiers: BinaryClassifierSet, x) -> np.ndarray:
    """Fraction of duels each class wins at x; isolated vertices score -1.

    Accepts a single point (returns a k-vector) or an (n, d) batch
    (returns (n, k)).
    """
    _check_match(graph, classifiers)
    X, single = _as_batch(x)
    n = X.shape[0]
    k = graph.k
    if graph.num_edges == 0:
        out = np.full((n, k), -1.0)
        return out[0] if single else out
    vals = classifiers.evaluate(X)  # (n, E)
    low_wins = vals >= 0.0
    onehot_low = np.zeros((len(classifiers.edge_list), k))
    onehot_high = np.zeros((len(classifiers.edge_list), k))
    for e_idx, (i, j) in enumerate(classifiers.edge_list):
        onehot_low[e_idx, i] = 1.0
        onehot_high[e_idx, j] = 1.0
    wins = low_wins @ onehot_low + (~low_wins) @ onehot_high
    degrees = graph.degrees().astype(float)
    scores = np.full((n, k), -1.0)
    active = degrees > 0
    scores[:, active] = wins[:, active] / degrees[active]
    return scores[0] if single else scores


def aggregate_predict(graph: NeighborhoodGraph, classifiers: BinaryClassifierSet, x) -> np.ndarray:
    """Class winning the largest fraction of duels, ties toward lowest index."""
    if graph.num_edges == 0:
        raise ValueError("cannot predict with a graph that has no edges")
    scores = aggregate_scores(graph, classifiers, x)
    if scores.ndim == 1:
        return int(np.argmax(scores))
    return np.argmax(scores, axis=1)


class AggregatedClassifier:
    """A neighborhood graph plus its duel discriminators, ready to predict."""

    def __init__(self, graph: NeighborhoodGraph, classifiers: BinaryClassifierSet) -> None:
        _check_match(graph, classifiers)
        self.graph = graph
        self.classifiers = classifiers

    @property
    def k(self) -> int:
        return self.graph.k

    def duel_scores(self, X) -> np.ndarray:
        return aggregate_scores(self.graph, self.classifiers, X)

    def predict(self, X):
        return aggregate_predict(self.graph, self.classifiers, X)


@dataclass(frozen=True)
class ConstantClassifier:
    """Degenerate classifier predicting one fixed label everywhere."""

    label: int
    k: int

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            return int(self.label)
        return np.full(X.shape[0], self.label, dtype=int)

    def duel_scores(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        n = 1 if X.ndim == 1 else X.shape[0]
        scores = np.full((n, self.k), -1.0)
        scores[:, self.label] = 1.0
        return scores[0] if X.ndim == 1 else scores


@dataclass(frozen=True)
class AggregationReport:
    """Per-edge duel errors against the exact teacher duels, plus the
    aggregate disagreement with the teacher argmax on a sample."""

    epsilon: float
    slack: float
    num_edges: int
    per_edge_error: dict
    aggregate_error: float
    union_bound: float
    edge_condition_ok: bool
    bound_ok: bool


def verify_aggregation_bound(
    teacher: LinearModel,
    graph: NeighborhoodGraph,
    classifiers: BinaryClassifierSet,
    sample,
    epsilon: float,
    slack: float = 0.01,
) -> AggregationReport:
    """Check the union-bound chain: if each edge errs on at most an
    eps/num_edges fraction of the sample, the aggregate should err on at
    most eps (plus sampling slack).
    """
    _check_match(graph, classifiers)
    X = check_points(sample, teacher.d)
    exact = BinaryClassifierSet.from_model_differences(teacher, graph)
    learned_vals = classifiers.evaluate(X)
    exact_vals = exact.evaluate(X)
    per_edge = {}
    for e_idx, edge in enumerate(classifiers.edge_list):
        mismatch = (learned_vals[:, e_idx] >= 0.0) != (exact_vals[:, e_idx] >= 0.0)
        per_edge[edge] = float(np.mean(mismatch))
    predictions = aggregate_predict(graph, classifiers, X)
    truth = teacher.predict(X)
    aggregate_error = float(np.mean(predictions != truth))
    union = float(sum(per_edge.values()))
    budget = epsilon / graph.num_edges if graph.num_edges else 0.0
    return AggregationReport(
        epsilon=float(epsilon),
        slack=float(slack),
        num_edges=graph.num_edges,
        per_edge_error=per_edge,
        aggregate_error=aggregate_error,
        union_bound=union,
        edge_condition_ok=all(err <= budget + 1e-12 for err in per_edge.values()),
        bound_ok=aggregate_error <= epsilon + slack,
    )


def save_classifier(classifier: AggregatedClassifier, path) -> None:
    """One text file: header "k d", then "i j c0 ... c_{d-1}" per edge."""
    cls = classifier.classifiers
    lines = [f"{classifier.k} {cls.d}"]
    for i, j in cls.edge_list:
        coefs = " ".join(repr(float(v)) for v in cls.coefficients[(i, j)])
        lines.append(f"{i} {j} {coefs}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_classifier(path) -> AggregatedClassifier:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: expected header 'k d'")
        k, d = int(header[0]), int(header[1])
        coefs = {}
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2 + d:
                raise ValueError(f"{path}: line {lineno}: expected 'i j' plus {d} coefficients")
            edge = canonical_edge(int(parts[0]), int(parts[1]))
            coefs[edge] = np.array([float(v) for v in parts[2:]])
    graph = NeighborhoodGraph(k, frozenset(coefs))
    return AggregatedClassifier(graph, BinaryClassifierSet(graph, coefs))
