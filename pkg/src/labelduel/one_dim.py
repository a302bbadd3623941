"""Learning multiclass classifiers on the line from comparison queries.

A k-class model on the line is a set of k centers; a point prefers
classes by distance to their centers, which is exactly a homogeneous
linear model in two dimensions acting on lifted points (t, 1). The
pipeline here:

1.  Order the classes with comparisons at the two sample extremes. A
    pair whose answers flip between the extremes is ordered directly; a
    class that loses at both extremes owns no sample and is safely
    ranked last.
2.  Link consecutive classes of the order into a path graph.
3.  Binary-search one threshold duel per edge over the sample pool,
    giving each edge an error budget of eps / (number of edges).
4.  Aggregate the duels into a multiclass classifier.

Exact score ties at both extremes are indistinguishable from an honest
double loss using the two answers alone, so they fold into the
ranked-last rule.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cmp_to_key

import numpy as np

from .aggregation import AggregatedClassifier, BinaryClassifierSet
from .graphs import NeighborhoodGraph, canonical_edge, path_graph_from_order
from .oracles import LinearModel, QueryLedger, comparison_query

__all__ = [
    "CentersModel",
    "lift",
    "lift_batch",
    "centers_to_linear",
    "total_order_at",
    "learn_graph_1d",
    "binary_search_threshold",
    "fit_graph_classifier",
    "fit_line_classifier",
]

LEARN_MODES = ("lazy-sort", "eager-pairs")


@dataclass(frozen=True)
class CentersModel:
    """k class centers on the real line; class i prefers points near centers[i]."""

    centers: np.ndarray

    def __post_init__(self) -> None:
        c = np.array(self.centers, dtype=float).ravel()
        if c.size < 1:
            raise ValueError("need at least one center")
        if not np.all(np.isfinite(c)):
            raise ValueError("centers must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "centers", c)

    @property
    def k(self) -> int:
        return self.centers.size


def lift(t: float) -> np.ndarray:
    """Embed a scalar as the 2-vector (t, 1) for homogeneous scoring."""
    return np.array([float(t), 1.0])


def lift_batch(ts) -> np.ndarray:
    ts = np.asarray(ts, dtype=float).ravel()
    return np.column_stack([ts, np.ones_like(ts)])


def centers_to_linear(centers) -> LinearModel:
    """The k x 2 linear model equivalent to nearest-center classification.

    Row i is (2 c_i, -c_i^2), so on a lifted point (t, 1) the score is
    2 c_i t - c_i^2 = t^2 - (t - c_i)^2: score comparisons reproduce the
    distance order, including exact ties.
    """
    c = centers.centers if isinstance(centers, CentersModel) else np.asarray(centers, float).ravel()
    return LinearModel(np.column_stack([2.0 * c, -(c**2)]))


def total_order_at(centers, t: float) -> np.ndarray:
    """Classes sorted by distance of their centers to t, nearest first.

    Ties go to the lower class index (stable sort).
    """
    c = centers.centers if isinstance(centers, CentersModel) else np.asarray(centers, float).ravel()
    return np.argsort(np.abs(c - float(t)), kind="stable")


# ---------------------------------------------------------------------------
# Ordering the classes from comparisons at the sample extremes.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _OrderResult:
    order: np.ndarray
    graph: NeighborhoodGraph
    losers: frozenset[int]
    extreme_answers: dict  # canonical edge -> (answer at min sample, answer at max sample)


def _learn_order(model: LinearModel, xs, ledger: QueryLedger, mode: str) -> _OrderResult:
    if mode not in LEARN_MODES:
        raise ValueError(f"mode must be one of {LEARN_MODES}, got {mode!r}")
    xs = np.asarray(xs, dtype=float).ravel()
    if xs.size < 1:
        raise ValueError("need at least one sample point")
    x_left = lift(xs.min())
    x_right = lift(xs.max())
    k = model.k

    answers: dict[tuple[int, int], tuple[bool, bool]] = {}
    losers: set[int] = set()

    def pair_answers(p: int, q: int) -> tuple[bool, bool]:
        # canonical phrasing: answers are 1[f_p > f_q] with p < q
        key = canonical_edge(p, q)
        if key not in answers:
            a = comparison_query(model, x_left, key[0], key[1], ledger)
            b = comparison_query(model, x_right, key[0], key[1], ledger)
            answers[key] = (a, b)
            if a == b:
                # the same class lost at both extremes: no sample lies in
                # its region, so it can safely go last
                losers.add(key[1] if a else key[0])
        return answers[key]

    def compare(i: int, j: int) -> int:
        a, _ = pair_answers(i, j)
        i_first = a if i < j else not a
        return -1 if i_first else 1

    if mode == "eager-pairs":
        for p in range(k):
            for q in range(p + 1, k):
                pair_answers(p, q)

    ranked = sorted(range(k), key=cmp_to_key(compare))
    order = [c for c in ranked if c not in losers] + [c for c in ranked if c in losers]
    return _OrderResult(
        order=np.array(order, dtype=int),
        graph=path_graph_from_order(order),
        losers=frozenset(losers),
        extreme_answers=dict(answers),
    )


def learn_graph_1d(
    model: LinearModel, xs, ledger: QueryLedger, mode: str = "lazy-sort"
) -> tuple[np.ndarray, NeighborhoodGraph]:
    """Learn the total class order and its path graph from comparisons.

    Queries each needed pair at the two sample extremes. In "lazy-sort"
    mode pairs are resolved only when the comparison sort demands them,
    so roughly 2 k log k comparisons are spent; "eager-pairs" resolves
    all k (k - 1) / 2 pairs up front. Classes that lose at both extremes
    are ranked last.
    """
    result = _learn_order(model, xs, ledger, mode)
    return result.order, result.graph


# ---------------------------------------------------------------------------
# Threshold duels on the line.
# ---------------------------------------------------------------------------


def binary_search_threshold(
    model: LinearModel,
    left_class: int,
    right_class: int,
    pool,
    gamma: float,
    ledger: QueryLedger,
) -> float:
    """Binary-search the boundary between two adjacent classes.

    ``pool`` is sorted ascending and ``left_class`` wins comparisons on
    its low end. Returns a threshold with at most ceil(gamma * |pool|)
    pool points on the wrong side, using at most
    ceil(log2(1 / gamma)) + 2 comparisons.
    """
    pool = np.asarray(pool, dtype=float).ravel()
    n = pool.size
    if n == 0:
        raise ValueError("pool must be nonempty")
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    stop = max(1, math.ceil(gamma * n) // 2)
    budget = math.ceil(math.log2(max(2.0, 1.0 / gamma))) + 2
    lo, hi = -1, n
    used = 0
    while hi - lo - 1 > stop and used < budget:
        mid = (lo + hi) // 2
        if comparison_query(model, lift(pool[mid]), left_class, right_class, ledger):
            lo = mid
        else:
            hi = mid
        used += 1
    left_val = pool[lo] if lo >= 0 else pool[0] - 1.0
    right_val = pool[hi] if hi < n else pool[-1] + 1.0
    return 0.5 * (float(left_val) + float(right_val))


def _edge_coefficients(i: int, j: int, left_class: int, threshold: float) -> np.ndarray:
    # duel value on a lifted point (t, 1): s * (threshold - t), where
    # s = +1 when the canonical low class i is the left class; >= 0
    # means i wins, matching the aggregation convention
    s = 1.0 if left_class == i else -1.0
    return np.array([-s, s * threshold])


def fit_graph_classifier(
    model: LinearModel,
    graph: NeighborhoodGraph,
    pool,
    epsilon: float,
    ledger: QueryLedger,
    order=None,
    extreme_answers: dict | None = None,
) -> AggregatedClassifier:
    """Learn one threshold duel per graph edge and aggregate the duels.

    Every edge gets the error budget gamma = epsilon / (total edges).
    When ``order`` is given, edge orientation is read from it; otherwise
    one probe comparison at the pool minimum orients each edge. Edges
    already known not to flip inside the sample range (via
    ``extreme_answers`` from the ordering step) are resolved without any
    further queries: their threshold is placed beyond the pool.
    """
    pool = np.sort(np.asarray(pool, dtype=float).ravel())
    if pool.size == 0:
        raise ValueError("pool must be nonempty")
    if graph.num_edges == 0:
        raise ValueError("graph must have at least one edge")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    gamma = epsilon / graph.num_edges
    position = None
    if order is not None:
        order = np.asarray(order, dtype=int)
        position = {int(c): idx for idx, c in enumerate(order)}

    coefficients = {}
    for i, j in graph.sorted_edges():
        known = extreme_answers.get((i, j)) if extreme_answers else None
        if known is not None and known[0] == known[1]:
            # no flip inside the range: the winner holds the whole pool,
            # so place the threshold past the high end with the winner
            # playing the left role
            winner = i if known[0] else j
            coefficients[(i, j)] = _edge_coefficients(i, j, winner, pool[-1] + 1.0)
            continue
        if known is not None:
            left = i if known[0] else j
        elif position is not None:
            left = i if position[i] < position[j] else j
        else:
            left = i if comparison_query(model, lift(pool[0]), i, j, ledger) else j
        right = j if left == i else i
        threshold = binary_search_threshold(model, left, right, pool, gamma, ledger)
        coefficients[(i, j)] = _edge_coefficients(i, j, left, threshold)
    return AggregatedClassifier(graph, BinaryClassifierSet(graph, coefficients))


def fit_line_classifier(
    model: LinearModel,
    xs,
    epsilon: float,
    ledger: QueryLedger,
    mode: str = "lazy-sort",
):
    """Order the classes, then learn threshold duels along the path graph.

    Returns (classifier, comparisons spent by this call). The caller is
    responsible for supplying enough samples that every class with mass
    under the data distribution is represented. Edges that never flip
    inside the sample range (classes without samples in their region)
    are resolved from the ordering answers alone, with no extra queries.
    """
    start = ledger.comparisons
    ordering = _learn_order(model, xs, ledger, mode)
    pool = np.sort(np.asarray(xs, dtype=float).ravel())
    classifier = fit_graph_classifier(
        model,
        ordering.graph,
        pool,
        epsilon,
        ledger,
        order=ordering.order,
        extreme_answers=ordering.extreme_answers,
    )
    return classifier, ledger.comparisons - start
