"""Label neighborhood graphs: which classes share a decision boundary.

Two classes are neighbors when some unit vector makes their scores tie
while both dominate every other class. Witnesses are restricted to the
unit sphere because linear scores are scale invariant and the origin
would trivially tie everything.

The empirical variant replaces boundary witnesses (probability zero
under a continuous distribution) by the runner-up construction: an edge
is witnessed by any sample point whose best and second-best classes are
that pair.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .oracles import Dataset, LinearModel, check_points

__all__ = [
    "NeighborhoodGraph",
    "canonical_edge",
    "complete_graph",
    "true_graph",
    "empirical_graph",
    "sparsity_level",
    "path_graph_from_order",
    "save_graph",
    "load_graph",
]


def canonical_edge(i: int, j: int) -> tuple[int, int]:
    if i == j:
        raise ValueError(f"self-loop at class {i}")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class NeighborhoodGraph:
    """Undirected simple graph on k class labels, edges stored as i < j."""

    k: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("graph needs at least one vertex")
        edges = frozenset(canonical_edge(int(i), int(j)) for i, j in self.edges)
        for i, j in edges:
            if not (0 <= i < self.k and 0 <= j < self.k):
                raise ValueError(f"edge ({i}, {j}) outside [0, {self.k})")
        object.__setattr__(self, "edges", edges)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def has_edge(self, i: int, j: int) -> bool:
        return canonical_edge(i, j) in self.edges

    def neighbors(self, i: int) -> set[int]:
        return {b if a == i else a for a, b in self.edges if i in (a, b)}

    def degree(self, i: int) -> int:
        return sum(1 for a, b in self.edges if i in (a, b))

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.k, dtype=int)
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def max_degree(self) -> int:
        return int(self.degrees().max()) if self.k else 0

    def isolated_vertices(self) -> set[int]:
        return {i for i, dg in enumerate(self.degrees()) if dg == 0}

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def relabeled(self, perm) -> "NeighborhoodGraph":
        """Graph under the vertex relabeling i -> perm[i]."""
        perm = np.asarray(perm, dtype=int)
        return NeighborhoodGraph(
            self.k, frozenset(canonical_edge(int(perm[i]), int(perm[j])) for i, j in self.edges)
        )


def complete_graph(k: int) -> NeighborhoodGraph:
    return NeighborhoodGraph(k, frozenset((i, j) for i in range(k) for j in range(i + 1, k)))


def _pair_has_witness_2d(W: np.ndarray, i: int, j: int) -> bool:
    diff = W[i] - W[j]
    u = np.array([-diff[1], diff[0]])
    u /= np.linalg.norm(u)
    others = [r for r in range(W.shape[0]) if r not in (i, j)]
    for x in (u, -u):
        si = float(W[i] @ x)
        # skip i and j: the boundary direction makes those two scores
        # equal by construction, up to rounding noise
        if all(si >= float(W[r] @ x) for r in others):
            return True
    return False


def _pair_has_witness_1d(W: np.ndarray, i: int, j: int) -> bool:
    # scores on the lifted line point (t, 1) are a_r * t + b_r; the pair
    # is adjacent iff its score crossing dominates every other class
    a_i, b_i = W[i]
    a_j, b_j = W[j]
    if a_i == a_j:
        # parallel score lines never cross at a finite line point
        return False
    t_star = (b_j - b_i) / (a_i - a_j)
    x = np.array([t_star, 1.0])
    si = float(W[i] @ x)
    others = [r for r in range(W.shape[0]) if r not in (i, j)]
    return all(si >= float(W[r] @ x) for r in others)


def _pair_has_witness_mc(
    W: np.ndarray, i: int, j: int, gaussians: np.ndarray, tol: float
) -> bool:
    diff = W[i] - W[j]
    u = diff / np.linalg.norm(diff)
    proj = gaussians - np.outer(gaussians @ u, u)
    norms = np.linalg.norm(proj, axis=1)
    keep = norms > 1e-12
    if not np.any(keep):
        return False
    X = proj[keep] / norms[keep, None]
    # chunked scan: pairs that do share a boundary usually reveal a
    # witness in the first few hundred directions
    for start in range(0, X.shape[0], 256):
        block = X[start : start + 256]
        scores = block @ W.T
        si = scores[:, i]
        if np.any(si >= scores.max(axis=1) - tol):
            return True
    return False


def true_graph(
    model: LinearModel,
    method: str = "montecarlo",
    *,
    samples: int = 2048,
    tol: float = 1e-9,
    seed=0,
) -> NeighborhoodGraph:
    """Neighborhood graph of a linear model.

    ``exact2d`` (requires d = 2) tests the two unit directions of each
    pair's boundary line exactly. ``montecarlo`` samples unit directions
    inside each pair's boundary hyperplane and tests dominance up to
    ``tol``; it is sound up to Monte-Carlo misses, so it may under-report
    edges whose witness sets are tiny. ``exact1d`` treats a d = 2 model
    as acting on lifted line points (t, 1) and tests each pair's exact
    score crossing: homogeneous witnesses with a negative lift
    coordinate correspond to no point of the line, so for embedded line
    models this is the right notion of adjacency (and gives max degree
    at most 2, unlike the full-sphere methods).

    Classes with exactly identical rows share their boundary everywhere;
    the edge is declared present and a warning is emitted.
    """
    W = model.weights
    k = model.k
    edges = set()
    if method in ("exact2d", "exact1d"):
        if model.d != 2:
            raise ValueError(f"{method} requires a 2-dimensional model")
        gaussians = None
    elif method == "montecarlo":
        if model.d < 2:
            raise ValueError("montecarlo witness sampling requires d >= 2")
        if samples < 1:
            raise ValueError("samples must be at least 1")
        if tol <= 0:
            raise ValueError("tol must be positive")
        rng = np.random.default_rng(seed)
        gaussians = rng.standard_normal((samples, model.d))
    else:
        raise ValueError(f"unknown method {method!r}")

    for i in range(k):
        for j in range(i + 1, k):
            if np.array_equal(W[i], W[j]):
                warnings.warn(
                    f"classes {i} and {j} have identical rows; "
                    "their boundary is everywhere",
                    stacklevel=2,
                )
                edges.add((i, j))
                continue
            if method == "exact2d":
                present = _pair_has_witness_2d(W, i, j)
            elif method == "exact1d":
                present = _pair_has_witness_1d(W, i, j)
            else:
                present = _pair_has_witness_mc(W, i, j, gaussians, tol)
            if present:
                edges.add((i, j))
    return NeighborhoodGraph(k, frozenset(edges))


def empirical_graph(model: LinearModel, data) -> NeighborhoodGraph:
    """Edges witnessed by a sample: each point contributes its top two classes.

    Ties at either rank break toward the lower class index.
    """
    pts = data.points if isinstance(data, Dataset) else check_points(data, model.d)
    if pts.shape[0] == 0:
        raise ValueError("dataset must be nonempty")
    scores = model.score_matrix(pts)
    # stable argsort of -scores ranks ties by ascending class index
    order = np.argsort(-scores, axis=1, kind="stable")
    top, second = order[:, 0], order[:, 1]
    edges = {canonical_edge(int(a), int(b)) for a, b in zip(top, second)}
    return NeighborhoodGraph(model.k, frozenset(edges))


def sparsity_level(graph: NeighborhoodGraph) -> float:
    """Edge count divided by C(k, 2)."""
    if graph.k < 2:
        raise ValueError("sparsity needs at least 2 classes")
    return graph.num_edges / math.comb(graph.k, 2)


def path_graph_from_order(order) -> NeighborhoodGraph:
    """Path linking consecutive classes of a total order (most-preferred first)."""
    order = np.asarray(order, dtype=int)
    k = order.size
    if sorted(order.tolist()) != list(range(k)):
        raise ValueError("order must be a permutation of 0..k-1")
    edges = frozenset(
        canonical_edge(int(order[m]), int(order[m + 1])) for m in range(k - 1)
    )
    return NeighborhoodGraph(k, edges)


def save_graph(graph: NeighborhoodGraph, path) -> None:
    """Write a graph as text: first line "k", then one "i j" pair per line."""
    lines = [str(graph.k)]
    lines.extend(f"{i} {j}" for i, j in graph.sorted_edges())
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_graph(path) -> NeighborhoodGraph:
    with open(path) as fh:
        header = fh.readline().strip()
        k = int(header)
        edges = set()
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}: line {lineno}: expected 'i j'")
            edges.add(canonical_edge(int(parts[0]), int(parts[1])))
    return NeighborhoodGraph(k, frozenset(edges))
