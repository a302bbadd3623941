"""Linear multiclass teachers, supervision oracles, and query accounting.

A teacher is a k x d weight matrix scoring k classes on d-dimensional
inputs. Learners never see the weights; they interact with the teacher
through two oracles, an argmax query and a pairwise label-comparison
query, and every oracle call is charged to a :class:`QueryLedger`.

Oracle answers use exact floating-point comparisons: the teacher is the
ground truth, so no tolerance is applied here. Ties in the argmax break
toward the lowest class index; the comparison oracle is a strict
indicator, so ties answer ``False``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "LinearModel",
    "QueryLedger",
    "Dataset",
    "argmax_query",
    "comparison_query",
    "sample_sphere",
    "effective_classes",
    "save_model",
    "load_model",
    "load_dataset",
    "save_dataset",
]


class LinearModel:
    """A k x d real weight matrix; row i is the score vector of class i.

    Instances are immutable after construction (the weight buffer is
    marked read-only) and therefore safe for concurrent reads.
    """

    def __init__(self, weights) -> None:
        W = np.array(weights, dtype=float)
        if W.ndim != 2:
            raise ValueError(f"weights must be a 2-d matrix, got shape {W.shape}")
        if W.shape[0] < 2:
            raise ValueError("a multiclass model needs at least 2 classes")
        if W.shape[1] < 1:
            raise ValueError("ambient dimension must be at least 1")
        if not np.all(np.isfinite(W)):
            raise ValueError("weights must be finite")
        W.setflags(write=False)
        self.weights = W

    @property
    def k(self) -> int:
        return self.weights.shape[0]

    @property
    def d(self) -> int:
        return self.weights.shape[1]

    def scores(self, x) -> np.ndarray:
        """Score vector W @ x for a single point."""
        x = check_point(x, self.d)
        return self.weights @ x

    def score_matrix(self, X) -> np.ndarray:
        """Scores for a batch: (n, d) points -> (n, k) scores."""
        X = check_points(X, self.d)
        return X @ self.weights.T

    def predict(self, X) -> np.ndarray:
        """Argmax class per row, ties toward the lowest index."""
        return np.argmax(self.score_matrix(X), axis=1)

    def __eq__(self, other) -> bool:
        return isinstance(other, LinearModel) and np.array_equal(self.weights, other.weights)

    def __repr__(self) -> str:  # pragma: no cover
        return f"LinearModel(k={self.k}, d={self.d})"


@dataclass
class QueryLedger:
    """Counts oracle invocations. Counts only grow; there is no reset.

    A ledger is owned by exactly one learner run; concurrent runs must
    use distinct ledgers.
    """

    comparisons: int = 0
    argmaxes: int = 0

    def count_comparison(self) -> None:
        self.comparisons += 1

    def count_argmax(self) -> None:
        self.argmaxes += 1

    @property
    def total(self) -> int:
        return self.comparisons + self.argmaxes


@dataclass(frozen=True)
class Dataset:
    """Feature points with optional integer class labels."""

    points: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self) -> None:
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2:
            raise ValueError(f"points must be a 2-d array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            lab = np.array(self.labels, dtype=int)
            if lab.shape != (pts.shape[0],):
                raise ValueError("labels must be one integer per point")
            if lab.size and lab.min() < 0:
                raise ValueError("labels must be non-negative")
            lab.setflags(write=False)
            object.__setattr__(self, "labels", lab)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


def check_point(x, d: int) -> np.ndarray:
    """Validate a single d-vector, raising on shape mismatch."""
    x = np.asarray(x, dtype=float)
    if x.shape != (d,):
        raise ValueError(f"expected a point of dimension {d}, got shape {x.shape}")
    return x


def check_points(X, d: int | None = None) -> np.ndarray:
    """Validate an (n, d) batch of points."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1) if d in (1, None) else X.reshape(1, -1)
    if X.ndim != 2:
        raise ValueError(f"expected an (n, d) array, got shape {X.shape}")
    if d is not None and X.shape[1] != d:
        raise ValueError(f"expected points of dimension {d}, got {X.shape[1]}")
    return X


def argmax_query(model: LinearModel, x, ledger: QueryLedger) -> int:
    """Ask the teacher for the top class at x, charging one argmax query.

    Ties break toward the lowest class index.
    """
    s = model.scores(x)
    ledger.count_argmax()
    return int(np.argmax(s))


def comparison_query(model: LinearModel, x, j1: int, j2: int, ledger: QueryLedger) -> bool:
    """Ask whether class j1 strictly outscores class j2 at x.

    Charges one comparison. Exact ties answer ``False`` (strict
    indicator), so at most one of (j1, j2) and (j2, j1) is ever true.
    """
    if j1 == j2:
        raise ValueError(f"cannot duel class {j1} against itself")
    k = model.k
    if not (0 <= j1 < k and 0 <= j2 < k):
        raise ValueError(f"class indices must lie in [0, {k}), got ({j1}, {j2})")
    s = model.scores(x)
    ledger.count_comparison()
    return bool(s[j1] > s[j2])


def sample_sphere(d: int, n: int, seed) -> Dataset:
    """Draw n i.i.d. points uniformly from the unit sphere in R^d.

    Standard Gaussians from a PCG64 generator, normalized to unit
    length; a fixed seed gives bit-identical output on every platform.
    """
    if d < 1:
        raise ValueError("d must be at least 1")
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, d))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return Dataset(g / norms)


def effective_classes(model: LinearModel, data) -> set[int]:
    """Classes attained as teacher argmax somewhere on the data.

    Internal bookkeeping, not an oracle call: no ledger is charged.
    """
    pts = data.points if isinstance(data, Dataset) else check_points(data, model.d)
    if pts.shape[0] == 0:
        raise ValueError("dataset must be nonempty")
    return {int(c) for c in np.unique(model.predict(pts))}


# ---------------------------------------------------------------------------
# Persistence: plain-text matrix files and delimited datasets.
# ---------------------------------------------------------------------------


def _fmt(v: float) -> str:
    # repr of a Python float is the shortest exact round-trip form
    return repr(float(v))


def save_model(model: LinearModel, path) -> None:
    """Write a model as text: header line "k d", then one row per class."""
    lines = [f"{model.k} {model.d}"]
    for row in model.weights:
        lines.append(" ".join(_fmt(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path) -> LinearModel:
    """Read a model written by :func:`save_model`."""
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: expected header 'k d'")
        k, d = int(header[0]), int(header[1])
        rows = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            vals = [float(v) for v in line.split()]
            if len(vals) != d:
                raise ValueError(f"{path}: line {lineno}: expected {d} values")
            rows.append(vals)
    if len(rows) != k:
        raise ValueError(f"{path}: expected {k} rows, found {len(rows)}")
    return LinearModel(np.array(rows))


def load_dataset(path, labeled: bool = False, delimiter: str | None = None) -> Dataset:
    """Read a delimited text file, one point per row.

    With ``labeled=True`` the trailing column is parsed as an integer
    class label. Malformed rows raise with their line number.
    """
    points: list[list[float]] = []
    labels: list[int] = []
    width = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(delimiter) if delimiter else line.replace(",", " ").split()
            try:
                vals = [float(p) for p in parts]
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from None
            if width is None:
                width = len(vals)
            elif len(vals) != width:
                raise ValueError(
                    f"{path}: line {lineno}: expected {width} columns, got {len(vals)}"
                )
            if labeled:
                if len(vals) < 2:
                    raise ValueError(f"{path}: line {lineno}: no feature columns before label")
                lab = vals[-1]
                if lab != int(lab):
                    raise ValueError(f"{path}: line {lineno}: label {lab!r} is not an integer")
                labels.append(int(lab))
                vals = vals[:-1]
            points.append(vals)
    if not points:
        raise ValueError(f"{path}: no data rows")
    return Dataset(np.array(points), np.array(labels) if labeled else None)


def save_dataset(dataset: Dataset, path) -> None:
    """Write a dataset as comma-delimited text (label as trailing column)."""
    lines = []
    for idx in range(len(dataset)):
        cols = [_fmt(v) for v in dataset.points[idx]]
        if dataset.labels is not None:
            cols.append(str(int(dataset.labels[idx])))
        lines.append(",".join(cols))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
