"""Brute-force verifiers for the combinatorial constructions behind the bounds.

Three independent checks live here:

* a shattering family of nearest-center classifiers on the line, built
  from triplets of integer positions, together with an exhaustive
  verifier of the pairwise-closeness shattering condition;
* an exact big-integer lower bound on the argmax queries needed to
  reveal the labels of n points in k ordered classes;
* a six-class construction showing how an empirical neighborhood graph
  that misses a boundary edge makes the duel aggregation mislabel a
  point that the full path graph classifies correctly.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .aggregation import BinaryClassifierSet, aggregate_predict
from .graphs import empirical_graph, path_graph_from_order
from .one_dim import centers_to_linear, lift, lift_batch, total_order_at

__all__ = [
    "ShatteringFamily",
    "build_shattering_family",
    "is_close_at_point",
    "verify_shattering",
    "ShatteringReport",
    "argmax_query_lower_bound",
    "missing_edge_counterexample",
    "CounterexampleReport",
]

MAX_ENUMERABLE_TRIPLETS = 8


@dataclass(frozen=True)
class ShatteringFamily:
    """All 4^k placements of 2k paired centers over k position triplets.

    Triplet t occupies positions (3t+1, 3t+2, 3t+3); the two classes of
    pair t are the flat indices 2t and 2t+1, exactly one of which sits on
    the middle position 3t+2. The evaluation points are the k middles.
    """

    triplet_count: int
    members: np.ndarray  # (4^k, 2k) center positions
    points: np.ndarray  # (k,) evaluation points
    off_middle_offset: float = 1.0

    @property
    def size(self) -> int:
        return self.members.shape[0]


def build_shattering_family(k: int, off_middle_offset: float = 1.0) -> ShatteringFamily:
    """Enumerate the full family for k triplets (guarded at k <= 8).

    Each triplet contributes four placements: which of its two classes
    sits on the middle position, and whether the other sits to the left
    or the right. ``off_middle_offset`` moves the non-middle center to
    middle +/- offset; values slightly below 1 break the exact
    cross-triplet distance ties of the integer construction.
    """
    if k < 1:
        raise ValueError("need at least one triplet")
    if k > MAX_ENUMERABLE_TRIPLETS:
        raise ValueError(f"enumeration guard: k must be at most {MAX_ENUMERABLE_TRIPLETS}")
    if not (0 < off_middle_offset <= 1):
        raise ValueError("off_middle_offset must lie in (0, 1]")
    members = np.zeros((4**k, 2 * k))
    for m in range(4**k):
        code = m
        for t in range(k):
            choice = code % 4
            code //= 4
            middle = 3 * t + 2
            middle_class = choice & 1  # which of the pair sits on the middle
            side = 1.0 if choice & 2 else -1.0
            members[m, 2 * t + middle_class] = middle
            members[m, 2 * t + 1 - middle_class] = middle + side * off_middle_offset
    points = np.array([3 * t + 2 for t in range(k)], dtype=float)
    return ShatteringFamily(k, members, points, off_middle_offset)


def _argmax_at(centers: np.ndarray, t: float) -> int:
    return int(total_order_at(centers, t)[0])


def is_close_at_point(f_centers, g_centers, points, index: int, mode: str = "strict") -> bool:
    """Do two center vectors agree off one point but disagree on it?

    ``strict`` requires the full induced total orders to coincide at
    every point other than ``index`` and the argmaxes to differ at
    ``index``. ``argmax-only`` relaxes the off-point condition to argmax
    agreement. Distance ties break by lower class index throughout.
    """
    if mode not in ("strict", "argmax-only"):
        raise ValueError(f"mode must be 'strict' or 'argmax-only', got {mode!r}")
    f = np.asarray(f_centers, dtype=float).ravel()
    g = np.asarray(g_centers, dtype=float).ravel()
    points = np.asarray(points, dtype=float).ravel()
    if _argmax_at(f, points[index]) == _argmax_at(g, points[index]):
        return False
    for j, p in enumerate(points):
        if j == index:
            continue
        if mode == "strict":
            if not np.array_equal(total_order_at(f, p), total_order_at(g, p)):
                return False
        else:
            if _argmax_at(f, p) != _argmax_at(g, p):
                return False
    return True


@dataclass(frozen=True)
class ShatteringReport:
    """Outcome of the exhaustive closeness-partner search."""

    mode: str
    triplet_count: int
    family_size: int
    passes: bool
    pairs_checked: int
    failures: tuple[tuple[int, int], ...]  # (member index, point index) without a partner
    witness_example: tuple[int, int, int] | None  # (member, point, partner)

    def to_json(self) -> str:
        payload = {
            "mode": self.mode,
            "triplet_count": self.triplet_count,
            "family_size": self.family_size,
            "passes": self.passes,
            "pairs_checked": self.pairs_checked,
            "failures": [list(f) for f in self.failures],
            "witness_example": list(self.witness_example) if self.witness_example else None,
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [
            f"shattering check ({self.mode}): triplets={self.triplet_count}, "
            f"family size={self.family_size}",
            f"  member/point pairs checked: {self.pairs_checked}",
            f"  result: {'PASS' if self.passes else 'FAIL'}",
        ]
        for member, point in self.failures[:5]:
            lines.append(f"  no partner for member {member} at point index {point}")
        return "\n".join(lines)


def verify_shattering(family: ShatteringFamily, mode: str = "argmax-only") -> ShatteringReport:
    """Search the whole family for a closeness partner of every (member, point).

    Passes when every member has, for every evaluation point, another
    member agreeing everywhere else but flipping that point's argmax.
    Exhaustive: quadratic in the 4^k family size, so practical up to
    four or five triplets.
    """
    members = family.members
    points = family.points
    size = members.shape[0]
    failures = []
    witness = None
    checked = 0
    for f_idx in range(size):
        for p_idx in range(points.size):
            checked += 1
            found = None
            for g_idx in range(size):
                if g_idx == f_idx:
                    continue
                if is_close_at_point(members[f_idx], members[g_idx], points, p_idx, mode):
                    found = g_idx
                    break
            if found is None:
                failures.append((f_idx, p_idx))
            elif witness is None:
                witness = (f_idx, p_idx, found)
    return ShatteringReport(
        mode=mode,
        triplet_count=family.triplet_count,
        family_size=size,
        passes=not failures,
        pairs_checked=checked,
        failures=tuple(failures),
        witness_example=witness,
    )


def argmax_query_lower_bound(n: int, k: int) -> int:
    """Smallest q with k^q >= k! * C(n, k-1), in exact integer arithmetic.

    A decision tree of argmax queries has arity k, and revealing the
    labels of n points in k ordered classes on the line must distinguish
    k! * C(n, k-1) arrangements, so its depth is at least this q.
    """
    if k < 2:
        raise ValueError("need at least 2 classes")
    if n < k - 1:
        raise ValueError("need at least k - 1 points to realize all classes")
    count = math.factorial(k) * math.comb(n, k - 1)
    q = 0
    power = 1
    while power < count:
        power *= k
        q += 1
    return q


@dataclass(frozen=True)
class CounterexampleReport:
    """A support whose empirical graph misses a boundary edge, making the
    duel aggregation mislabel a probe point that the full graph gets right."""

    centers: tuple[float, ...]
    support: tuple[float, ...]
    probe: float
    empirical_edges: tuple[tuple[int, int], ...]
    missing_edge: tuple[int, int]
    teacher_label: int
    full_graph_label: int
    empirical_graph_label: int
    full_graph_correct: bool
    empirical_graph_wrong: bool

    @property
    def reproduced(self) -> bool:
        return self.full_graph_correct and self.empirical_graph_wrong

    def to_json(self) -> str:
        payload = {
            "centers": list(self.centers),
            "support": list(self.support),
            "probe": self.probe,
            "empirical_edges": [list(e) for e in self.empirical_edges],
            "missing_edge": list(self.missing_edge),
            "teacher_label": self.teacher_label,
            "full_graph_label": self.full_graph_label,
            "empirical_graph_label": self.empirical_graph_label,
            "full_graph_correct": self.full_graph_correct,
            "empirical_graph_wrong": self.empirical_graph_wrong,
            "reproduced": self.reproduced,
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    def to_text(self) -> str:
        return "\n".join(
            [
                "empirical-graph miss demonstration",
                f"  centers: {list(self.centers)}",
                f"  support: {list(self.support)}",
                f"  empirical edges: {sorted(self.empirical_edges)} "
                f"(missing {self.missing_edge})",
                f"  probe {self.probe}: teacher says {self.teacher_label}, "
                f"full graph says {self.full_graph_label}, "
                f"empirical graph says {self.empirical_graph_label}",
                f"  result: {'REPRODUCED' if self.reproduced else 'NOT REPRODUCED'}",
            ]
        )


def missing_edge_counterexample() -> CounterexampleReport:
    """Six classes on the line, support clustered around alternating
    boundaries only.

    The support witnesses the edges (0,1), (2,3) and (4,5) but not
    (1,2); with exact duels, a probe just left of the classes-1/2
    boundary then ties several classes at a perfect duel record and the
    aggregation picks the wrong one, while the full path graph stays
    exact.
    """
    centers = (1.0, 2.0, 3.0, 4.0, 5.0, 6.0)
    support = (1.4, 1.6, 3.4, 3.6, 5.4, 5.6)
    probe = 2.6
    model = centers_to_linear(np.array(centers))
    emp = empirical_graph(model, lift_batch(support))
    full = path_graph_from_order(np.arange(6))
    exact_emp = BinaryClassifierSet.from_model_differences(model, emp)
    exact_full = BinaryClassifierSet.from_model_differences(model, full)
    x = lift(probe)
    teacher_label = int(np.argmax(model.scores(x)))
    full_label = int(aggregate_predict(full, exact_full, x))
    emp_label = int(aggregate_predict(emp, exact_emp, x))
    return CounterexampleReport(
        centers=centers,
        support=support,
        probe=probe,
        empirical_edges=tuple(emp.sorted_edges()),
        missing_edge=(1, 2),
        teacher_label=teacher_label,
        full_graph_label=full_label,
        empirical_graph_label=emp_label,
        full_graph_correct=full_label == teacher_label,
        empirical_graph_wrong=emp_label != teacher_label,
    )
