"""Exhaustive verifiers: shattering family, query lower bound, graph-miss demo."""
import itertools
import json
import math

import numpy as np
import pytest

from labelduel import (
    argmax_query_lower_bound,
    build_shattering_family,
    is_close_at_point,
    missing_edge_counterexample,
    verify_shattering,
)


def naive_lower_bound(n: int, k: int) -> int:
    """Independent oracle: count the arrangements by explicit enumeration
    (orderings times threshold placements), then scan q linearly."""
    count = 0
    for _ in itertools.permutations(range(k)):
        for _ in itertools.combinations(range(n), k - 1):
            count += 1
    q = 0
    while k**q < count:
        q += 1
    return q


class TestShatteringFamily:
    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
    def test_family_size_is_four_to_the_k(self, k):
        assert build_shattering_family(k).size == 4**k

    def test_k1_members_explicit(self):
        fam = build_shattering_family(1)
        members = {tuple(m) for m in fam.members.tolist()}
        assert members == {(2.0, 1.0), (1.0, 2.0), (2.0, 3.0), (3.0, 2.0)}
        np.testing.assert_array_equal(fam.points, [2.0])

    def test_every_member_has_one_middle_per_triplet(self):
        for k in (1, 2, 3):
            fam = build_shattering_family(k)
            middles = np.array([3 * t + 2 for t in range(k)], dtype=float)
            for member in fam.members:
                pairs = member.reshape(k, 2)
                for t in range(k):
                    on_middle = np.isclose(pairs[t], middles[t])
                    assert on_middle.sum() == 1
                    # both centers inside the triplet's span
                    assert np.all(np.abs(pairs[t] - middles[t]) <= 1.0)

    def test_enumeration_guard(self):
        with pytest.raises(ValueError, match="guard"):
            build_shattering_family(9)


class TestPointCloseness:
    def test_identical_members_never_close(self):
        fam = build_shattering_family(1)
        f = fam.members[0]
        assert not is_close_at_point(f, f, fam.points, 0, "argmax-only")

    def test_hand_checked_pair(self):
        """Centers (2, 3) against (1, 2): the class on the middle point
        flips, so the argmax at the evaluation point 2 changes."""
        f = np.array([2.0, 3.0])
        g = np.array([1.0, 2.0])
        assert is_close_at_point(f, g, [2.0], 0, "strict")
        assert is_close_at_point(f, g, [2.0], 0, "argmax-only")

    def test_shifting_another_triplet_is_not_close(self):
        """Members differing only in triplet 1 keep the argmax at the
        triplet-0 point, so they are not close at that point."""
        fam = build_shattering_family(2)
        members = fam.members
        f = members[0]
        for g in members[1:]:
            if np.array_equal(f[:2], g[:2]) and not np.array_equal(f[2:], g[2:]):
                assert not is_close_at_point(f, g, fam.points, 0, "argmax-only")
                break
        else:
            pytest.fail("no member differing only in triplet 1")


class TestVerifyShattering:
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_argmax_only_passes_exhaustively(self, k):
        report = verify_shattering(build_shattering_family(k), "argmax-only")
        assert report.passes
        assert report.pairs_checked == 4**k * k
        assert report.failures == ()

    def test_strict_mode_recorded_not_asserted(self):
        """Small sizes happen to pass; at k=3 the integer construction
        creates cross-triplet distance ties whose index tie-breaking
        reorders the full total order, so strict closeness fails. The
        report records the outcome either way."""
        assert verify_shattering(build_shattering_family(1), "strict").passes
        assert verify_shattering(build_shattering_family(2), "strict").passes
        report = verify_shattering(build_shattering_family(3), "strict")
        assert isinstance(report.passes, bool)
        payload = json.loads(report.to_json())
        assert payload["mode"] == "strict"
        assert payload["family_size"] == 64

    def test_report_witness_example_is_valid(self):
        fam = build_shattering_family(2)
        report = verify_shattering(fam, "argmax-only")
        f_idx, p_idx, g_idx = report.witness_example
        assert is_close_at_point(
            fam.members[f_idx], fam.members[g_idx], fam.points, p_idx, "argmax-only"
        )


class TestLowerBound:
    def test_two_points_two_classes(self):
        # 2! * C(2, 1) = 4 arrangements, arity-2 tree needs depth 2
        assert argmax_query_lower_bound(2, 2) == 2

    def test_one_point_two_classes(self):
        assert argmax_query_lower_bound(1, 2) == 1

    def test_matches_naive_enumeration(self):
        for k in range(2, 6):
            for n in range(max(1, k - 1), 13):
                assert argmax_query_lower_bound(n, k) == naive_lower_bound(n, k)

    def test_monotone_in_n(self):
        for k in (2, 3, 5):
            values = [argmax_query_lower_bound(n, k) for n in range(k - 1, 30)]
            assert values == sorted(values)

    def test_exact_for_huge_counts(self):
        """Big-integer arithmetic: no overflow at sizes where floats round."""
        q = argmax_query_lower_bound(10_000, 30)
        assert 30 ** (q - 1) < math.factorial(30) * math.comb(10_000, 29) <= 30**q

    def test_validation(self):
        with pytest.raises(ValueError):
            argmax_query_lower_bound(0, 2)
        with pytest.raises(ValueError):
            argmax_query_lower_bound(5, 1)


class TestMissingEdgeCounterexample:
    def test_reproduces(self):
        report = missing_edge_counterexample()
        assert report.reproduced
        assert report.full_graph_correct
        assert report.empirical_graph_wrong

    def test_empirical_graph_is_three_disjoint_edges(self):
        report = missing_edge_counterexample()
        assert sorted(report.empirical_edges) == [(0, 1), (2, 3), (4, 5)]
        assert report.missing_edge == (1, 2)

    def test_frozen_labels(self):
        """Deterministic construction: the probe's teacher label is 2; the
        empirical-graph aggregate picks 1 (lowest index among the perfect
        duel records), the full path graph picks 2."""
        report = missing_edge_counterexample()
        assert report.teacher_label == 2
        assert report.full_graph_label == 2
        assert report.empirical_graph_label == 1

    def test_report_serialization(self):
        report = missing_edge_counterexample()
        payload = json.loads(report.to_json())
        assert payload["reproduced"] is True
        text = report.to_text()
        assert "REPRODUCED" in text
