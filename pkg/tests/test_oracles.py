"""Teacher models, supervision oracles, and query accounting."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from labelduel import (
    Dataset,
    LinearModel,
    QueryLedger,
    argmax_query,
    comparison_query,
    effective_classes,
    load_dataset,
    load_model,
    sample_sphere,
    save_dataset,
    save_model,
)


class TestLinearModel:
    def test_identity_scores(self):
        m = LinearModel(np.eye(2))
        np.testing.assert_array_equal(m.scores([1.0, 0.0]), [1.0, 0.0])

    def test_zero_matrix_scores(self):
        m = LinearModel(np.zeros((3, 2)))
        np.testing.assert_array_equal(m.scores([4.0, -1.0]), np.zeros(3))

    def test_seeded_matrix_vector_product(self):
        """Independent oracle: W @ (1, 1) is the vector of row sums."""
        rng = np.random.default_rng(42)
        W = rng.standard_normal((3, 2))
        m = LinearModel(W)
        np.testing.assert_allclose(m.scores([1.0, 1.0]), W.sum(axis=1), rtol=0, atol=0)
        np.testing.assert_allclose(
            m.scores([1.0, 1.0]),
            [-0.7352670264860641, 1.6910159121976711, -3.2532146955161547],
        )

    def test_dimension_mismatch_rejected(self):
        m = LinearModel(np.eye(3))
        with pytest.raises(ValueError, match="dimension"):
            m.scores([1.0, 0.0])

    def test_invalid_weights_rejected(self):
        with pytest.raises(ValueError):
            LinearModel(np.ones((1, 3)))  # k < 2
        with pytest.raises(ValueError):
            LinearModel(np.array([[np.inf, 0.0], [0.0, 1.0]]))
        with pytest.raises(ValueError):
            LinearModel(np.ones(4))  # not a matrix

    def test_weights_are_immutable(self):
        m = LinearModel(np.eye(2))
        with pytest.raises(ValueError):
            m.weights[0, 0] = 5.0


class TestArgmaxQuery:
    def test_clear_winner(self):
        m = LinearModel(np.array([[1.0], [0.0]]))
        assert argmax_query(m, [1.0], QueryLedger()) == 0

    def test_tie_breaks_to_lowest_index(self):
        m = LinearModel(np.zeros((2, 1)))
        assert argmax_query(m, [1.0], QueryLedger()) == 0

    def test_middle_winner(self):
        m = LinearModel(np.array([[0.1], [0.3], [0.2]]))
        assert argmax_query(m, [1.0], QueryLedger()) == 1

    def test_charges_ledger(self):
        m = LinearModel(np.eye(2))
        ledger = QueryLedger()
        argmax_query(m, [1.0, 0.0], ledger)
        argmax_query(m, [0.0, 1.0], ledger)
        assert ledger.argmaxes == 2
        assert ledger.comparisons == 0


class TestComparisonQuery:
    def test_strict_win(self):
        m = LinearModel(np.array([[1.0], [0.0]]))
        assert comparison_query(m, [1.0], 0, 1, QueryLedger()) is True

    def test_tie_is_false(self):
        """Strict indicator: exact score ties answer False."""
        m = LinearModel(np.zeros((2, 1)))
        assert comparison_query(m, [1.0], 0, 1, QueryLedger()) is False

    def test_loss(self):
        m = LinearModel(np.array([[0.2], [0.7]]))
        assert comparison_query(m, [1.0], 0, 1, QueryLedger()) is False

    def test_self_duel_rejected(self):
        m = LinearModel(np.eye(2))
        with pytest.raises(ValueError, match="itself"):
            comparison_query(m, [1.0, 0.0], 1, 1, QueryLedger())

    def test_out_of_range_rejected(self):
        m = LinearModel(np.eye(2))
        with pytest.raises(ValueError):
            comparison_query(m, [1.0, 0.0], 0, 2, QueryLedger())

    def test_rejected_calls_do_not_charge(self):
        m = LinearModel(np.eye(2))
        ledger = QueryLedger()
        with pytest.raises(ValueError):
            comparison_query(m, [1.0, 0.0], 1, 1, ledger)
        assert ledger.comparisons == 0


class TestOracleAlgebra:
    """Cross-oracle consistency on random teachers."""

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_antisymmetry(self, seed):
        """(i, j) and (j, i) are never both true; both false only on a tie."""
        rng = np.random.default_rng(seed)
        m = LinearModel(rng.standard_normal((4, 3)))
        x = rng.standard_normal(3)
        ledger = QueryLedger()
        s = m.scores(x)
        for i in range(4):
            for j in range(i + 1, 4):
                fwd = comparison_query(m, x, i, j, ledger)
                bwd = comparison_query(m, x, j, i, ledger)
                assert not (fwd and bwd)
                if not fwd and not bwd:
                    assert s[i] == s[j]

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_argmax_beats_every_rival(self, seed):
        rng = np.random.default_rng(seed)
        m = LinearModel(rng.standard_normal((5, 3)))
        x = rng.standard_normal(3)
        ledger = QueryLedger()
        winner = argmax_query(m, x, ledger)
        s = m.scores(x)
        for j in range(5):
            if j == winner:
                continue
            assert comparison_query(m, x, winner, j, ledger) or s[winner] == s[j]

    @given(st.integers(0, 2**32 - 1), st.floats(0.01, 100.0))
    @settings(max_examples=30, deadline=None)
    def test_positive_rescale_invariance(self, seed, scale):
        """Scaling all rows by one positive constant changes no answers."""
        rng = np.random.default_rng(seed)
        W = rng.standard_normal((4, 3))
        x = rng.standard_normal(3)
        a, b = LinearModel(W), LinearModel(scale * W)
        assert argmax_query(a, x, QueryLedger()) == argmax_query(b, x, QueryLedger())
        for i in range(4):
            for j in range(4):
                if i == j:
                    continue
                assert comparison_query(a, x, i, j, QueryLedger()) == comparison_query(
                    b, x, i, j, QueryLedger()
                )

    def test_ledger_counts_exact_invocations(self):
        m = LinearModel(np.eye(3))
        ledger = QueryLedger()
        n_cmp, n_arg = 0, 0
        rng = np.random.default_rng(0)
        for _ in range(50):
            x = rng.standard_normal(3)
            if rng.random() < 0.5:
                comparison_query(m, x, 0, 1, ledger)
                n_cmp += 1
            else:
                argmax_query(m, x, ledger)
                n_arg += 1
        assert ledger.comparisons == n_cmp
        assert ledger.argmaxes == n_arg
        assert ledger.total == 50


class TestSampleSphere:
    def test_unit_norms(self):
        ds = sample_sphere(4, 500, 0)
        np.testing.assert_allclose(np.linalg.norm(ds.points, axis=1), 1.0, atol=1e-12)

    def test_same_seed_identical(self):
        a = sample_sphere(3, 100, 9)
        b = sample_sphere(3, 100, 9)
        np.testing.assert_array_equal(a.points, b.points)

    def test_law_of_large_numbers(self):
        """Empirical mean within 5/sqrt(n) of zero per coordinate."""
        n = 100_000
        ds = sample_sphere(2, n, 7)
        assert np.all(np.abs(ds.points.mean(axis=0)) < 5.0 / np.sqrt(n))

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            sample_sphere(0, 10, 0)
        with pytest.raises(ValueError):
            sample_sphere(2, -1, 0)

    def test_zero_points(self):
        assert len(sample_sphere(3, 0, 0)) == 0


class TestEffectiveClasses:
    def test_two_half_circles(self):
        m = LinearModel(np.eye(2))
        assert effective_classes(m, sample_sphere(2, 200, 1)) == {0, 1}

    def test_dominated_row_never_wins(self):
        """A row inside the convex hull of the others is never the
        strict argmax; checked against a dense angular grid."""
        w0, w1 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
        W = np.vstack([w0, w1, 0.5 * (w0 + w1)])
        m = LinearModel(W)
        angles = np.linspace(0, 2 * np.pi, 100_000, endpoint=False)
        grid = np.column_stack([np.cos(angles), np.sin(angles)])
        grid_classes = {int(c) for c in np.unique(np.argmax(grid @ W.T, axis=1))}
        assert grid_classes == {0, 1}
        assert effective_classes(m, grid) == {0, 1}

    def test_single_point(self):
        m = LinearModel(np.eye(3))
        assert effective_classes(m, np.array([[1.0, 0.0, 0.0]])) == {0}

    def test_empty_rejected(self):
        m = LinearModel(np.eye(2))
        with pytest.raises(ValueError, match="nonempty"):
            effective_classes(m, np.empty((0, 2)))


class TestPersistence:
    def test_model_roundtrip_exact(self, tmp_path):
        rng = np.random.default_rng(3)
        m = LinearModel(rng.standard_normal((5, 4)))
        path = tmp_path / "model.txt"
        save_model(m, path)
        loaded = load_model(path)
        np.testing.assert_array_equal(loaded.weights, m.weights)
        assert path.read_text().splitlines()[0] == "5 4"

    def test_dataset_roundtrip(self, tmp_path):
        ds = Dataset(np.array([[1.5, -2.0], [0.25, 3.0]]), np.array([1, 0]))
        path = tmp_path / "data.csv"
        save_dataset(ds, path)
        loaded = load_dataset(path, labeled=True)
        np.testing.assert_array_equal(loaded.points, ds.points)
        np.testing.assert_array_equal(loaded.labels, ds.labels)

    def test_unlabeled_roundtrip(self, tmp_path):
        ds = Dataset(np.array([[1.0], [2.0]]))
        path = tmp_path / "data.csv"
        save_dataset(ds, path)
        loaded = load_dataset(path)
        np.testing.assert_array_equal(loaded.points, ds.points)
        assert loaded.labels is None

    def test_malformed_row_reports_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1.0,2.0\n1.0,oops\n")
        with pytest.raises(ValueError, match="line 2"):
            load_dataset(path)

    def test_ragged_row_reports_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1.0,2.0\n1.0\n")
        with pytest.raises(ValueError, match="line 2"):
            load_dataset(path)


class TestDataset:
    def test_labels_validated(self):
        with pytest.raises(ValueError):
            Dataset(np.ones((3, 2)), np.array([0, 1]))
        with pytest.raises(ValueError):
            Dataset(np.ones((2, 2)), np.array([0, -1]))

    def test_scalar_points_become_column(self):
        ds = Dataset(np.array([1.0, 2.0, 3.0]))
        assert ds.points.shape == (3, 1)
        assert ds.d == 1
