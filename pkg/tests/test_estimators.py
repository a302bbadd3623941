"""Estimator wrappers: sklearn contract plus query accounting."""
import numpy as np
import pytest
from sklearn.base import clone

from labelduel import (
    ActiveTournamentClassifier,
    ComparisonSGDClassifier,
    OneDimComparisonClassifier,
    PassiveTournamentClassifier,
    centers_to_linear,
    complete_graph,
    lift_batch,
    random_teacher,
    sample_sphere,
)

TEACHER = random_teacher(4, 6, 2)
STREAM = sample_sphere(4, 500, 7).points


@pytest.mark.parametrize(
    "estimator",
    [
        ComparisonSGDClassifier(teacher=TEACHER, confidence=0.5, learning_rate=0.3),
        PassiveTournamentClassifier(teacher=TEACHER, margin=0.4, learning_rate=0.25),
        ActiveTournamentClassifier(teacher=TEACHER, margin=0.4, learning_rate=0.25,
                                   duel_margin=2.0),
    ],
)
class TestStudentEstimators:
    def test_clone_and_params_roundtrip(self, estimator):
        cloned = clone(estimator)
        assert cloned.get_params() == estimator.get_params()

    def test_fit_exposes_fitted_attributes(self, estimator):
        est = clone(estimator).fit(STREAM)
        assert est.weights_.shape == (TEACHER.k, 4)
        assert est.n_comparisons_ == est.ledger_.comparisons
        np.testing.assert_array_equal(est.classes_, np.arange(TEACHER.k))

    def test_predict_and_decision_function_shapes(self, estimator):
        est = clone(estimator).fit(STREAM)
        X = STREAM[:17]
        assert est.decision_function(X).shape == (17, TEACHER.k)
        preds = est.predict(X)
        assert preds.shape == (17,)
        assert set(np.unique(preds)) <= set(range(TEACHER.k))

    def test_unfitted_predict_raises(self, estimator):
        from sklearn.exceptions import NotFittedError

        with pytest.raises(NotFittedError):
            clone(estimator).predict(STREAM[:3])

    def test_missing_teacher_rejected(self, estimator):
        bare = clone(estimator).set_params(teacher=None)
        with pytest.raises(ValueError, match="teacher"):
            bare.fit(STREAM)

    def test_score_against_teacher_labels(self, estimator):
        est = clone(estimator).fit(STREAM)
        labels = TEACHER.predict(STREAM)
        assert 0.0 <= est.score(STREAM, labels) <= 1.0


class TestComparisonSGDSpecifics:
    def test_default_graph_is_complete(self):
        est = ComparisonSGDClassifier(teacher=TEACHER, steps=20).fit(STREAM)
        dense = ComparisonSGDClassifier(
            teacher=TEACHER, graph=complete_graph(TEACHER.k), steps=20
        ).fit(STREAM)
        np.testing.assert_array_equal(est.weights_, dense.weights_)

    def test_refit_is_reproducible(self):
        est = ComparisonSGDClassifier(teacher=TEACHER, seed=3, steps=100)
        a = clone(est).fit(STREAM).weights_
        b = clone(est).fit(STREAM).weights_
        np.testing.assert_array_equal(a, b)

    def test_steps_default_one_pass(self):
        est = ComparisonSGDClassifier(teacher=TEACHER).fit(STREAM[:50])
        assert est.ledger_.comparisons == est.n_comparisons_


class TestOneDimEstimator:
    def test_fit_predict_close_to_teacher(self):
        teacher = centers_to_linear([0.1, 0.5, 0.9])
        est = OneDimComparisonClassifier(teacher=teacher, epsilon=0.05)
        est.fit(np.linspace(0, 1, 200))
        grid = np.linspace(0, 1, 1000)
        truth = teacher.predict(lift_batch(grid))
        assert np.mean(est.predict(grid) == truth) >= 0.95
        assert est.n_comparisons_ > 0
        assert est.graph_.max_degree() <= 2

    def test_accepts_column_vector_input(self):
        teacher = centers_to_linear([0.2, 0.8])
        est = OneDimComparisonClassifier(teacher=teacher).fit(np.linspace(0, 1, 64)[:, None])
        assert est.predict([[0.1], [0.9]]).shape == (2,)

    def test_clone_contract(self):
        est = OneDimComparisonClassifier(teacher=None, epsilon=0.2, mode="eager-pairs")
        assert clone(est).get_params()["epsilon"] == 0.2
