"""Scikit-learn style wrappers around the comparison-driven learners.

Supervision comes from a teacher model passed as a constructor
parameter, not from ``y``: ``fit(X)`` streams the rows of X, queries the
teacher's comparison oracle through a fresh ledger, and exposes the
result through the usual fitted attributes (``weights_``,
``n_comparisons_``, ``classes_``). The estimators follow the sklearn
contract (``get_params`` / ``set_params`` / ``clone`` all work), so they
compose with model selection and metrics from the wider ecosystem.
"""
from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .comparison_sgd import ComparisonSGDConfig, train_comparison_sgd
from .graphs import complete_graph
from .one_dim import fit_line_classifier, lift_batch
from .oracles import QueryLedger
from .tournaments import TournamentConfig, active_tournament_learner, passive_tournament_learner

__all__ = [
    "ComparisonSGDClassifier",
    "PassiveTournamentClassifier",
    "ActiveTournamentClassifier",
    "OneDimComparisonClassifier",
]


class _StudentMixin:
    """Shared prediction surface over a fitted weight matrix."""

    def decision_function(self, X):
        check_is_fitted(self, "weights_")
        X = check_array(X)
        return X @ self.weights_.T

    def predict(self, X):
        return np.argmax(self.decision_function(X), axis=1)


class ComparisonSGDClassifier(_StudentMixin, ClassifierMixin, BaseEstimator):
    """Margin-gated comparison SGD as an estimator.

    ``fit(X)`` streams the rows of X in order; ``steps=None`` means one
    pass over X. The candidate-pair graph defaults to the complete graph
    on the teacher's classes.
    """

    def __init__(
        self,
        teacher=None,
        graph=None,
        buffer_size=32,
        steps=None,
        confidence=0.5,
        learning_rate=0.1,
        edge_mode="iterate-all",
        seed=0,
    ):
        self.teacher = teacher
        self.graph = graph
        self.buffer_size = buffer_size
        self.steps = steps
        self.confidence = confidence
        self.learning_rate = learning_rate
        self.edge_mode = edge_mode
        self.seed = seed

    def fit(self, X, y=None):
        if self.teacher is None:
            raise ValueError("a teacher model is required to answer comparison queries")
        X = check_array(X)
        graph = self.graph if self.graph is not None else complete_graph(self.teacher.k)
        config = ComparisonSGDConfig(
            graph=graph,
            buffer_size=self.buffer_size,
            steps=len(X) if self.steps is None else self.steps,
            confidence=self.confidence,
            learning_rate=self.learning_rate,
            edge_mode=self.edge_mode,
            seed=self.seed,
        )
        ledger = QueryLedger()
        student, queries = train_comparison_sgd(config, self.teacher, X, ledger)
        self.weights_ = student.weights
        self.n_comparisons_ = queries
        self.ledger_ = ledger
        self.classes_ = np.arange(self.teacher.k)
        return self


class _TournamentClassifier(_StudentMixin, ClassifierMixin, BaseEstimator):
    _active = False

    def __init__(self, teacher=None, buffer_size=32, steps=None, margin=0.5, learning_rate=0.1):
        self.teacher = teacher
        self.buffer_size = buffer_size
        self.steps = steps
        self.margin = margin
        self.learning_rate = learning_rate

    def _config(self, n_points):
        return TournamentConfig(
            buffer_size=self.buffer_size,
            steps=n_points if self.steps is None else self.steps,
            margin=self.margin,
            learning_rate=self.learning_rate,
            duel_margin=getattr(self, "duel_margin", math.inf),
        )

    def fit(self, X, y=None):
        if self.teacher is None:
            raise ValueError("a teacher model is required to answer comparison queries")
        X = check_array(X)
        ledger = QueryLedger()
        learner = active_tournament_learner if self._active else passive_tournament_learner
        student, queries = learner(self._config(len(X)), self.teacher, X, ledger)
        self.weights_ = student.weights
        self.n_comparisons_ = queries
        self.ledger_ = ledger
        self.classes_ = np.arange(self.teacher.k)
        return self


class PassiveTournamentClassifier(_TournamentClassifier):
    """Uncertainty-gated learner that reveals labels by full tournaments."""


class ActiveTournamentClassifier(_TournamentClassifier):
    """Tournament learner whose student answers confident duels itself."""

    _active = True

    def __init__(
        self,
        teacher=None,
        buffer_size=32,
        steps=None,
        margin=0.5,
        learning_rate=0.1,
        duel_margin=0.5,
    ):
        super().__init__(
            teacher=teacher,
            buffer_size=buffer_size,
            steps=steps,
            margin=margin,
            learning_rate=learning_rate,
        )
        self.duel_margin = duel_margin


class OneDimComparisonClassifier(ClassifierMixin, BaseEstimator):
    """The full 1D pipeline (order, path graph, threshold duels) as an estimator.

    ``fit(X)`` takes scalar sample positions, shape (n,) or (n, 1); the
    teacher must be a lifted two-column model such as the output of
    :func:`labelduel.one_dim.centers_to_linear`.
    """

    def __init__(self, teacher=None, epsilon=0.05, mode="lazy-sort"):
        self.teacher = teacher
        self.epsilon = epsilon
        self.mode = mode

    def fit(self, X, y=None):
        if self.teacher is None:
            raise ValueError("a teacher model is required to answer comparison queries")
        xs = np.asarray(X, dtype=float).ravel()
        if xs.size == 0:
            raise ValueError("need at least one sample position")
        ledger = QueryLedger()
        classifier, queries = fit_line_classifier(
            self.teacher, xs, self.epsilon, ledger, mode=self.mode
        )
        self.classifier_ = classifier
        self.graph_ = classifier.graph
        self.n_comparisons_ = queries
        self.ledger_ = ledger
        self.classes_ = np.arange(self.teacher.k)
        return self

    def predict(self, X):
        check_is_fitted(self, "classifier_")
        xs = np.asarray(X, dtype=float).ravel()
        return np.asarray(self.classifier_.predict(lift_batch(xs)))

    def decision_function(self, X):
        check_is_fitted(self, "classifier_")
        xs = np.asarray(X, dtype=float).ravel()
        return self.classifier_.duel_scores(lift_batch(xs))
