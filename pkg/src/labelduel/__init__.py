"""Active learning of multiclass linear classifiers from label comparisons.

A teacher model answers two kinds of oracle queries (argmax and pairwise
label comparison), every call charged to a query ledger. Learners spend
comparisons guided by the label neighborhood graph: classes are
neighbors when they share a decision boundary, and duels only ever need
to be asked about neighboring pairs.
"""
from .aggregation import (
    AggregatedClassifier,
    AggregationReport,
    BinaryClassifierSet,
    ConstantClassifier,
    aggregate_predict,
    aggregate_scores,
    load_classifier,
    save_classifier,
    verify_aggregation_bound,
)
from .comparison_sgd import (
    ComparisonSGDConfig,
    pair_loss,
    pair_loss_gradient,
    train_comparison_sgd,
)
from .estimators import (
    ActiveTournamentClassifier,
    ComparisonSGDClassifier,
    OneDimComparisonClassifier,
    PassiveTournamentClassifier,
)
from .experiments import (
    ExperimentRun,
    SuiteConfig,
    fit_linear_teacher,
    ingest_and_project,
    matched_accuracy_table,
    mean_trajectories,
    random_teacher,
    run_comparison_suite,
    sparsity_experiment,
    topk_accuracy,
)
from .graphs import (
    NeighborhoodGraph,
    complete_graph,
    empirical_graph,
    load_graph,
    path_graph_from_order,
    save_graph,
    sparsity_level,
    true_graph,
)
from .one_dim import (
    CentersModel,
    binary_search_threshold,
    centers_to_linear,
    fit_graph_classifier,
    fit_line_classifier,
    learn_graph_1d,
    lift,
    lift_batch,
    total_order_at,
)
from .oracles import (
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
from .theory import (
    CounterexampleReport,
    ShatteringFamily,
    ShatteringReport,
    argmax_query_lower_bound,
    build_shattering_family,
    is_close_at_point,
    missing_edge_counterexample,
    verify_shattering,
)
from .tournaments import (
    TournamentConfig,
    TournamentResult,
    active_tournament,
    active_tournament_learner,
    champion_tournament,
    passive_tournament_learner,
)

__version__ = "0.1.0"
