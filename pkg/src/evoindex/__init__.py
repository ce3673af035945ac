"""Self-learning search index evolution.

A reinforcement-driven dynamic index (scored term-object links with
threshold promotion), exploit/explore result-list policies, simulated user
traffic, a pure-death convergence model with closed forms and a stochastic
oracle, and a Monte Carlo experiment harness that ties them together.
"""

from .store import IndexClass, IndexStore, ObjectId, TermId
from .selection import (
    BetaPolicy,
    MQList,
    OrderingStrategy,
    choose_oa_size,
    compose_mq,
    construct_oa,
    order_mq,
    sample_ob,
)
from .engine import (
    EngineConfig,
    Feedback,
    Query,
    RewardSignal,
    apply_feedback,
    run_episode,
    select_action,
)
from .usersim import (
    ArrivalProcess,
    GroundTruth,
    QueryCase,
    QueryGenerator,
    VocabularyState,
    generate_query,
    next_interarrival,
    simulate_click,
)
from .convergence import (
    AlphaEstimate,
    DeathModel,
    Trajectory,
    estimate_alpha,
    expected_remaining,
    exposure_proportion,
    pure_death_oracle,
    theory_trajectory,
    time_to_proportion,
    variance_remaining,
)
from .harness import (
    EnsembleReport,
    ExperimentConfig,
    Mode,
    TheoryComparison,
    build_ensemble_report,
    compare_with_theory,
    detect_convergence,
    emit_outputs,
    run_monte_carlo,
    run_trial,
    sample_grid,
)
from .config import ConfigError, load_config, parse_config

__version__ = "0.1.0"

__all__ = [
    "IndexClass",
    "IndexStore",
    "ObjectId",
    "TermId",
    "BetaPolicy",
    "MQList",
    "OrderingStrategy",
    "choose_oa_size",
    "compose_mq",
    "construct_oa",
    "order_mq",
    "sample_ob",
    "EngineConfig",
    "Feedback",
    "Query",
    "RewardSignal",
    "apply_feedback",
    "run_episode",
    "select_action",
    "ArrivalProcess",
    "GroundTruth",
    "QueryCase",
    "QueryGenerator",
    "VocabularyState",
    "generate_query",
    "next_interarrival",
    "simulate_click",
    "AlphaEstimate",
    "DeathModel",
    "Trajectory",
    "estimate_alpha",
    "expected_remaining",
    "exposure_proportion",
    "pure_death_oracle",
    "theory_trajectory",
    "time_to_proportion",
    "variance_remaining",
    "EnsembleReport",
    "ExperimentConfig",
    "Mode",
    "TheoryComparison",
    "build_ensemble_report",
    "compare_with_theory",
    "detect_convergence",
    "emit_outputs",
    "run_monte_carlo",
    "run_trial",
    "sample_grid",
    "ConfigError",
    "load_config",
    "parse_config",
]
