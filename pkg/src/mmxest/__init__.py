"""Deterministic minimax output prediction over a finite bank of linear models.

A bank of Kalman filters (one per candidate model) accumulates prediction
costs; the minimax estimator solves a min-max of quadratics over the bank at
each step, while a Bayesian posterior baseline runs alongside.  Riccati
utilities provide the gains and the gamma-feasibility certificates, and a
seeded portable simulator plus a CLI make runs reproducible to the byte.
"""
from .bayes import BayesPosterior, bayes_estimate, bayes_init, bayes_step
from .config import ExperimentConfig, load_config, with_seed
from .exceptions import (
    ConfigError,
    DimensionMismatch,
    EmptyModelSet,
    EmptyPieceList,
    EstimationError,
    FactorizationFailure,
    GammaInfeasible,
    HorizonExceeded,
    IndexOutOfRange,
    ModelMismatch,
    NoConvergence,
    NonpositiveGamma,
    NotPositiveDefinite,
    PreconditionViolated,
    SingularSystem,
)
from .filter_bank import (
    FilterBankState,
    init,
    step,
    value_function,
    worst_case_state,
)
from .minimax import (
    MinimaxEstimate,
    QuadraticPiece,
    build_pieces,
    project_simplex,
    quadratic_max_closed_form,
    solve,
    weight_matrix,
)
from .model_bank import ModelSet, validate
from .riccati import (
    AreSolution,
    RiccatiSequence,
    StationaryGains,
    check_gamma_feasibility,
    innovation_covariance,
    kalman_gain,
    riccati_step,
    run_recursion,
    solve_are,
    stationary_gains,
)
from .simulator import (
    InputSpec,
    NoiseSpec,
    SimulationTrace,
    generate_truth,
    run_estimators,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "AreSolution",
    "BayesPosterior",
    "ConfigError",
    "DimensionMismatch",
    "EmptyModelSet",
    "EmptyPieceList",
    "EstimationError",
    "ExperimentConfig",
    "FactorizationFailure",
    "FilterBankState",
    "GammaInfeasible",
    "HorizonExceeded",
    "IndexOutOfRange",
    "InputSpec",
    "MinimaxEstimate",
    "ModelMismatch",
    "ModelSet",
    "NoConvergence",
    "NoiseSpec",
    "NonpositiveGamma",
    "NotPositiveDefinite",
    "PreconditionViolated",
    "QuadraticPiece",
    "RiccatiSequence",
    "SimulationTrace",
    "SingularSystem",
    "StationaryGains",
    "bayes_estimate",
    "bayes_init",
    "bayes_step",
    "build_pieces",
    "check_gamma_feasibility",
    "generate_truth",
    "init",
    "innovation_covariance",
    "kalman_gain",
    "load_config",
    "project_simplex",
    "quadratic_max_closed_form",
    "riccati_step",
    "run_estimators",
    "run_recursion",
    "simulate",
    "solve",
    "solve_are",
    "stationary_gains",
    "step",
    "validate",
    "value_function",
    "weight_matrix",
    "with_seed",
    "worst_case_state",
]
