"""Ridge regression with fake and missing features: simulation, exact
generalization error, and a high-probability error bound."""

__version__ = "0.1.0"

from .bound import (
    BoundParams,
    BoundReport,
    chi2_event_check,
    f_g,
    f_g_bar,
    g_coefficients,
    prob_floor,
    singular_event_check,
    theorem_bound,
)
from .datagen import SeedSpec, gen_dataset, gen_features, gen_noise, gen_response
from .errors import (
    ConfigError,
    ConvergenceError,
    DimensionError,
    LambdaZeroError,
    NegativeParameterError,
    PowerError,
    SolveError,
)
from .estimator import extend_estimate, min_norm_solve, predict, ridge_solve, solve, svd_factor
from .experiment import (
    ExperimentPlan,
    coverage_estimate,
    interpolation_check,
    run_monte_carlo,
    run_trial,
    sweep,
)
from .metrics import ErrorReport, gen_error_analytic, gen_error_empirical, training_error
from .model import Dataset, Estimate, GroundTruth, ProblemConfig, make_ground_truth, validate_config

__all__ = [
    "__version__",
    "BoundParams",
    "BoundReport",
    "chi2_event_check",
    "f_g",
    "f_g_bar",
    "g_coefficients",
    "prob_floor",
    "singular_event_check",
    "theorem_bound",
    "SeedSpec",
    "gen_dataset",
    "gen_features",
    "gen_noise",
    "gen_response",
    "ConfigError",
    "ConvergenceError",
    "DimensionError",
    "LambdaZeroError",
    "NegativeParameterError",
    "PowerError",
    "SolveError",
    "extend_estimate",
    "min_norm_solve",
    "predict",
    "ridge_solve",
    "solve",
    "svd_factor",
    "ExperimentPlan",
    "coverage_estimate",
    "interpolation_check",
    "run_monte_carlo",
    "run_trial",
    "sweep",
    "ErrorReport",
    "gen_error_analytic",
    "gen_error_empirical",
    "training_error",
    "Dataset",
    "Estimate",
    "GroundTruth",
    "ProblemConfig",
    "make_ground_truth",
    "validate_config",
]
