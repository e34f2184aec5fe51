"""Causal effect estimation for rare-event proportional-hazards cohorts.

Simulate confounded or mediated survival cohorts, fit Cox models, apply
covariate standardization or mediator factorization to recover
interventional quantities, and check every analytic answer against a
brute-force do-intervention oracle.
"""

from .backdoor import (
    BackdoorSummary,
    causal_rr,
    compute_az,
    do_cdf,
    do_cumhaz,
    do_interval_hazard,
    naive_rr,
    paf,
)
from .cox import (
    CoxFit,
    StepFunction,
    breslow_baseline,
    fit_cox,
    linear_predictor,
    load_fit,
    neg_log_partial_likelihood,
    predict_cumhaz,
    save_fit,
)
from .errors import (
    DegenerateCovariateError,
    DegenerateOracleError,
    DohazardError,
    EmptyStratumError,
    InvalidArgumentError,
    MonotoneLikelihoodError,
    NoEventsError,
    NumericalError,
    ParseError,
    ValidationError,
)
from .frontdoor import (
    FrontdoorParams,
    estimate_frontdoor_params,
    frontdoor_causal_rr,
    frontdoor_do_cdf_empirical,
    frontdoor_do_cdf_gaussian,
    gaussian_moment_factorization,
    mediation_indirect_rr,
)
from .oracle import (
    ApproxErrorReport,
    OracleRatio,
    OracleResult,
    approx_error_report,
    factual_conditional_incidence,
    oracle_paf,
    oracle_rr,
    simulate_do,
    simulate_factual,
    taylor_relative_error,
)
from .results import CausalEstimate
from .simulate import (
    BackdoorCoefficients,
    BernoulliZ,
    Dataset,
    ExponentialHazard,
    FrontdoorCoefficients,
    ScenarioConfig,
    StandardNormalZ,
    SubjectRecord,
    WeibullHazard,
    backdoor_log_hazard,
    frontdoor_log_hazard,
    generate,
    generate_backdoor,
    generate_frontdoor,
    inverse_survival_time,
    load_dataset,
    load_scenario_config,
    save_dataset,
)
from .stats import (
    GaussianSpec,
    RngStream,
    draw_bernoulli,
    draw_normal,
    draw_uniform,
    empirical_moments,
    gaussian_exponential_moment,
    ols_fit,
)

__version__ = "0.1.0"

__all__ = [
    "ApproxErrorReport",
    "BackdoorCoefficients",
    "BackdoorSummary",
    "BernoulliZ",
    "CausalEstimate",
    "CoxFit",
    "Dataset",
    "DegenerateCovariateError",
    "DegenerateOracleError",
    "DohazardError",
    "EmptyStratumError",
    "ExponentialHazard",
    "FrontdoorCoefficients",
    "FrontdoorParams",
    "GaussianSpec",
    "InvalidArgumentError",
    "MonotoneLikelihoodError",
    "NoEventsError",
    "NumericalError",
    "OracleRatio",
    "OracleResult",
    "ParseError",
    "RngStream",
    "ScenarioConfig",
    "StandardNormalZ",
    "StepFunction",
    "SubjectRecord",
    "ValidationError",
    "WeibullHazard",
    "approx_error_report",
    "backdoor_log_hazard",
    "breslow_baseline",
    "causal_rr",
    "compute_az",
    "do_cdf",
    "do_cumhaz",
    "do_interval_hazard",
    "draw_bernoulli",
    "draw_normal",
    "draw_uniform",
    "empirical_moments",
    "estimate_frontdoor_params",
    "factual_conditional_incidence",
    "fit_cox",
    "frontdoor_causal_rr",
    "frontdoor_do_cdf_empirical",
    "frontdoor_do_cdf_gaussian",
    "frontdoor_log_hazard",
    "gaussian_exponential_moment",
    "gaussian_moment_factorization",
    "generate",
    "generate_backdoor",
    "generate_frontdoor",
    "inverse_survival_time",
    "linear_predictor",
    "load_dataset",
    "load_fit",
    "load_scenario_config",
    "mediation_indirect_rr",
    "naive_rr",
    "neg_log_partial_likelihood",
    "ols_fit",
    "oracle_paf",
    "oracle_rr",
    "paf",
    "predict_cumhaz",
    "save_dataset",
    "save_fit",
    "simulate_do",
    "simulate_factual",
    "taylor_relative_error",
]
