"""Exact and Monte Carlo duality checks for the stochastic six vertex system."""

from sixv.dynamics import (
    LumpedOutcome,
    Mutation,
    StepDistribution,
    forward_step_distribution,
    one_particle_kernel,
    reversed_step_distribution,
    sample_forward_step,
    sample_reversed_step,
    trajectory_rng,
)
from sixv.duality import (
    ExpectationResult,
    eval_functional,
    exact_expectation_forward,
    exact_expectation_reversed,
    mc_expectation,
)
from sixv.model import (
    LocationConfig,
    OccupationConfig,
    Params,
    ReversedConfig,
    VertexType,
    format_rational,
    height,
    parse_rational,
    to_location,
    to_occupation,
    validate_location,
    validate_reversed,
    vertex_weight,
)
from sixv.verify import (
    CheckReport,
    SweepSpec,
    check_case_identities,
    check_duality,
    check_lemma_factorization,
    check_truncation_invariance,
    classify_case,
    run_sweep,
)

__all__ = [
    "CheckReport",
    "ExpectationResult",
    "LocationConfig",
    "LumpedOutcome",
    "Mutation",
    "OccupationConfig",
    "Params",
    "ReversedConfig",
    "StepDistribution",
    "SweepSpec",
    "VertexType",
    "check_case_identities",
    "check_duality",
    "check_lemma_factorization",
    "check_truncation_invariance",
    "classify_case",
    "eval_functional",
    "exact_expectation_forward",
    "exact_expectation_reversed",
    "format_rational",
    "forward_step_distribution",
    "height",
    "mc_expectation",
    "one_particle_kernel",
    "parse_rational",
    "reversed_step_distribution",
    "run_sweep",
    "sample_forward_step",
    "sample_reversed_step",
    "to_location",
    "to_occupation",
    "trajectory_rng",
    "validate_location",
    "validate_reversed",
    "vertex_weight",
]
