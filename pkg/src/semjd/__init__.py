"""Covariance-structure models for jump-diffusion latent processes.

Fit candidate models to high-frequency observations through a jump-truncated
quasi-likelihood, compare them with QBIC/QAIC, and reproduce the
selection-consistency Monte Carlo experiment at desk scale.
"""

from .criteria import CriterionValue, qaic, qaic_overfit_probability, qbic, select
from .errors import (
    AllStartsFailed,
    AsymmetricEntryMap,
    ConfigError,
    DimensionMismatch,
    EmptyCandidateList,
    GapInParamIndices,
    InitNotPD,
    MalformedRow,
    NonOrthonormalF,
    NonUniformGrid,
    NonzeroBDiagonal,
    NotPositiveDefinite,
    NumericalError,
    SemjdError,
    SingularPsi,
    SpecError,
    TooFewRows,
)
from .estimation import FitConfig, FitResult, GivenPoint, MultiStart, fit, multi_start_fit
from .experiment import (
    CandidateModel,
    ExperimentConfig,
    ReplicationResult,
    SelectionReport,
    SelectionTable,
    run_experiment,
    run_replication,
)
from .likelihood import (
    PathData,
    TruncationRule,
    TruncationStats,
    normalized_hessian,
    quasi_loglik,
    quasi_loglik_direct,
    quasi_loglik_gradient,
    truncation_stats,
    truncation_threshold,
)
from .sem import (
    EntryMap,
    Free,
    ImpliedCovariance,
    NestingEmbedding,
    StructuralSpec,
    ThetaVector,
    assemble_sigma,
    check_nesting,
    identifiability_rank,
    random_theta,
    sigma_and_partials,
    sigma_jacobian,
    validate_spec,
)
from .simulate import (
    LatentSdeSpec,
    SimConfig,
    TrueModelSpec,
    reference_true_model,
    simulate_latent,
    simulate_observations,
    true_sigma,
)

__version__ = "0.1.0"

__all__ = [
    "AllStartsFailed",
    "AsymmetricEntryMap",
    "CandidateModel",
    "ConfigError",
    "CriterionValue",
    "DimensionMismatch",
    "EmptyCandidateList",
    "EntryMap",
    "ExperimentConfig",
    "FitConfig",
    "FitResult",
    "Free",
    "GapInParamIndices",
    "GivenPoint",
    "ImpliedCovariance",
    "InitNotPD",
    "LatentSdeSpec",
    "MalformedRow",
    "MultiStart",
    "NestingEmbedding",
    "NonOrthonormalF",
    "NonUniformGrid",
    "NonzeroBDiagonal",
    "NotPositiveDefinite",
    "NumericalError",
    "PathData",
    "ReplicationResult",
    "SelectionReport",
    "SelectionTable",
    "SemjdError",
    "SimConfig",
    "SingularPsi",
    "SpecError",
    "StructuralSpec",
    "ThetaVector",
    "TooFewRows",
    "TrueModelSpec",
    "TruncationRule",
    "TruncationStats",
    "assemble_sigma",
    "check_nesting",
    "fit",
    "identifiability_rank",
    "multi_start_fit",
    "normalized_hessian",
    "reference_true_model",
    "qaic",
    "qaic_overfit_probability",
    "qbic",
    "quasi_loglik",
    "quasi_loglik_direct",
    "quasi_loglik_gradient",
    "random_theta",
    "run_experiment",
    "run_replication",
    "select",
    "sigma_and_partials",
    "sigma_jacobian",
    "simulate_latent",
    "simulate_observations",
    "true_sigma",
    "truncation_stats",
    "truncation_threshold",
    "validate_spec",
]
