"""Sequential compressed sensing: incremental decoding, stopping rules, and
holdout error certificates."""

from ._core import (
    BpdnReport,
    CtMomentReport,
    ErrorCertificate,
    IterationCounts,
    MomentReport,
    SequentialBasisPursuit,
    SessionResult,
    Sin2Identities,
    SolveReport,
    TraceRow,
    affine_distance,
    basis_pursuit,
    bpdn,
    certify_chebyshev,
    chebyshev_bound,
    chi2_cdf,
    chi2_interval,
    chi2_pdf,
    chi2_quantile,
    ct_mean_bound,
    ct_mean_estimate,
    ct_var_bound,
    exact_sparse_signal,
    jl_style_estimate,
    lambda_schedule,
    measurement_matrix,
    min_norm_solution,
    mutual_coherence,
    omp,
    power_law_signal,
    run_session,
    sample_ct,
    sin_theta_point_estimate,
    verify_sin2_identities,
    version,
)

__version__ = version()

__all__ = [
    "BpdnReport",
    "CtMomentReport",
    "ErrorCertificate",
    "IterationCounts",
    "MomentReport",
    "SequentialBasisPursuit",
    "SessionResult",
    "Sin2Identities",
    "SolveReport",
    "TraceRow",
    "affine_distance",
    "basis_pursuit",
    "bpdn",
    "certify_chebyshev",
    "chebyshev_bound",
    "chi2_cdf",
    "chi2_interval",
    "chi2_pdf",
    "chi2_quantile",
    "ct_mean_bound",
    "ct_mean_estimate",
    "ct_var_bound",
    "exact_sparse_signal",
    "jl_style_estimate",
    "lambda_schedule",
    "measurement_matrix",
    "min_norm_solution",
    "mutual_coherence",
    "omp",
    "power_law_signal",
    "run_session",
    "sample_ct",
    "sin_theta_point_estimate",
    "verify_sin2_identities",
    "version",
]
