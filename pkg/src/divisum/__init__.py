"""Certified computation and exhaustive verification of explicit
divisor-sum bounds: partial sums of d4(n) and d(n)^2, their main-term
polynomials and error envelopes, the auxiliary sums S1/S2/S3, and the
quartic-field class-number bound, all carried in enclosure arithmetic."""

from divisum.class_bounds import (
    NumberFieldInput,
    class_bound_exact,
    class_bound_for_field,
    class_bound_formula,
    minkowski_bound,
)
from divisum.constants import ConstantsTable, build_constants_table
from divisum.enclosure import DEFAULT_PRECISION, Enclosure, working_precision
from divisum.formulas import (
    S1_approx,
    S1_exact,
    S2_approx,
    S2_exact,
    S3_approx,
    S3_exact,
    TheoremSpec,
    default_table,
    delta_of_x,
    envelope,
    main_term,
    main_term_d4,
    main_term_dsq,
    prior_bound,
    theorem_specs,
)
from divisum.kernels import (
    Kind,
    stream_summatory,
    summatory_d4_exact,
    summatory_d_exact,
    summatory_dsq_exact,
    tabulate,
)
from divisum.verifier import (
    ThresholdResult,
    VerificationReport,
    Violation,
    compare_prior_bounds,
    convolution_identity_check,
    find_threshold,
    fine_grid_audit,
    merge_reports,
    verify_delta_alpha,
    verify_envelope,
    verify_s1_constant,
    verify_s2_checkpoints,
)

__version__ = "0.1.0"

__all__ = [
    "ConstantsTable",
    "DEFAULT_PRECISION",
    "Enclosure",
    "Kind",
    "NumberFieldInput",
    "S1_approx",
    "S1_exact",
    "S2_approx",
    "S2_exact",
    "S3_approx",
    "S3_exact",
    "TheoremSpec",
    "ThresholdResult",
    "VerificationReport",
    "Violation",
    "__version__",
    "build_constants_table",
    "class_bound_exact",
    "class_bound_for_field",
    "class_bound_formula",
    "compare_prior_bounds",
    "convolution_identity_check",
    "default_table",
    "delta_of_x",
    "envelope",
    "find_threshold",
    "fine_grid_audit",
    "main_term",
    "main_term_d4",
    "main_term_dsq",
    "merge_reports",
    "minkowski_bound",
    "prior_bound",
    "stream_summatory",
    "summatory_d4_exact",
    "summatory_d_exact",
    "summatory_dsq_exact",
    "tabulate",
    "theorem_specs",
    "verify_delta_alpha",
    "verify_envelope",
    "verify_s1_constant",
    "verify_s2_checkpoints",
    "working_precision",
]
