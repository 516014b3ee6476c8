"""Eigenvalue iteration for y'' = L(x) y' + S(x) y, its continued-fraction
reformulation, and asymptotic classification of the underlying recurrences."""

from .aim import (
    AIMSequences,
    CoeffTable,
    ProblemSpec,
    Root,
    aim_iterate,
    aim_matrix_iterate,
    alpha_at,
    delta_n,
    find_eigenvalues,
)
from .analysis import (
    BirkhoffAdamsData,
    CaseLabel,
    ClassificationReport,
    ConvergenceReport,
    DoubleRootData,
    EqualExponentData,
    PincherleResult,
    Verdict,
    birkhoff_adams,
    bound_check,
    characteristic_roots,
    classify,
    miller_minimal_ratio,
    monic_transform,
    pincherle_check,
    ratio_growth_fit,
    stern_seidel,
)
from .cf import (
    CFState,
    PQSequences,
    aim_limit_terms,
    alpha_partial_sums,
    cf_approximants,
    cf_determinants,
    cf_equiv_unit,
    detect_termination,
    pq_iterate,
    terminated_alpha,
)
from .errors import (
    AimError,
    AimWarning,
    CenterMismatch,
    ConditioningWarning,
    DegenerateDeltaWarning,
    DegenerateDenominator,
    DepthRecheckWarning,
    DeterminantMismatchWarning,
    GridPointSkippedWarning,
    HypothesisViolated,
    IndexOutOfRange,
    InsufficientData,
    NoConvergence,
    NonPositiveP,
    OrderExhausted,
    Overflow,
    ParseOrEvalError,
    SingularPivot,
    ValidationError,
    ZeroB0,
    ZeroDenominator,
    ZeroP,
    ZeroPartialNumerator,
    ZeroQ,
)
from .reconstruct import (
    AlphaSeries,
    AlphaSource,
    build_solution,
    factorization_residual,
    ode_residual,
    riccati_residual,
)
from .series import (
    Expression,
    TaylorSeries,
    parse_expression,
    series_add,
    series_antideriv,
    series_diff,
    series_div,
    series_exp,
    series_from_expr,
    series_mul,
    series_sub,
)

__version__ = "0.1.0"

__all__ = [
    "AIMSequences",
    "AimError",
    "AimWarning",
    "AlphaSeries",
    "AlphaSource",
    "BirkhoffAdamsData",
    "CFState",
    "CaseLabel",
    "CenterMismatch",
    "ClassificationReport",
    "CoeffTable",
    "ConditioningWarning",
    "ConvergenceReport",
    "DegenerateDeltaWarning",
    "DegenerateDenominator",
    "DepthRecheckWarning",
    "DeterminantMismatchWarning",
    "DoubleRootData",
    "EqualExponentData",
    "Expression",
    "GridPointSkippedWarning",
    "HypothesisViolated",
    "IndexOutOfRange",
    "InsufficientData",
    "NoConvergence",
    "NonPositiveP",
    "OrderExhausted",
    "Overflow",
    "PQSequences",
    "ParseOrEvalError",
    "PincherleResult",
    "ProblemSpec",
    "Root",
    "SingularPivot",
    "TaylorSeries",
    "ValidationError",
    "Verdict",
    "ZeroB0",
    "ZeroDenominator",
    "ZeroP",
    "ZeroPartialNumerator",
    "ZeroQ",
    "aim_iterate",
    "aim_limit_terms",
    "aim_matrix_iterate",
    "alpha_at",
    "alpha_partial_sums",
    "birkhoff_adams",
    "bound_check",
    "build_solution",
    "cf_approximants",
    "cf_determinants",
    "cf_equiv_unit",
    "characteristic_roots",
    "classify",
    "delta_n",
    "detect_termination",
    "factorization_residual",
    "find_eigenvalues",
    "miller_minimal_ratio",
    "monic_transform",
    "ode_residual",
    "parse_expression",
    "pincherle_check",
    "pq_iterate",
    "ratio_growth_fit",
    "riccati_residual",
    "series_add",
    "series_antideriv",
    "series_diff",
    "series_div",
    "series_exp",
    "series_from_expr",
    "series_mul",
    "series_sub",
    "stern_seidel",
    "terminated_alpha",
]
