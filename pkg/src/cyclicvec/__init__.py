"""Cyclic vectors of self-adjoint operators with simple discrete spectrum.

Projection distances rho^2(e_k, span{f, Af, ..., A^{2n} f}) computed two
independent ways (K matrix and Gram matrix), diagonal bounds on them, and the
derivative-system application on L2(-pi, pi).
"""

__version__ = "0.1.0"

from .spectral_core import (  # noqa: E402
    AffineInteger,
    CoefficientSequence,
    CustomCoefficients,
    ExplicitTable,
    GeometricCoefficients,
    IntegerLine,
    LogSigned,
    MaskedCoefficients,
    PrecisionConfig,
    ScaledCoefficients,
    Spectrum,
    TableCoefficients,
    Window,
    logsigned_mul,
    logsigned_sum,
    spectrum_eval,
)
from .nodal_poly import NodalContext, eval_P, eval_Pdot_at_node, lagrange_weight  # noqa: E402
from .tail_series import TailSumResult, gram_entry_series, tail_sum_kij  # noqa: E402
from .cyclicity import (  # noqa: E402
    CriterionReport,
    KMatrix,
    analyze,
    build_K,
    condition1_holds,
    criterion_value,
    kantorovich_check,
    refined_bound,
    relabel_support,
    theorem2_bound,
)
from .gram_oracle import (  # noqa: E402
    GramSystem,
    build_gram,
    rho2_via_gram,
    rho2_via_gram_determinant,
    vandermonde_det,
    verify_B_factorization,
)
from .derivative_app import (  # noqa: E402
    ExpCosCoefficients,
    PeriodicFunctionSpec,
    ThresholdConstants,
    bump_noncyclicity_demo,
    expcos_coefficients,
    quadrature_coefficients,
    solve_c0,
    theorem3_check,
    theorem3_tail_quantity,
)
