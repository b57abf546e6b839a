"""Cauchy-Euler dynamic equations on finite isolated time scales."""

__version__ = "0.1.0"

from .cascade import CascadeResult, cascade_solve, first_order_solve, residual
from .errors import (
    ChronoscaleError,
    DegenerateCoefficient,
    EmptyScale,
    IndexOutOfRange,
    InvalidFamilyParameters,
    NonMonotonePoints,
    NotMonic,
    OverflowRisk,
    RegressivityViolation,
    RootFindingFailure,
    ValidationError,
    WindowTooSmall,
)
from .exponential import RegressivityCertificate, check_regressivity, exp_table, ts_exp
from .operator import (
    CauchyEulerProblem,
    apply_factored_operator,
    apply_M,
    apply_sum_operator,
    factorization_gap,
    roundoff_scale,
)
from .stability import (
    Perturbation,
    ScaleFamilySpec,
    StabilityReport,
    analytic_K,
    generate_scale,
    run_hus_experiment,
    stage_constant,
)
from .symmetric import alphas_to_lambdas, elementary_symmetric, lambdas_to_alphas
from .timescale import (
    GridFunction,
    TimeScale,
    delta_antiderivative,
    delta_derivative,
    delta_integral,
    forward_jump,
    make_time_scale,
)
