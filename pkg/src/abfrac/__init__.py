"""Numerical tools for fractional calculus with non-singular Mittag-Leffler and
exponential kernels: special functions, product-integration operators, explicit
and iterative solvers for the associated initial value problem, and a spectral
solver for the time-fractional diffusion equation."""

from .abcalc import (
    ABConfig,
    SampledFunction,
    ab_integral,
    abc_derivative,
    cf_derivative,
    normalization,
)
from .bvp import BVProblem, Field2D, Forcing2D, ModalSolution, ResidualSummary
from .errors import (
    AbfracError,
    DimensionMismatch,
    DomainError,
    EvalError,
    ExprSyntaxError,
    GridError,
    NoConvergence,
    NonConvergence,
    PoleError,
    RangeError,
    SingularParameter,
    TailError,
    UnknownIdentifier,
)
from .ivp import (
    Forcing,
    IVProblem,
    LaplaceProbe,
    ResolventContext,
    laplace_image,
    laplace_probe,
    numeric_laplace,
    picard_solve,
    resolvent_kernel,
    resolvent_sum_closed,
    resolvent_sum_partial,
    rhs_hat,
    solve_closed_form,
)
from .specfun import DEFAULT_POLICY, EvalPolicy, MLArgs, gamma, ml, ml1, ml2, ml3
from .specfun import ml_kernel_derivative

__version__ = "0.1.0"

__all__ = [
    "ABConfig",
    "SampledFunction",
    "ab_integral",
    "abc_derivative",
    "cf_derivative",
    "normalization",
    "BVProblem",
    "Field2D",
    "Forcing2D",
    "ModalSolution",
    "ResidualSummary",
    "Forcing",
    "IVProblem",
    "LaplaceProbe",
    "ResolventContext",
    "laplace_image",
    "laplace_probe",
    "numeric_laplace",
    "picard_solve",
    "resolvent_kernel",
    "resolvent_sum_closed",
    "resolvent_sum_partial",
    "rhs_hat",
    "solve_closed_form",
    "DEFAULT_POLICY",
    "EvalPolicy",
    "MLArgs",
    "gamma",
    "ml",
    "ml1",
    "ml2",
    "ml3",
    "ml_kernel_derivative",
    "AbfracError",
    "DimensionMismatch",
    "DomainError",
    "EvalError",
    "ExprSyntaxError",
    "GridError",
    "NoConvergence",
    "NonConvergence",
    "PoleError",
    "RangeError",
    "SingularParameter",
    "TailError",
    "UnknownIdentifier",
]
