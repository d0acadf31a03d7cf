"""Time-fractional diffusion on (0,1) x (0,T) by Fourier-sine spectral decomposition.

The PDE D^alpha_t u - u_xx = f with homogeneous Dirichlet boundary data and
zero initial state decouples over the eigenpairs lambda_k = (k pi)^2,
X_k = sin(k pi x).  Each mode solves the scalar fractional initial value
problem D^alpha u_k + k^2 pi^2 u_k = f_k with u_k(0) = 0, handled by the
closed-form solver with lambda = -(k pi)^2.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import exprparse, ivp
from .abcalc import ABConfig, SampledFunction, abc_derivative
from .errors import DimensionMismatch, DomainError, GridError
from .specfun import DEFAULT_POLICY, EvalPolicy

__all__ = [
    "Forcing2D",
    "BVProblem",
    "ModalSolution",
    "Field2D",
    "ResidualSummary",
    "sine_coefficients",
    "solve_mode",
    "solve_all_modes",
    "assemble",
    "solve",
    "residual_report",
]

HYPOTHESIS_TOL = 1e-8


@dataclass(frozen=True)
class Forcing2D:
    """Source term f(x, t): a parsed expression in x and t, or a callable."""

    expression: exprparse.Expr | None = None
    fn: object = None

    @classmethod
    def from_expression(cls, source: str | exprparse.Expr) -> "Forcing2D":
        node = exprparse.parse(source) if isinstance(source, str) else source
        return cls(expression=node)

    @classmethod
    def from_callable(cls, fn) -> "Forcing2D":
        return cls(fn=fn)

    def __call__(self, x, t):
        if self.expression is not None:
            out = exprparse.evaluate(self.expression, t=t, x=x)
            shape = np.broadcast_shapes(np.shape(x), np.shape(t))
            if shape and np.ndim(out) == 0:
                out = np.full(shape, float(out))
            return out
        return self.fn(x, t)

    def grid(self, x: np.ndarray, t: np.ndarray) -> np.ndarray:
        """Values on the tensor grid, shape (len(x), len(t))."""
        out = self(np.asarray(x)[:, None], np.asarray(t)[None, :])
        return np.broadcast_to(np.asarray(out, dtype=float), (len(x), len(t))).copy()


@dataclass(frozen=True)
class BVProblem:
    """Diffusion problem data on (0,1) x (0,T).

    nx counts spatial quadrature/evaluation points (forced odd for composite
    Simpson), nt counts time steps (nt + 1 samples).
    """

    forcing: Forcing2D
    horizon: float
    cfg: ABConfig
    k_max: int = 32
    nx: int = 101
    nt: int = 400

    def __post_init__(self):
        if not self.horizon > 0.0:
            raise DomainError(f"horizon must be positive, got {self.horizon!r}")
        if self.k_max < 1:
            raise DomainError(f"k_max must be >= 1, got {self.k_max}")
        if self.nx % 2 == 0:
            object.__setattr__(self, "nx", self.nx + 1)  # Simpson needs odd points
        if self.nx < 2 * self.k_max + 1:
            raise GridError(
                f"nx={self.nx} cannot resolve mode k_max={self.k_max}; "
                f"need nx >= {2 * self.k_max + 1}"
            )
        if self.nt < 2:
            raise GridError(f"nt must be >= 2, got {self.nt}")

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.nx)

    @property
    def t(self) -> np.ndarray:
        return (self.horizon / self.nt) * np.arange(self.nt + 1)

    def hypothesis_check(self, tol: float = HYPOTHESIS_TOL) -> dict:
        """Numerically spot-check the sufficient conditions f(x,0)=0 and
        f(0,t)=f(1,t)=0; violations void the uniqueness guarantee but do not
        stop the solver."""
        x, t = self.x, self.t
        initial = float(np.max(np.abs(self.forcing(x, np.zeros_like(x)))))
        left = float(np.max(np.abs(self.forcing(np.zeros_like(t), t))))
        right = float(np.max(np.abs(self.forcing(np.ones_like(t), t))))
        return {
            "initial_ok": initial <= tol,
            "boundary_ok": max(left, right) <= tol,
            "max_initial": initial,
            "max_boundary": max(left, right),
            "tol": tol,
        }


@dataclass(frozen=True)
class ModalSolution:
    """One sine mode: eigenvalue (k pi)^2, modal forcing f_k and solution u_k."""

    k: int
    lambda_k: float
    f_k: SampledFunction
    u_k: SampledFunction


@dataclass
class Field2D:
    """Solution values on the tensor grid, row-major over (x, t)."""

    nx: int
    nt: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.nx <= 0 or self.nt <= 0:
            raise DimensionMismatch("grid dimensions must be positive")
        if self.values.shape != (self.nx, self.nt):
            raise DimensionMismatch(
                f"values shape {self.values.shape} != ({self.nx}, {self.nt})"
            )


@dataclass(frozen=True)
class ResidualSummary:
    """Max-norm residuals of the assembled field against the problem data."""

    boundary_residual: float
    initial_residual: float
    pde_residual: float
    forcing_scale: float
    hypothesis: dict = field(default_factory=dict, compare=False)


def _simpson_weights(nx: int) -> np.ndarray:
    h = 1.0 / (nx - 1)
    w = np.ones(nx)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (h / 3.0)


def sine_coefficients(
    p: BVProblem, k: int, forcing_grid: np.ndarray | None = None
) -> SampledFunction:
    """f_k(t) = 2 int_0^1 f(x,t) sin(k pi x) dx by composite Simpson in x."""
    if not 1 <= k <= p.k_max:
        raise DomainError(f"mode index {k} outside 1..{p.k_max}")
    x = p.x
    fgrid = p.forcing.grid(x, p.t) if forcing_grid is None else forcing_grid
    if fgrid.shape != (p.nx, p.nt + 1):
        raise DimensionMismatch("forcing grid does not match the problem grid")
    weights = _simpson_weights(p.nx) * np.sin(k * math.pi * x)
    vals = 2.0 * weights @ fgrid
    return SampledFunction(0.0, p.horizon / p.nt, vals)


def solve_mode(
    p: BVProblem,
    k: int,
    policy: EvalPolicy | None = None,
    forcing_grid: np.ndarray | None = None,
) -> ModalSolution:
    """Solve the k-th modal problem with lambda = -(k pi)^2 and u0 = 0."""
    f_k = sine_coefficients(p, k, forcing_grid)
    lam = -((k * math.pi) ** 2)
    problem = ivp.IVProblem(p.cfg, lam, 0.0, ivp.Forcing.from_samples(f_k), p.horizon)
    u_k = ivp.solve_closed_form(problem, p.nt, policy)
    return ModalSolution(k=k, lambda_k=(k * math.pi) ** 2, f_k=f_k, u_k=u_k)


def solve_all_modes(
    p: BVProblem, policy: EvalPolicy | None = None, jobs: int = 1
) -> list[ModalSolution]:
    """Modes 1..k_max; independent, so they may run concurrently."""
    fgrid = p.forcing.grid(p.x, p.t)
    ks = range(1, p.k_max + 1)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(lambda k: solve_mode(p, k, policy, fgrid), ks))
    return [solve_mode(p, k, policy, fgrid) for k in ks]


def assemble(modes, p: BVProblem) -> Field2D:
    """u(x_i, t_j) = sum_k u_k(t_j) sin(k pi x_i), summed in fixed order k=1..k_max."""
    modes = list(modes)
    if [m.k for m in modes] != list(range(1, p.k_max + 1)):
        raise DimensionMismatch("modes must cover k = 1..k_max in order")
    nt_samples = p.nt + 1
    x = p.x
    total = np.zeros((p.nx, nt_samples))
    for m in modes:
        if m.u_k.values.size != nt_samples:
            raise DimensionMismatch(f"mode {m.k} has a mismatched time grid")
        total += np.outer(np.sin(m.k * math.pi * x), m.u_k.values)
    return Field2D(nx=p.nx, nt=nt_samples, values=total)


def solve(p: BVProblem, policy: EvalPolicy | None = None, jobs: int = 1) -> Field2D:
    return assemble(solve_all_modes(p, policy, jobs), p)


def residual_report(
    u: Field2D, p: BVProblem, policy: EvalPolicy | None = None
) -> ResidualSummary:
    """Measure how well an assembled field satisfies the problem.

    Boundary and initial traces are max norms; the interior residual
    |D^alpha_t u - u_xx - f| is evaluated with the Mittag-Leffler-kernel
    derivative per x-line and central differences in x, on the window
    [0.1, 0.9] x [0.1 T, T], normalized by max|f| there.
    """
    if u.nx < 5:
        raise GridError("need nx >= 5 for the interior residual stencil")
    if u.nt < 101:
        raise GridError("need nt >= 100 time steps for the interior residual")
    pol = policy or DEFAULT_POLICY
    x, t = p.x, p.t
    if u.values.shape != (x.size, t.size):
        raise DimensionMismatch("field does not match the problem grid")
    vals = u.values
    boundary = float(max(np.max(np.abs(vals[0, :])), np.max(np.abs(vals[-1, :]))))
    initial = float(np.max(np.abs(vals[:, 0])))

    dx = x[1] - x[0]
    dt = p.horizon / p.nt
    ix = np.where((x >= 0.1 - 1e-12) & (x <= 0.9 + 1e-12))[0]
    ix = ix[(ix > 0) & (ix < x.size - 1)]
    jt = np.where(t >= 0.1 * p.horizon - 1e-12)[0]
    jt = jt[jt > 0]
    fgrid = p.forcing.grid(x, t)
    scale = float(np.max(np.abs(fgrid[np.ix_(ix, jt)])))
    if scale == 0.0:
        scale = 1.0
    worst = 0.0
    for i in ix:
        line = SampledFunction(0.0, dt, vals[i, :])
        d_line = abc_derivative(line, p.cfg, pol).values
        uxx = (vals[i + 1, :] - 2.0 * vals[i, :] + vals[i - 1, :]) / dx**2
        resid = d_line - uxx - fgrid[i, :]
        worst = max(worst, float(np.max(np.abs(resid[jt]))))
    return ResidualSummary(
        boundary_residual=boundary,
        initial_residual=initial,
        pde_residual=worst / scale,
        forcing_scale=scale,
        hypothesis=p.hypothesis_check(),
    )
