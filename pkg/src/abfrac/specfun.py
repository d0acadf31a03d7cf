"""Gamma and Mittag-Leffler functions (one-, two- and three-parameter) on the real line.

Evaluation is real-valued only.  Three regimes are used per argument:

* plain power series in double precision, summed with ``math.fsum``, when the
  alternation of the series cannot eat more significant digits than the
  requested absolute tolerance allows;
* for strongly negative arguments with ``delta == 1`` and ``0 < alpha < 1``,
  the global integral representation over the spectral density (the kernel
  ``chi^((1-beta)/alpha) exp(-chi^(1/alpha)) (...) / (chi^2 - 2 chi z cos(pi
  alpha) + z^2)``), after shifting ``beta`` into ``(0, 1]`` via the recurrence
  ``E_{a,b+a}(z) = (E_{a,b}(z) - 1/Gamma(b)) / z``;
* adaptive-precision series in ``mpmath`` for the remaining cold cases
  (``alpha >= 1`` or ``delta != 1`` with severe cancellation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.integrate import quad

from .errors import DomainError, NonConvergence

__all__ = [
    "EvalPolicy",
    "MLArgs",
    "DEFAULT_POLICY",
    "gamma",
    "ml",
    "ml1",
    "ml2",
    "ml3",
    "ml_kernel_derivative",
]

# Lanczos approximation, g = 7, 9 coefficients.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_GAMMA_OVERFLOW = 171.62437695630272  # Gamma(x) > DBL_MAX beyond this


def _lanczos_positive(x):
    """Lanczos gamma for x >= 0.5 (scalar float)."""
    y = x - 1.0
    acc = _LANCZOS[0]
    for i in range(1, 9):
        acc += _LANCZOS[i] / (y + i)
    t = y + _LANCZOS_G + 0.5
    if x < 140.0:
        return math.sqrt(2.0 * math.pi) * t ** (y + 0.5) * math.exp(-t) * acc
    # split the power so t^(y+1/2) e^(-t) never overflows on its own
    half = t ** (0.5 * (y + 0.5)) * math.exp(-0.5 * t)
    return math.sqrt(2.0 * math.pi) * half * half * acc


def gamma(x):
    """Euler Gamma via the Lanczos approximation (relative error below 1e-13).

    Accepts a scalar or a numpy array.  Raises DomainError at non-positive
    integers and where the result overflows.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        return _gamma_scalar(float(arr))
    out = np.empty_like(arr)
    flat = arr.ravel()
    res = out.ravel()
    for i, v in enumerate(flat):
        res[i] = _gamma_scalar(float(v))
    return out


def _sinpi(x):
    """sin(pi x) with exact argument reduction to the nearest integer."""
    n = round(x)
    s = math.sin(math.pi * (x - n))
    return s if n % 2 == 0 else -s


def _gamma_scalar(x):
    if math.isnan(x):
        raise DomainError("gamma of NaN")
    if x >= 0.5:
        if x > _GAMMA_OVERFLOW:
            raise DomainError(f"gamma({x!r}) overflows double precision")
        if x <= 22.0 and x == math.floor(x):
            return float(math.factorial(int(x) - 1))
        return _lanczos_positive(x)
    if x == math.floor(x):
        raise DomainError(f"gamma pole at non-positive integer {x!r}")
    # reflection: Gamma(x) = pi / (sin(pi x) Gamma(1 - x))
    return math.pi / (_sinpi(x) * _lanczos_positive(1.0 - x))


def _gamma_ratio(a, alpha):
    """Gamma(a) / Gamma(a + alpha) without overflow."""
    if alpha == 1.0:
        return 1.0 / a
    if alpha == 2.0:
        return 1.0 / (a * (a + 1.0))
    if a + alpha <= 170.0:
        return _gamma_scalar(a) / _gamma_scalar(a + alpha)
    return math.exp(math.lgamma(a) - math.lgamma(a + alpha))


@dataclass(frozen=True)
class EvalPolicy:
    """Accuracy knobs for Mittag-Leffler evaluation.

    abs_tol is the target absolute error, max_terms caps any series, and
    series_radius is the |z| threshold below which the pure power series is
    preferred (negative arguments may still be rerouted when the series
    would cancel away more digits than abs_tol permits).
    """

    abs_tol: float = 1e-12
    max_terms: int = 10_000
    series_radius: float = 15.0

    def __post_init__(self):
        if not self.abs_tol > 0.0:
            raise DomainError("abs_tol must be positive")
        if self.max_terms < 50:
            raise DomainError("max_terms must be at least 50")
        if not self.series_radius > 0.0:
            raise DomainError("series_radius must be positive")


DEFAULT_POLICY = EvalPolicy()


@dataclass(frozen=True)
class MLArgs:
    """Parameter triple (alpha, beta, delta) plus argument z.

    delta = 1 denotes the two-parameter function, delta = beta = 1 the
    one-parameter function.
    """

    alpha: float
    beta: float = 1.0
    delta: float = 1.0
    z: float = 0.0

    def __post_init__(self):
        _validate_params(self.alpha, self.beta, self.delta)
        _reject_complex(self.z)


def _validate_params(alpha, beta, delta):
    for name, v in (("alpha", alpha), ("beta", beta), ("delta", delta)):
        _reject_complex(v)
        if not v > 0.0:
            raise DomainError(f"{name} must be positive, got {v!r}")
    if alpha > 2.0:
        raise DomainError(f"alpha must not exceed 2, got {alpha!r}")


def _reject_complex(v):
    if isinstance(v, complex):
        raise DomainError("complex arguments are not supported")
    if not math.isfinite(v):
        raise DomainError(f"argument must be finite, got {v!r}")


def _cancellation_nats(alpha, beta, delta, z):
    """ln(largest series term magnitude) for z < 0: the digits the alternating
    series cancels away.  Scanned directly from the log-term formula so it is
    valid for any delta (Pochhammer growth can dominate |z|^(1/alpha))."""
    logz = math.log(abs(z))
    lg_delta = math.lgamma(delta)

    def log_term(n):
        return (
            math.lgamma(delta + n)
            - lg_delta
            - math.lgamma(n + 1.0)
            + n * logz
            - math.lgamma(alpha * n + beta)
        )

    peak = 0.0
    n = 1
    while n < 10_000_000:
        peak = max(peak, log_term(n))
        n = max(n + 1, int(n * 1.3))
        # terms decay once the Gamma factor outruns growth; stop well past it
        if alpha * n + beta > 4.0 * (abs(z) ** (1.0 / alpha) + delta * abs(logz) + 10.0):
            break
    return peak


def _series_budget_nats(policy):
    """Largest cancellation (in nats) the double series can absorb at abs_tol."""
    return max(3.0, min(25.0, math.log(policy.abs_tol) + 31.0))


def _series_double(alpha, beta, delta, z, policy):
    """Power series in double precision with compensated (exact) summation."""
    term = 1.0 / _gamma_scalar(beta)
    terms = [term]
    tol = 0.02 * policy.abs_tol
    prev = abs(term)
    for k in range(policy.max_terms):
        a = alpha * k + beta
        term *= z * ((delta + k) / (k + 1.0)) * _gamma_ratio(a, alpha)
        if not math.isfinite(term):
            raise NonConvergence(
                f"series term overflow at k={k + 1} for E^{delta}_{alpha},{beta}({z})"
            )
        terms.append(term)
        mag = abs(term)
        if k >= 3 and mag <= tol and mag < 0.7 * max(prev, 1e-300):
            return math.fsum(terms)
        prev = mag
    raise NonConvergence(
        f"series did not reach abs_tol={policy.abs_tol} within {policy.max_terms} terms"
    )


def _series_mp(alpha, beta, delta, z, policy, nats):
    """Arbitrary-precision series for cancellation-heavy arguments."""
    dps = 30 + int(1.15 * nats / math.log(10.0))
    if dps > 600:
        raise NonConvergence(
            f"cancellation of ~{nats / math.log(10.0):.0f} digits exceeds the "
            "extended-precision budget"
        )
    past_peak = 1.2 * nats / alpha + 10.0
    with mpmath.workdps(dps):
        a = mpmath.mpf(alpha)
        b = mpmath.mpf(beta)
        d = mpmath.mpf(delta)
        zz = mpmath.mpf(z)
        total = mpmath.mpf(0)
        poch = mpmath.mpf(1)
        zpow = mpmath.mpf(1)
        fact = mpmath.mpf(1)
        cutoff = mpmath.mpf(10) ** (-(dps - 3))
        for n in range(policy.max_terms):
            term = poch * zpow * mpmath.rgamma(a * n + b) / fact
            total += term
            if n > past_peak and abs(term) < cutoff * max(1, abs(total)):
                return float(total)
            poch *= d + n
            zpow *= zz
            fact *= n + 1
    raise NonConvergence(
        f"extended-precision series needed more than {policy.max_terms} terms"
    )


def _gll_integral(alpha, beta, z, policy):
    """Integral representation of E_{alpha,beta}(z) for z < 0, 0 < alpha < 1.

    Requires beta in (0, 1]; callers shift beta down first.  The integrand is
    smooth and positive-decaying; the only structure is a possible bump where
    the rational factor peaks, which is handed to the quadrature as a
    breakpoint.
    """
    inv_alpha = 1.0 / alpha
    s1 = math.sin(math.pi * (1.0 - beta))
    s2 = math.sin(math.pi * (1.0 - beta + alpha))
    c = math.cos(math.pi * alpha)
    norm = 1.0 / (math.pi * alpha)
    pw = (1.0 - beta) / alpha

    def integrand(chi):
        num = chi * s1 - z * s2
        den = chi * chi - 2.0 * chi * z * c + z * z
        return norm * chi**pw * math.exp(-(chi**inv_alpha)) * num / den

    upper = 708.0**alpha
    points = [p for p in (1.0, z * c) if 0.0 < p < upper]
    val, err = quad(
        integrand,
        0.0,
        upper,
        points=sorted(set(points)) or None,
        limit=500,
        epsabs=min(0.1 * policy.abs_tol, 1e-13),
        epsrel=1e-12,
    )
    if err > 0.5 * max(policy.abs_tol, 1e-13):
        raise NonConvergence(
            f"integral branch error estimate {err:.2e} exceeds abs_tol={policy.abs_tol}"
        )
    return val


def _ml2_negative_large(alpha, beta, z, policy):
    """Strongly negative argument, delta = 1: shift beta into (0,1], integrate, chain up."""
    m = 0
    b0 = beta
    if beta > 1.0:
        m = math.ceil((beta - 1.0) / alpha - 1e-12)
        b0 = beta - m * alpha
        if b0 > 1.0 + 1e-12:
            m += 1
            b0 = beta - m * alpha
    val = _gll_integral(alpha, b0, z, policy)
    for j in range(m):
        val = (val - 1.0 / _gamma_scalar(b0 + j * alpha)) / z
    return val


def ml(args: MLArgs, policy: EvalPolicy | None = None) -> float:
    """Evaluate E^delta_{alpha,beta}(z) for an MLArgs record."""
    return ml3(args.alpha, args.beta, args.delta, args.z, policy)


def ml1(alpha: float, z: float, policy: EvalPolicy | None = None) -> float:
    """One-parameter Mittag-Leffler function E_alpha(z)."""
    return ml2(alpha, 1.0, z, policy)


def ml2(alpha: float, beta: float, z: float, policy: EvalPolicy | None = None) -> float:
    """Two-parameter Mittag-Leffler function E_{alpha,beta}(z)."""
    _validate_params(alpha, beta, 1.0)
    _reject_complex(z)
    p = policy or DEFAULT_POLICY
    if z == 0.0:
        return 1.0 / _gamma_scalar(beta)
    if z > 0.0:
        return _series_double(alpha, beta, 1.0, z, p)
    nats = _cancellation_nats(alpha, beta, 1.0, z)
    if abs(z) <= p.series_radius and nats <= _series_budget_nats(p):
        return _series_double(alpha, beta, 1.0, z, p)
    if alpha < 1.0:
        return _ml2_negative_large(alpha, beta, z, p)
    return _series_mp(alpha, beta, 1.0, z, p, nats)


def ml3(
    alpha: float,
    beta: float,
    delta: float,
    z: float,
    policy: EvalPolicy | None = None,
) -> float:
    """Three-parameter (Prabhakar) function E^delta_{alpha,beta}(z).

    Pochhammer weights are built by the recurrence (delta)_{n+1} =
    (delta)_n (delta + n), never by Gamma quotients.
    """
    _validate_params(alpha, beta, delta)
    _reject_complex(z)
    p = policy or DEFAULT_POLICY
    if delta == 1.0:
        return ml2(alpha, beta, z, p)
    if z == 0.0:
        return 1.0 / _gamma_scalar(beta)
    if z > 0.0:
        return _series_double(alpha, beta, delta, z, p)
    nats = _cancellation_nats(alpha, beta, delta, z)
    if nats <= _series_budget_nats(p):
        return _series_double(alpha, beta, delta, z, p)
    return _series_mp(alpha, beta, delta, z, p, nats)


def ml_kernel_derivative(
    alpha: float, w: float, t: float, policy: EvalPolicy | None = None
) -> float:
    """d/dt E_alpha(w t^alpha) = w t^(alpha-1) E_{alpha,alpha}(w t^alpha).

    Singular like t^(alpha-1) at t = 0, hence t must be strictly positive.
    """
    if not t > 0.0:
        raise DomainError(f"kernel derivative needs t > 0, got t={t!r}")
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"kernel derivative needs alpha in (0, 1], got {alpha!r}")
    return w * t ** (alpha - 1.0) * ml2(alpha, alpha, w * t**alpha, policy)


def _ml_series_grid(alpha, beta, delta, zs, policy):
    """Vectorized double-precision series over an array of arguments.

    All elements must already be certified series-safe by the caller.  The
    term ratio Gamma(a_k)/Gamma(a_k + alpha) is shared across elements, so
    the sweep costs one scalar gamma pair per series term.
    """
    zs = np.asarray(zs, dtype=float)
    total = np.full(zs.shape, 1.0 / _gamma_scalar(beta))
    term = total.copy()
    tol = 0.02 * policy.abs_tol
    # do not stop inside the growth phase of the largest argument
    kmin = 3.0 + 1.3 * np.max(np.abs(zs)) ** (1.0 / alpha) / alpha
    for k in range(policy.max_terms):
        a = alpha * k + beta
        term *= zs * ((delta + k) / (k + 1.0)) * _gamma_ratio(a, alpha)
        total += term
        mag = np.max(np.abs(term))
        if not math.isfinite(mag):
            raise NonConvergence("series term overflow in grid evaluation")
        if k >= kmin and mag <= tol:
            return total
    raise NonConvergence(
        f"grid series did not converge within {policy.max_terms} terms"
    )


def ml_grid(alpha, beta, delta, zs, policy=None):
    """E^delta_{alpha,beta} over an array of real arguments.

    Splits the array into a series-safe batch (vectorized) and the rest
    (evaluated pointwise through the scalar branches).  Used by the
    product-integration mass builders, where the arguments are the kernel
    values on every distinct grid gap.
    """
    p = policy or DEFAULT_POLICY
    _validate_params(alpha, beta, delta)
    zs = np.asarray(zs, dtype=float)
    out = np.empty(zs.shape)
    budget = _series_budget_nats(p)
    neg = zs < 0.0
    # cancellation grows with |z|; find the largest magnitude the series absorbs
    z_floor = 0.0
    if neg.any():
        zmax = float(np.max(np.abs(zs[neg])))
        if _cancellation_nats(alpha, beta, delta, -zmax) <= budget:
            z_floor = zmax
        else:
            lo, hi = 0.0, zmax
            for _ in range(40):
                mid = 0.5 * (lo + hi)
                if mid == 0.0 or _cancellation_nats(alpha, beta, delta, -mid) <= budget:
                    lo = mid
                else:
                    hi = mid
            z_floor = lo
    safe = ~neg | ((np.abs(zs) <= min(p.series_radius, z_floor)))
    zero = zs == 0.0
    safe &= ~zero
    if zero.any():
        out[zero] = 1.0 / _gamma_scalar(beta)
    if safe.any():
        out[safe] = _ml_series_grid(alpha, beta, delta, zs[safe], p)
    rest = ~safe & ~zero
    if rest.any():
        fn = (lambda z: ml2(alpha, beta, z, p)) if delta == 1.0 else (
            lambda z: ml3(alpha, beta, delta, z, p)
        )
        out[rest] = [fn(float(z)) for z in zs[rest]]
    return out
