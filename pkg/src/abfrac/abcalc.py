"""Caputo-Fabrizio derivative, Mittag-Leffler-kernel derivative and the associated
fractional integral, applied to uniformly sampled functions by product integration.

Each operator integrates a piecewise-linear model of the data against the
exact subinterval mass of its kernel:

* exponential kernel: closed-form exponential moments (negative exponents
  only, so nothing overflows as alpha approaches 1);
* Mittag-Leffler kernel: subinterval masses from the antiderivative
  ``int_0^X E_a(w s^a) ds = X E_{a,2}(w X^a)``;
* weakly singular power kernel: closed-form moments of ``(t-s)^(a-1)``.

All convolutions are direct O(N^2) sums over the uniform grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import specfun
from .errors import DomainError, GridError
from .specfun import DEFAULT_POLICY, EvalPolicy

__all__ = [
    "ABConfig",
    "SampledFunction",
    "normalization",
    "abc_derivative",
    "cf_derivative",
    "ab_integral",
]


def normalization(alpha: float, kind: str = "one") -> float:
    """Normalization value B(alpha); both families satisfy B(0) = B(1) = 1."""
    if kind == "one":
        return 1.0
    if kind == "ab_family":
        return 1.0 - alpha + alpha / specfun.gamma(alpha)
    raise DomainError(f"unknown normalization family {kind!r}")


@dataclass(frozen=True)
class ABConfig:
    """Fractional order alpha in (0, 1) and normalization value B(alpha) > 0."""

    alpha: float
    b_of_alpha: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if not self.b_of_alpha > 0.0:
            raise DomainError(f"B(alpha) must be positive, got {self.b_of_alpha!r}")


@dataclass
class SampledFunction:
    """Uniform time grid t0 + i*dt with sample values.

    derivative_values, when present, holds samples of f' on the same grid.
    meta carries solver diagnostics (iteration counts, compatibility jumps).
    """

    t0: float
    dt: float
    values: np.ndarray
    derivative_values: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if not self.dt > 0.0:
            raise GridError(f"dt must be positive, got {self.dt!r}")
        if self.values.ndim != 1 or self.values.size == 0:
            raise GridError("values must be a non-empty 1-d sequence")
        if self.derivative_values is not None:
            self.derivative_values = np.asarray(self.derivative_values, dtype=float)
            if self.derivative_values.shape != self.values.shape:
                raise GridError("derivative_values must match values in length")

    def __len__(self):
        return self.values.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.values.size)

    @classmethod
    def from_callable(cls, fn, t0, dt, n, dfn=None):
        t = t0 + dt * np.arange(n)
        d = None if dfn is None else np.asarray([dfn(v) for v in t], dtype=float)
        return cls(t0, dt, np.asarray([fn(v) for v in t], dtype=float), d)


def reconstruct_derivative(f: SampledFunction) -> np.ndarray:
    """Second-order finite differences: central interior, one-sided at the ends."""
    v = f.values
    if v.size < 3:
        raise GridError("need at least 3 samples to reconstruct the derivative")
    d = np.empty_like(v)
    d[1:-1] = (v[2:] - v[:-2]) / (2.0 * f.dt)
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * f.dt)
    d[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * f.dt)
    return d


def _check_grid(f: SampledFunction, min_samples=2):
    if not f.dt > 0.0:
        raise GridError("dt must be positive")
    if f.values.size < min_samples:
        raise GridError(f"need at least {min_samples} samples, got {f.values.size}")
    if f.t0 != 0.0:
        raise GridError(f"operators integrate from 0; grid must start at t0=0, got {f.t0!r}")


def _derivative_samples(f: SampledFunction) -> np.ndarray:
    if f.derivative_values is not None:
        return f.derivative_values
    return reconstruct_derivative(f)


@lru_cache(maxsize=64)
def _ml_kernel_masses(alpha, w, dt, n, policy):
    """H[m] = int of E_alpha(w (t-s)^alpha) over the m-th subinterval gap, m=1..n-1."""
    gaps = dt * np.arange(n)
    anti = gaps * specfun.ml_grid(alpha, 2.0, 1.0, w * gaps**alpha, policy)
    h = np.diff(anti)
    h.setflags(write=False)
    return h


@lru_cache(maxsize=64)
def _power_kernel_moments(alpha, dt, n):
    """Exact moments of (t-s)^(alpha-1) per subinterval gap.

    M0[m] = int tau^(a-1) dtau over [(m-1)dt, m dt], and M1loc[m] is the
    moment of (offset from the left node), i.e. int (m dt - tau) tau^(a-1).
    """
    gaps = dt * np.arange(n)
    pa = gaps**alpha
    pa1 = gaps ** (alpha + 1.0)
    m0 = np.diff(pa) / alpha
    q = np.diff(pa1) / (alpha + 1.0)
    m1loc = (dt * np.arange(1, n)) * m0 - q
    m0.setflags(write=False)
    m1loc.setflags(write=False)
    return m0, m1loc


def _causal_convolve(kernel, signal, n):
    """out[i] = sum_{j<i} kernel[i-j] signal[j]; kernel indexed from gap 1."""
    out = np.zeros(n)
    out[1:] = np.convolve(signal, kernel)[: n - 1]
    return out


def abc_derivative(
    f: SampledFunction, cfg: ABConfig, policy: EvalPolicy | None = None
) -> SampledFunction:
    """Fractional derivative with Mittag-Leffler kernel E_a(-a/(1-a) (t-s)^a).

    Integrates f' (given, or reconstructed by finite differences) against the
    exact per-subinterval kernel mass; the output at t=0 is exactly 0.
    """
    _check_grid(f)
    p = policy or DEFAULT_POLICY
    alpha, bval = cfg.alpha, cfg.b_of_alpha
    n = f.values.size
    fp = _derivative_samples(f)
    w = -alpha / (1.0 - alpha)
    masses = _ml_kernel_masses(alpha, w, f.dt, n, p)
    avg = 0.5 * (fp[:-1] + fp[1:])
    out = (bval / (1.0 - alpha)) * _causal_convolve(masses, avg, n)
    out[0] = 0.0
    return SampledFunction(0.0, f.dt, out)


def cf_derivative(
    f: SampledFunction, cfg: ABConfig, policy: EvalPolicy | None = None
) -> SampledFunction:
    """Fractional derivative with exponential kernel exp(-a/(1-a) (t-s)).

    The exponential is integrated exactly per subinterval against the
    piecewise-linear derivative.
    """
    _check_grid(f)
    alpha, bval = cfg.alpha, cfg.b_of_alpha
    n = f.values.size
    fp = _derivative_samples(f)
    a = alpha / (1.0 - alpha)
    dt = f.dt
    gaps = dt * np.arange(n)
    decay = np.exp(-a * gaps)
    i0 = (decay[:-1] - decay[1:]) / a
    i1 = (dt * decay[:-1] - i0) / a
    slope = (fp[1:] - fp[:-1]) / dt
    out = (bval / (1.0 - alpha)) * (
        _causal_convolve(i0, fp[:-1], n) + _causal_convolve(i1, slope, n)
    )
    out[0] = 0.0
    return SampledFunction(0.0, f.dt, out)


def ab_integral(
    f: SampledFunction, cfg: ABConfig, policy: EvalPolicy | None = None
) -> SampledFunction:
    """Fractional integral ((1-a)/B) f + (a/(B Gamma(a))) int f (t-s)^(a-1) ds.

    The weakly singular convolution uses exact moments of (t-s)^(a-1)
    against piecewise-linear f.
    """
    _check_grid(f)
    alpha, bval = cfg.alpha, cfg.b_of_alpha
    n = f.values.size
    v = f.values
    m0, m1loc = _power_kernel_moments(alpha, f.dt, n)
    slope = (v[1:] - v[:-1]) / f.dt
    conv = _causal_convolve(m0, v[:-1], n) + _causal_convolve(m1loc, slope, n)
    out = ((1.0 - alpha) / bval) * v + (alpha / (bval * specfun.gamma(alpha))) * conv
    return SampledFunction(0.0, f.dt, out)
