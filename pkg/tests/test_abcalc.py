import math

import numpy as np
import pytest

from abfrac.abcalc import (
    ABConfig,
    SampledFunction,
    ab_integral,
    abc_derivative,
    cf_derivative,
    normalization,
    reconstruct_derivative,
)
from abfrac.errors import DomainError, GridError
from abfrac.specfun import gamma

import oracles


def sampled(fn, n, horizon=1.0, dfn=None):
    return SampledFunction.from_callable(fn, 0.0, horizon / n, n + 1, dfn=dfn)


class TestSampledFunction:
    def test_grid_validation(self):
        with pytest.raises(GridError):
            SampledFunction(0.0, -0.1, np.array([1.0, 2.0]))
        with pytest.raises(GridError):
            SampledFunction(0.0, 0.1, np.array([]))
        with pytest.raises(GridError):
            SampledFunction(0.0, 0.1, np.array([1.0, 2.0]), derivative_values=np.array([0.0]))

    def test_times(self):
        f = SampledFunction(0.5, 0.25, np.zeros(3))
        assert np.allclose(f.times, [0.5, 0.75, 1.0])

    def test_derivative_reconstruction_quadratic(self):
        f = sampled(lambda t: t * t, 100)
        # second-order differences are exact on quadratics
        assert np.allclose(reconstruct_derivative(f), 2.0 * f.times, atol=1e-12)


class TestNormalization:
    def test_families(self):
        assert normalization(0.37, "one") == 1.0
        alpha = 0.37
        assert normalization(alpha, "ab_family") == pytest.approx(
            1.0 - alpha + alpha / math.gamma(alpha), rel=1e-13
        )
        with pytest.raises(DomainError):
            normalization(0.5, "bogus")

    def test_config_validation(self):
        with pytest.raises(DomainError):
            ABConfig(1.0, 1.0)
        with pytest.raises(DomainError):
            ABConfig(0.5, -1.0)


class TestAbcDerivative:
    def test_constant_is_zero(self):
        f = sampled(lambda t: 3.7, 50)
        out = abc_derivative(f, ABConfig(0.5, 1.0))
        assert np.allclose(out.values, 0.0, atol=1e-14)

    def test_linear_against_quadrature_oracle(self):
        # f(t) = t at t = 1: (B/(1-a)) * int_0^1 E_a(-(1-s)^a) ds for a = 1/2,
        # equal to 2 * int_0^1 exp(u) erfc(sqrt(u)) du; frozen from a 30-digit
        # adaptive quadrature of that smooth integrand
        f = sampled(lambda t: t, 2000)
        out = abc_derivative(f, ABConfig(0.5, 1.0))
        assert out.values[-1] == pytest.approx(1.1119254865026392, abs=1e-7)

    def test_limit_alpha_near_one(self):
        cfg = ABConfig(0.999, 1.0)
        f = sampled(lambda t: t * t, 800, dfn=lambda t: 2.0 * t)
        out = abc_derivative(f, cfg)
        window = f.times >= 0.2
        rel = np.abs(out.values[window] - 2.0 * f.times[window]) / (2.0 * f.times[window])
        assert np.max(rel) <= 0.02

    def test_zero_at_origin(self):
        f = sampled(lambda t: math.sin(t), 64)
        assert abc_derivative(f, ABConfig(0.3, 1.0)).values[0] == 0.0

    def test_grid_errors(self):
        with pytest.raises(GridError):
            abc_derivative(SampledFunction(0.0, 0.1, np.array([1.0])), ABConfig(0.5, 1.0))
        with pytest.raises(GridError):
            abc_derivative(
                SampledFunction(1.0, 0.1, np.arange(5.0)), ABConfig(0.5, 1.0)
            )

    def test_supplied_derivative_wins(self):
        n = 200
        f_fd = sampled(lambda t: t**3, n)
        f_exact = sampled(lambda t: t**3, n, dfn=lambda t: 3.0 * t * t)
        cfg = ABConfig(0.5, 1.0)
        out_fd = abc_derivative(f_fd, cfg)
        out_exact = abc_derivative(f_exact, cfg)
        assert not np.allclose(out_fd.values, out_exact.values, atol=1e-12)


class TestCfDerivative:
    def test_constant_is_zero(self):
        f = sampled(lambda t: -1.25, 50)
        assert np.allclose(cf_derivative(f, ABConfig(0.5, 1.0)).values, 0.0, atol=1e-14)

    def test_linear_analytic(self):
        # f(t) = t: (B/(1-a)) (1-a)/a (1 - exp(-a t/(1-a))) = 2 (1 - e^-t) at a = 1/2
        f = sampled(lambda t: t, 400)
        out = cf_derivative(f, ABConfig(0.5, 1.0))
        expected = 2.0 * (1.0 - np.exp(-f.times))
        assert np.max(np.abs(out.values - expected)) <= 1e-12

    def test_limit_alpha_near_one(self):
        cfg = ABConfig(0.999, 1.0)
        f = sampled(lambda t: t * t, 800, dfn=lambda t: 2.0 * t)
        out = cf_derivative(f, cfg)
        window = f.times >= 0.2
        rel = np.abs(out.values[window] - 2.0 * f.times[window]) / (2.0 * f.times[window])
        assert np.max(rel) <= 0.02


class TestAbIntegral:
    def test_zero_function(self):
        f = sampled(lambda t: 0.0, 32)
        assert np.allclose(ab_integral(f, ABConfig(0.5, 1.0)).values, 0.0, atol=0.0)

    def test_linear_beta_identity(self):
        # piecewise-linear data make the product rule exact for f(t) = t
        f = sampled(lambda t: t, 500)
        out = ab_integral(f, ABConfig(0.5, 1.0))
        t = f.times
        expected = 0.5 * t + 0.5 * np.array(
            [oracles.rl_beta_moment(1, 0.5, v) for v in t]
        ) / math.gamma(0.5)
        assert np.max(np.abs(out.values - expected)) <= 1e-12
        assert out.values[-1] == pytest.approx(0.5 + 0.5 / math.gamma(2.5), abs=1e-12)

    def test_constant_closed_form(self):
        f = sampled(lambda t: 1.0, 500)
        out = ab_integral(f, ABConfig(0.5, 1.0))
        t = f.times
        expected = 0.5 + 0.5 * np.array(
            [oracles.rl_beta_moment(0, 0.5, v) for v in t]
        ) / math.gamma(0.5)
        assert np.max(np.abs(out.values - expected)) <= 1e-12


class TestProperties:
    @pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7])
    def test_round_trip(self, alpha):
        cfg = ABConfig(alpha, 1.0)
        for fn in (lambda t: t, lambda t: t * t, math.sin):
            errors = {}
            for n in (1000, 4000):
                f = sampled(fn, n)
                back = abc_derivative(ab_integral(f, cfg), cfg)
                window = f.times >= 0.1
                scale = np.max(np.abs(f.values[window]))
                errors[n] = float(
                    np.max(np.abs(back.values[window] - f.values[window])) / scale
                )
            assert errors[4000] <= 1e-2
            assert errors[4000] < errors[1000]

    def test_linearity(self):
        cfg = ABConfig(0.6, 1.0)
        n = 300
        f = sampled(math.sin, n)
        g = sampled(lambda t: t * t, n)
        a, b = 2.5, -1.25
        combo = SampledFunction(0.0, f.dt, a * f.values + b * g.values)
        for op in (abc_derivative, cf_derivative, ab_integral):
            direct = op(combo, cfg).values
            split = a * op(f, cfg).values + b * op(g, cfg).values
            assert np.max(np.abs(direct - split)) <= 1e-10
