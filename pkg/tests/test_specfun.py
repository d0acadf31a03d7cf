import math

import numpy as np
import pytest

from abfrac import specfun
from abfrac.errors import DomainError, NonConvergence
from abfrac.specfun import EvalPolicy, MLArgs, gamma, ml1, ml2, ml3, ml_kernel_derivative

import oracles


class TestGamma:
    def test_against_stdlib(self):
        xs = np.concatenate(
            [
                np.linspace(1e-3, 140.0, 800),
                [-0.5, -1.5, -3.3, -20.7, -99.5, 0.5, 1.0, 2.0, 2.5],
            ]
        )
        for x in xs:
            assert gamma(float(x)) == pytest.approx(math.gamma(float(x)), rel=1e-13)
        # pow exponent amplification dominates near the overflow edge
        for x in np.linspace(140.0, 170.0, 200):
            assert gamma(float(x)) == pytest.approx(math.gamma(float(x)), rel=2e-13)

    def test_gamma_two_point_five(self):
        # 1.5 * 0.5 * sqrt(pi), frozen at full precision
        assert gamma(2.5) == pytest.approx(1.3293403881791370, rel=1e-13, abs=0.0)

    def test_poles(self):
        for x in (0.0, -1.0, -7.0):
            with pytest.raises(DomainError):
                gamma(x)

    def test_overflow(self):
        with pytest.raises(DomainError):
            gamma(172.0)

    def test_array_input(self):
        out = gamma(np.array([1.0, 2.0, 3.0, 0.5]))
        assert np.allclose(out, [1.0, 1.0, 2.0, math.sqrt(math.pi)], rtol=1e-13)


class TestMl1:
    def test_exp_identity(self):
        assert ml1(1.0, 1.0) == pytest.approx(2.718281828459045, abs=1e-12)

    def test_zero_argument(self):
        assert ml1(0.7, 0.0) == 1.0

    def test_erfc_oracle(self):
        # E_{1/2}(z) = exp(z^2) erfc(-z); erfc from an independent continued fraction
        cf = math.e * oracles.erfc_cf(1.0)
        assert cf == pytest.approx(0.4275835761558070, abs=1e-12)
        assert ml1(0.5, -1.0) == pytest.approx(cf, abs=1e-12)

    def test_exp_floor_sweep(self):
        for z in np.linspace(-5.0, 5.0, 101):
            assert abs(ml1(1.0, float(z)) - math.exp(float(z))) <= 1e-12

    def test_bounded_decay_for_nonpositive_lambda(self):
        # |E_a(lam t^a)| <= 1 and non-increasing in t for lam <= 0
        for alpha in (0.3, 0.5, 0.7, 0.9):
            for lam in (-2.0, -1.0, -0.25, 0.0):
                previous = 1.0 + 1e-12
                for t in np.linspace(0.05, 20.0, 60):
                    value = ml1(alpha, lam * float(t) ** alpha)
                    assert abs(value) <= 1.0 + 1e-12
                    assert value <= previous + 1e-12
                    previous = value


class TestMl2:
    def test_e12_identity(self):
        assert ml2(1.0, 2.0, 1.0) == pytest.approx(math.e - 1.0, abs=1e-12)

    def test_zero_argument(self):
        assert ml2(0.9, 0.9, 0.0) == pytest.approx(1.0 / math.gamma(0.9), rel=1e-13)

    @pytest.mark.parametrize(
        "alpha,beta,z,expected",
        [
            # frozen from a 60-digit series oracle
            (0.5, 0.5, -2.0, 0.0533982309267448),
            (0.5, 1.0, -20.0, 0.02817434874105132),
            (0.7, 0.7, -30.0, 2.741428200864545e-4),
            # frozen from the 15-term algebraic expansion (|z| large)
            (0.3, 1.0, -30.0, 0.025182617502927663),
            (0.999, 1.0, -999.0, 1.0035864649077160e-6),
            (0.9, 1.9, -50.0, 0.019956492938462860),
        ],
    )
    def test_frozen_references(self, alpha, beta, z, expected):
        assert ml2(alpha, beta, z) == pytest.approx(expected, abs=1e-12)

    def test_recurrence_shift(self):
        # E_{a,b}(z) = 1/Gamma(b) + z E_{a,a+b}(z); arguments kept representable
        cases = []
        for alpha in (0.4, 0.5, 0.7, 0.9, 1.0, 1.3):
            for beta in (0.5, 1.0, 2.2):
                for z in (-10.0, -4.0, -0.5, 0.5, 4.0, 10.0):
                    cases.append((alpha, beta, z))
        for alpha, beta, z in cases:
            lhs = ml2(alpha, beta, z)
            rhs = 1.0 / gamma(beta) + z * ml2(alpha, alpha + beta, z)
            # absolute where the value is O(1); proportional once the value
            # grows beyond what an absolute window can resolve in doubles
            assert abs(lhs - rhs) <= 1e-11 * max(1.0, abs(lhs)), (alpha, beta, z)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            ml2(-0.5, 1.0, 0.3)
        with pytest.raises(DomainError):
            ml2(0.5, 0.0, 0.3)
        with pytest.raises(DomainError):
            ml2(2.5, 1.0, 0.3)
        with pytest.raises(DomainError):
            ml2(0.5, 1.0, complex(1.0, 1.0))

    def test_overflowing_positive_argument(self):
        with pytest.raises(NonConvergence):
            ml2(0.5, 1.0, 50.0)

    def test_max_terms_cap(self):
        with pytest.raises(NonConvergence):
            ml2(1.0, 1.0, 200.0, EvalPolicy(max_terms=50))


class TestMl3:
    def test_delta_one_reduces_to_ml2(self):
        rng = np.random.default_rng(42)
        checked = 0
        while checked < 100:
            alpha = float(rng.uniform(0.3, 1.2))
            beta = float(rng.uniform(0.4, 2.5))
            z = float(rng.uniform(-6.0, 2.0))
            assert ml3(alpha, beta, 1.0, z) == pytest.approx(
                ml2(alpha, beta, z), abs=2e-12
            )
            checked += 1

    def test_paper_reduction_point(self):
        assert ml3(0.6, 0.6, 1.0, -0.8) == pytest.approx(ml2(0.6, 0.6, -0.8), abs=2e-12)

    def test_zero_argument(self):
        assert ml3(0.5, 1.0, 3.0, 0.0) == 1.0

    def test_frozen_prabhakar_value(self):
        # frozen from a 60-digit series oracle
        assert ml3(0.5, 1.5, 2.0, 0.3) == pytest.approx(2.000628706801172, abs=1e-12)

    def test_negative_argument_with_cancellation(self):
        ref = oracles.ml_series_mp(0.4, 0.6, -5.0, delta=3.0, dps=80)
        assert ml3(0.4, 0.6, 3.0, -5.0) == pytest.approx(ref, abs=1e-12)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            ml3(0.5, 1.0, -1.0, 0.3)


class TestSemigroupConvolution:
    def test_prabhakar_convolution_identity(self):
        from scipy.integrate import quad

        alpha, w = 0.5, -1.0

        def kernel(order, gap):
            return gap ** (order * alpha - 1.0) * ml3(
                alpha, order * alpha, float(order), w * gap**alpha
            )

        for i, j in ((1, 1), (1, 2), (2, 2)):
            for gap in (0.5, 1.0):
                conv, _ = quad(
                    lambda s: kernel(i, gap - s) * kernel(j, s),
                    0.0,
                    gap,
                    points=[0.0, gap],
                    limit=300,
                )
                target = kernel(i + j, gap)
                assert conv == pytest.approx(target, rel=1e-4)


class TestKernelDerivative:
    def test_alpha_one_exponential(self):
        assert ml_kernel_derivative(1.0, -2.0, 0.5) == pytest.approx(
            -2.0 * math.exp(-1.0), abs=1e-12
        )

    def test_direct_substitution(self):
        assert ml_kernel_derivative(0.5, -1.0, 1.0) == pytest.approx(
            -ml2(0.5, 0.5, -1.0), abs=1e-12
        )

    def test_finite_difference_oracle(self):
        alpha, w, t, h = 0.7, -0.9, 0.25, 1e-5
        fd = (ml1(alpha, w * (t + h) ** alpha) - ml1(alpha, w * (t - h) ** alpha)) / (
            2.0 * h
        )
        assert ml_kernel_derivative(alpha, w, t) == pytest.approx(fd, abs=1e-8)

    def test_domain(self):
        with pytest.raises(DomainError):
            ml_kernel_derivative(0.5, -1.0, 0.0)
        with pytest.raises(DomainError):
            ml_kernel_derivative(1.2, -1.0, 0.5)


class TestPolicyAndArgs:
    def test_policy_validation(self):
        with pytest.raises(DomainError):
            EvalPolicy(abs_tol=0.0)
        with pytest.raises(DomainError):
            EvalPolicy(max_terms=10)
        with pytest.raises(DomainError):
            EvalPolicy(series_radius=-1.0)

    def test_mlargs_validation(self):
        with pytest.raises(DomainError):
            MLArgs(alpha=-1.0)
        with pytest.raises(DomainError):
            MLArgs(alpha=0.5, beta=0.0)
        with pytest.raises(DomainError):
            MLArgs(alpha=0.5, delta=-2.0)
        args = MLArgs(alpha=0.5, beta=1.0, delta=1.0, z=-1.0)
        assert specfun.ml(args) == pytest.approx(ml1(0.5, -1.0), abs=0.0)

    def test_grid_matches_scalar(self):
        zs = np.array([0.0, -0.3, -2.0, -16.0, 0.7, -80.0])
        grid = specfun.ml_grid(0.6, 0.6, 1.0, zs)
        for z, value in zip(zs, grid):
            assert value == pytest.approx(ml2(0.6, 0.6, float(z)), abs=1e-12)
