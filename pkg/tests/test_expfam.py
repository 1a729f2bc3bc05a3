"""Tests for exponential family closed forms."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis.strategies import floats

from breg import expfam
from breg.config import DomainStatus
from breg.errors import FormulaValidityError, InputError, OutsideDomainError
from breg.expfam import ExpFamily
from breg.families import binomial, gbm, levy, poisson_process, rayleigh, wiener


@pytest.fixture(scope="module")
def ray():
    return rayleigh()


@pytest.fixture(scope="module")
def bin10():
    return binomial(10)


alphas = floats(min_value=-1.0, max_value=2.0).filter(lambda a: min(abs(a), abs(a - 1.0)) > 1e-2)
binomial_thetas = floats(min_value=-3.0, max_value=3.0)
near_thetas = floats(min_value=-1.0, max_value=1.0)


class TestCumulantCombinations:
    def test_rayleigh_rho(self, ray):
        assert expfam.rho_alpha(ray, 0.5, [1.0], [4.0]) == pytest.approx(math.log(0.8))
        assert expfam.rho_alpha(ray, 0.5, 1.0, 4.0) == pytest.approx(-0.223144, abs=1e-6)

    def test_rayleigh_sigma(self, ray):
        assert expfam.sigma_alpha(ray, 0.5, 2.0, 1.0, 3.0) == pytest.approx(0.490415, abs=1e-6)

    def test_wiener_rho(self):
        assert expfam.rho_alpha(wiener(1.0), 0.5, 1.0, 4.0) == pytest.approx(0.5 * math.log(0.8))

    def test_poisson_rho(self):
        assert expfam.rho_alpha(poisson_process(1.0), 0.5, 0.0, math.log(4.0)) == pytest.approx(-0.5)

    def test_rho_outside_domain_is_infinite(self, ray):
        # 2 * 1 - 4 <= 0 lies outside Theta
        assert expfam.rho_alpha(ray, 2.0, 1.0, 4.0) == math.inf

    def test_sigma_vanishes_at_scale_equal_to_second(self, ray):
        assert expfam.sigma_alpha(ray, 0.3, 2.5, 1.2, 2.5) == pytest.approx(0.0, abs=1e-14)

    def test_sigma_reduces_to_rho(self, bin10):
        assert expfam.sigma_alpha(bin10, 0.3, -0.4, 1.1, 1.1) == pytest.approx(expfam.rho_alpha(bin10, 0.3, 1.1, -0.4))

    @given(alphas, binomial_thetas, binomial_thetas, binomial_thetas)
    def test_sigma_alternative_form(self, alpha, t0, t1, t2):
        F = binomial(10)
        assert expfam.sigma_alpha_via_rho(F, alpha, t0, t1, t2) == pytest.approx(
            expfam.sigma_alpha(F, alpha, t0, t1, t2), rel=1e-9, abs=1e-9
        )

    def test_binomial_sigma_closed_form(self, bin10):
        alpha, t0, t1, t2 = 0.7, -0.8, -1.1, -1.4
        inner = alpha * t1 + (1 - alpha) * (t0 + t1 - t2)
        expected = 10 * math.log(
            (1 + math.exp(inner)) * (1 + math.exp(t2)) ** (1 - alpha)
            / ((1 + math.exp(t1)) * (1 + math.exp(t0)) ** (1 - alpha))
        )
        assert expfam.sigma_alpha(bin10, alpha, t0, t1, t2) == pytest.approx(expected)

    def test_renyi(self, ray):
        assert expfam.renyi_alpha(ray, 0.5, 1.0, 4.0) == pytest.approx(-4.0 * math.log(0.8))

    @pytest.mark.parametrize("alpha", [0.0, 1.0, 1e-12])
    def test_renyi_rejects_limits(self, ray, alpha):
        with pytest.raises(FormulaValidityError):
            expfam.renyi_alpha(ray, alpha, 1.0, 4.0)


class TestPowerDivergences:
    def test_d_alpha_from_rho(self, ray):
        assert expfam.d_alpha(ray, 0.5, 1.0, 4.0) == pytest.approx(math.expm1(math.log(0.8)) / -0.25)

    def test_levy_d_zero(self):
        F = levy(1.0, 0.0, 1.0)
        assert expfam.d_zero(F, 0.3, -1.2) == pytest.approx(1.5**2 / 2.0)

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 0.8])
    def test_gbm(self, alpha):
        t, sigma, m1, m2 = 2.0, 0.5, 0.4, -0.1
        F = gbm(t, sigma)
        n1, n2 = F.to_natural(m1), F.to_natural(m2)
        assert expfam.d_one(F, n1, n2) == pytest.approx((m1 - m2) ** 2 * t / (2 * sigma**2))
        assert expfam.rho_alpha(F, alpha, n1, n2) == pytest.approx(
            -alpha * (1 - alpha) * (m1 - m2) ** 2 * t / (2 * sigma**2)
        )

    def test_d_one_swaps_arguments(self, bin10):
        assert expfam.d_one(bin10, 0.4, -1.0) == expfam.d_zero(bin10, -1.0, 0.4)

    def test_classical_bregman(self, bin10):
        assert expfam.classical_bregman(bin10, 0.4, -1.0) == pytest.approx(expfam.d_zero(bin10, 0.4, -1.0))

    @pytest.mark.parametrize("alpha,limit", [(0.0, 0), (5e-10, 0), (1.0, 1), (1.0 + 5e-10, 1)])
    def test_routing(self, bin10, alpha, limit):
        expected = expfam.d_zero(bin10, 0.4, -1.0) if limit == 0 else expfam.d_one(bin10, 0.4, -1.0)
        assert expfam.d_alpha(bin10, alpha, 0.4, -1.0) == expected

    @pytest.mark.parametrize("limit", [0.0, 1.0])
    def test_continuity_at_limits(self, bin10, limit):
        h = 1e-5 if limit == 0.0 else -1e-5
        assert expfam.d_alpha(bin10, limit + h, 0.4, -1.0) == pytest.approx(
            expfam.d_alpha(bin10, limit, 0.4, -1.0), rel=1e-3
        )

    @given(alphas, binomial_thetas, binomial_thetas)
    def test_skew_symmetry(self, alpha, t1, t2):
        F = binomial(10)
        assert expfam.d_alpha(F, alpha, t2, t1) == pytest.approx(expfam.d_alpha(F, 1.0 - alpha, t1, t2), rel=1e-9, abs=1e-10)

    def test_outside_domain(self, ray):
        with pytest.raises(OutsideDomainError):
            expfam.d_alpha(ray, 0.5, -1.0, 2.0)

    def test_wrong_dimension(self):
        with pytest.raises(InputError):
            expfam.d_alpha(gbm(1.0, 1.0), 0.5, [1.0], [1.0, 2.0])

    def test_non_finite_parameter(self, bin10):
        with pytest.raises(InputError):
            expfam.d_alpha(bin10, 0.5, math.nan, 1.0)


class TestScaledBregman:
    @pytest.mark.parametrize("alpha", [-0.5, 0.0, 0.3, 1.0, 1.7])
    def test_scale_equal_to_second_gives_power_divergence(self, bin10, alpha):
        assert expfam.b_alpha(bin10, alpha, 0.4, -1.0, -1.0) == pytest.approx(
            expfam.d_alpha(bin10, alpha, 0.4, -1.0), rel=1e-10
        )

    def test_equal_members(self, ray):
        assert expfam.b_alpha(ray, 0.4, 1.5, 1.5, 2.5) == pytest.approx(0.0, abs=1e-14)

    def test_b_one_ignores_scale(self, ray):
        assert expfam.b_one(ray, 1.0, 2.0, 0.5) == expfam.b_one(ray, 1.0, 2.0, 3.0)

    def test_b_one_matches_kl(self, ray):
        assert expfam.b_one(ray, 1.0, 2.0, 0.5) == expfam.d_one(ray, 1.0, 2.0)

    def test_b_zero_minus_reversed_b_one(self, bin10):
        t1, t2, t0 = 0.4, -1.0, 0.9
        difference = expfam.b_zero(bin10, t1, t2, t0) - expfam.b_one(bin10, t2, t1, t0)
        gradient_gap = float(bin10.gradient(np.array([t2]))[0] - bin10.gradient(np.array([t0]))[0])
        expected = expfam.skew_deviation(bin10, t0, t1, t2) + gradient_gap * (t1 - t2)
        assert difference == pytest.approx(expected)

    @pytest.mark.parametrize("limit", [0.0, 1.0])
    def test_limits(self, ray, limit):
        exact = expfam.b_zero(ray, 1.2, 1.8, 1.5) if limit == 0.0 else expfam.b_one(ray, 1.2, 1.8, 1.5)
        near = expfam.b_alpha(ray, limit + (1e-5 if limit == 0.0 else -1e-5), 1.2, 1.8, 1.5)
        assert near == pytest.approx(exact, rel=1e-3, abs=1e-6)

    def test_infinite_skew_term_gives_infinity(self, ray):
        # 1 + 0.5 (1 - 4) <= 0
        assert expfam.b_alpha(ray, 0.5, 1.0, 4.0, 1.0) == math.inf

    def test_negative_infinite_term(self, ray):
        with pytest.raises(FormulaValidityError):
            expfam.b_alpha(ray, 2.0, 1.0, 1.0, 5.0)

    def test_b_zero_needs_interior_scale(self, ray):
        with pytest.raises(OutsideDomainError):
            expfam.b_zero(ray, 1.0, 2.0, -1.0)

    @given(floats(min_value=-0.5, max_value=1.5).filter(lambda a: min(abs(a), abs(a - 1.0)) > 1e-2), near_thetas, near_thetas)
    def test_nonnegative(self, alpha, t1, t2):
        F = binomial(10)
        assert expfam.b_alpha(F, alpha, t1, t2, 0.5 * (t1 + t2)) >= -1e-9


class TestShifts:
    def test_shift_invariance(self, ray):
        shifted = expfam.shift_family(ray, 3.0, [-2.0])
        assert shifted.b(np.array([1.0])) == pytest.approx(1.0)
        assert expfam.d_alpha(shifted, 0.3, 1.0, 2.0) == pytest.approx(expfam.d_alpha(ray, 0.3, 1.0, 2.0))
        assert expfam.b_alpha(shifted, 1.4, 1.0, 2.0, 1.5) == pytest.approx(expfam.b_alpha(ray, 1.4, 1.0, 2.0, 1.5))

    def test_shift_drops_densities(self, bin10):
        shifted = expfam.shift_family(bin10, 1.0, [0.5])
        assert shifted.mass_function is None
        assert shifted.density is None

    def test_shift_dimension(self, bin10):
        with pytest.raises(InputError):
            expfam.shift_family(bin10, 1.0, [0.5, 0.5])


class TestFamilyBasics:
    def test_b_outside_is_infinite(self, ray):
        assert ray.b(np.array([-1.0])) == math.inf

    def test_finite_difference_gradient(self):
        F = ExpFamily(
            dim=1,
            cumulant=lambda theta: float(theta[0] ** 2),
            in_domain=lambda theta: DomainStatus.INTERIOR,
            label="square",
        )
        assert F.gradient(np.array([1.5]))[0] == pytest.approx(3.0, rel=1e-8)

    def test_analytic_gradient_matches_finite_differences(self, bin10):
        theta = np.array([0.7])
        assert bin10.gradient(theta)[0] == pytest.approx(
            expfam.finite_difference_gradient(bin10.cumulant, theta)[0], rel=1e-7
        )

    def test_natural_param(self, bin10):
        assert expfam.natural_param(bin10, 0.5).tolist() == [0.5]
