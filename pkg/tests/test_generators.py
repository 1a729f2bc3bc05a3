"""Tests for breg generators."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis.strategies import floats

from breg.errors import DomainError, InputError
from breg.generators import (
    PowerIndex,
    adjoint,
    builtin_generators,
    make_generator,
    make_kl,
    make_lecam,
    make_pearson,
    make_power,
    make_power_or_limit,
    make_reverse_kl,
    make_total_variation,
    parse_generator,
    standardize,
    support_line_gap,
    validate_generator,
)


class TestBuiltins:
    def test_power_values(self):
        g = make_power(2.0)
        assert g.eval(3.0) == pytest.approx(4.0)
        assert g.rderiv(3.0) == pytest.approx(3.0)
        assert g.eval(1.0) == 0.0

    def test_power_half_at_zero(self):
        assert make_power(0.5).at_zero == pytest.approx(4.0)

    @pytest.mark.parametrize("alpha", [-1.5, -0.5, 0.3, 0.5, 1.5, 2.0, 3.0])
    def test_power_extended_values_match_limits(self, alpha):
        g = make_power(alpha)
        tiny, huge = 1e-12, 1e12
        if math.isfinite(g.at_zero):
            assert g.eval(tiny) == pytest.approx(g.at_zero, rel=1e-3, abs=1e-3)
        else:
            assert g.eval(tiny) > 1e3
        if math.isfinite(g.adjoint_at_zero):
            assert g.eval(huge) / huge == pytest.approx(g.adjoint_at_zero, abs=1e-3)
        else:
            assert g.eval(huge) / huge > 1e2
        if math.isfinite(g.rderiv_at_zero):
            assert g.rderiv(tiny) == pytest.approx(g.rderiv_at_zero, abs=1e-3)
        else:
            assert g.rderiv(tiny) < -1e3
        tangent = g.eval(huge) - huge * g.rderiv(huge)
        if math.isfinite(g.adjoint_rderiv_at_zero):
            assert tangent == pytest.approx(g.adjoint_rderiv_at_zero, rel=1e-3, abs=1e-3)
        else:
            assert tangent < -1e2

    @pytest.mark.parametrize("alpha", [0.0, 1.0])
    def test_power_rejects_limits(self, alpha):
        with pytest.raises(DomainError):
            make_power(alpha)

    def test_kl(self):
        g = make_kl()
        assert g.eval(math.e) == pytest.approx(math.e)
        assert g.rderiv(1.0) == pytest.approx(1.0)
        assert g.at_zero == 0.0
        assert g.adjoint_at_zero == math.inf

    def test_reverse_kl(self):
        g = make_reverse_kl()
        assert g.rderiv(2.0) == pytest.approx(-0.5)
        assert g.at_zero == math.inf
        assert g.adjoint_at_zero == 0.0

    def test_total_variation_kink(self):
        g = make_total_variation()
        assert g.rderiv(1.0) == 1.0
        assert g.left_derivative(1.0) == -1.0
        assert g.eval(0.25) == pytest.approx(0.75)

    def test_smooth_generators_have_no_left_derivative(self):
        g = make_pearson()
        assert g.lderiv is None
        assert g.left_derivative(2.0) == g.rderiv(2.0)

    def test_lecam(self):
        g = make_lecam()
        assert g.eval(3.0) == pytest.approx(1.0)
        assert g.rderiv(1.0) == pytest.approx(0.0)

    def test_vectorized_eval(self):
        values = make_pearson().eval(np.array([0.5, 1.0, 2.0]))
        assert isinstance(values, np.ndarray)
        assert values.tolist() == pytest.approx([0.25, 0.0, 1.0])

    def test_scalar_eval_is_float(self):
        assert isinstance(make_kl().eval(2.0), float)

    def test_builtins_validate(self):
        for g in builtin_generators():
            validate_generator(g)


class TestPowerRouting:
    @pytest.mark.parametrize("alpha,label", [(0.0, "rkl"), (5e-10, "rkl"), (1.0, "kl"), (1.0 - 5e-10, "kl")])
    def test_routes_to_limits(self, alpha, label):
        assert make_power_or_limit(alpha).label == label

    def test_keeps_power_away_from_limits(self):
        assert make_power_or_limit(0.5).label == "power:0.5"

    def test_power_index(self):
        assert PowerIndex(1e-10).is_limit
        assert not PowerIndex(0.1).is_limit


class TestAlgebra:
    def test_adjoint_tv(self):
        assert adjoint(make_total_variation()).eval(3.0) == pytest.approx(2.0)

    def test_adjoint_of_kl_is_reverse_kl(self):
        g = adjoint(make_kl())
        for t in (0.3, 1.0, 4.0):
            assert g.eval(t) == pytest.approx(make_reverse_kl().eval(t))
            assert g.rderiv(t) == pytest.approx(make_reverse_kl().rderiv(t))
        assert g.at_zero == math.inf
        assert g.adjoint_at_zero == 0.0

    def test_adjoint_swaps_kink_derivatives(self):
        g = adjoint(make_total_variation())
        assert g.rderiv(1.0) == pytest.approx(1.0)
        assert g.left_derivative(1.0) == pytest.approx(-1.0)

    def test_adjoint_validates(self):
        for g in builtin_generators():
            validate_generator(adjoint(g))

    def test_standardize_zeroes_slope_at_one(self):
        g = standardize(make_kl())
        assert g.rderiv(1.0) == pytest.approx(0.0)
        assert g.eval(2.0) == pytest.approx(2.0 * math.log(2.0) - 1.0)
        assert g.at_zero == pytest.approx(1.0)

    @pytest.mark.parametrize("alpha", [-0.5, 0.3, 2.0])
    def test_adjoint_of_power_is_complementary_power(self, alpha):
        left = standardize(adjoint(make_power(alpha)))
        right = standardize(make_power(1.0 - alpha))
        for t in (0.1, 0.5, 2.0, 7.0):
            assert left.eval(t) == pytest.approx(right.eval(t), abs=1e-12)

    @pytest.mark.parametrize("limit,target", [(1.0, make_kl), (0.0, make_reverse_kl)])
    def test_standardized_power_converges_to_limits(self, limit, target):
        h = 1e-6 if limit == 0.0 else -1e-6
        near, exact = standardize(make_power(limit + h)), standardize(target())
        for t in (0.5, 2.0, 4.0):
            assert abs(near.eval(t) - exact.eval(t)) < 1e-5

    @given(floats(min_value=1e-3, max_value=1e3))
    def test_adjoint_is_involution(self, t):
        g = make_power(0.3)
        assert adjoint(adjoint(g)).eval(t) == pytest.approx(g.eval(t), rel=1e-9, abs=1e-12)


class TestValidation:
    def test_user_generator(self):
        g = make_generator(
            lambda t: (t - 1.0) ** 4,
            lambda t: 4.0 * (t - 1.0) ** 3,
            at_zero=1.0,
            rderiv_at_zero=-4.0,
            adjoint_at_zero=math.inf,
            adjoint_rderiv_at_zero=-math.inf,
            label="quartic",
        )
        assert g.eval(3.0) == pytest.approx(16.0)

    def test_rejects_nonzero_at_one(self):
        with pytest.raises(DomainError, match="phi\\(1\\)"):
            make_generator(
                lambda t: t * t,
                lambda t: 2.0 * t,
                at_zero=0.0,
                rderiv_at_zero=0.0,
                adjoint_at_zero=math.inf,
                adjoint_rderiv_at_zero=-math.inf,
                label="shifted",
            )

    def test_rejects_concave(self):
        with pytest.raises(DomainError):
            make_generator(
                lambda t: np.log(t),
                lambda t: 1.0 / t,
                at_zero=-math.inf,
                rderiv_at_zero=math.inf,
                adjoint_at_zero=0.0,
                adjoint_rderiv_at_zero=math.inf,
                label="log",
            )

    def test_skip_validation(self):
        g = make_generator(
            lambda t: np.log(t),
            lambda t: 1.0 / t,
            at_zero=-math.inf,
            rderiv_at_zero=math.inf,
            adjoint_at_zero=0.0,
            adjoint_rderiv_at_zero=math.inf,
            label="log",
            validate=False,
        )
        assert g.label == "log"

    def test_support_line_gap_is_zero_for_convex(self):
        assert support_line_gap(make_lecam()) == 0.0


class TestParseGenerator:
    @pytest.mark.parametrize("text,label", [
        ("kl", "kl"),
        ("RKL", "rkl"),
        ("tv", "tv"),
        ("pearson", "pearson"),
        ("lecam", "lecam"),
        ("power:2", "power:2.0"),
    ])
    def test_names(self, text, label):
        assert parse_generator(text).label == label

    @pytest.mark.parametrize("text", ["hellinger", "power", "power:x", "power:nan", "kl:1"])
    def test_invalid(self, text):
        with pytest.raises(InputError):
            parse_generator(text)

    def test_power_at_limit_is_domain_error(self):
        with pytest.raises(DomainError):
            parse_generator("power:1")
