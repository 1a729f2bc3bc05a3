"""Tests for 3D-discrimination grid sweeps."""

import numpy as np
import pytest

from breg.discrete import ProbabilityMeasure, b_phi, mixture
from breg.errors import DomainError, InputError
from breg.families import binomial, rayleigh
from breg.generators import make_kl, make_reverse_kl
from breg.grid import family_pair, grid_spec, parse_range, sweep, value_range
from breg.models import GridSpec


@pytest.fixture(scope="module")
def pair():
    return family_pair(binomial(10), 0.25, 0.2)


class TestParseRange:
    def test_three_parts(self):
        assert parse_range("0.2:2:50", "alpha") == (0.2, 2.0, 50)

    def test_default_steps(self):
        assert parse_range("0:1", "beta", default_steps=7) == (0.0, 1.0, 7)

    @pytest.mark.parametrize("text", ["1", "0:1:2:3", "a:1", "0:1:x"])
    def test_invalid(self, text):
        with pytest.raises(InputError):
            parse_range(text, "alpha")

    def test_invalid_grid(self):
        with pytest.raises(InputError, match="grid"):
            grid_spec("1:0:5", "0:1:5")


class TestFamilyPair:
    def test_binomial(self, pair):
        P, Q = pair
        assert isinstance(P, ProbabilityMeasure)
        assert P.size == Q.size == 11
        assert float(np.dot(np.arange(11), P.masses)) == pytest.approx(2.5)

    def test_needs_counting_family(self):
        with pytest.raises(DomainError):
            family_pair(rayleigh(), 1.0, 2.0)


class TestSweep:
    @pytest.mark.parametrize("qtilde", [0.2, 0.3])
    def test_acceptance_range(self, qtilde):
        P, Q = family_pair(binomial(10), 0.25, qtilde)
        rows = sweep(P, Q, grid_spec("0.2:2:50", "0:1:50"))
        assert len(rows) == 2500
        low, high = value_range(rows)
        assert 0.06 <= low and high <= 0.088

    def test_row_order(self, pair):
        P, Q = pair
        rows = sweep(P, Q, GridSpec(alpha_min=0.5, alpha_max=1.5, alpha_steps=3, beta_steps=2))
        assert [(r.alpha, r.beta) for r in rows] == [
            (0.5, 0.0), (0.5, 1.0), (1.0, 0.0), (1.0, 1.0), (1.5, 0.0), (1.5, 1.0),
        ]

    def test_limit_points_use_log_generators(self, pair):
        P, Q = pair
        rows = sweep(P, Q, GridSpec(alpha_min=0.0, alpha_max=1.0, alpha_steps=2, beta_steps=2))
        by_point = {(r.alpha, r.beta): r.value for r in rows}
        assert by_point[(1.0, 1.0)] == pytest.approx(b_phi(make_kl(), P, Q, P))
        assert by_point[(0.0, 0.0)] == pytest.approx(b_phi(make_reverse_kl(), P, Q, Q))
        assert by_point[(0.0, 1.0)] == pytest.approx(b_phi(make_reverse_kl(), P, Q, mixture(P, Q, 1.0)))

    def test_equal_members_give_zero(self):
        P, _ = family_pair(binomial(10), 0.3, 0.3)
        rows = sweep(P, P, GridSpec(alpha_min=-1.0, alpha_max=2.0, alpha_steps=7, beta_steps=5))
        assert all(abs(r.value) < 1e-15 for r in rows)

    def test_workers_do_not_change_result(self, pair):
        P, Q = pair
        spec = GridSpec(alpha_min=0.2, alpha_max=2.0, alpha_steps=6, beta_steps=4)
        assert sweep(P, Q, spec, workers=3) == sweep(P, Q, spec)
