"""
Unit tests for the cosine/sine integrals and the resolvent combination.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate

from relscat.core.error_handler import DomainError
from relscat.spectral.specfun import (
    ASYMPTOTIC_RADIUS,
    EULER_GAMMA,
    cosint,
    cosint_result,
    resolvent_combo,
    resolvent_combo_result,
    sinint_si,
)


def combo_by_quadrature(r: float) -> float:
    """-(f cos 2r + g sin 2r), auxiliary integrals by adaptive quadrature."""
    # t = u / r
    f, _ = integrate.quad(lambda u: np.exp(-u) / (r * r + u * u) * r, 0, np.inf)
    g, _ = integrate.quad(lambda u: np.exp(-u) * u / (r * r + u * u), 0, np.inf)
    return -(f * np.cos(2 * r) + g * np.sin(2 * r))


class TestCosSinIntegrals:
    def test_small_argument_limit(self):
        """Ci(r) - ln r tends to the Euler constant."""
        r = 1e-8
        assert abs(cosint(r) - np.log(r) - EULER_GAMMA) < 1e-7

    def test_si_limits(self):
        assert sinint_si(0.0) == pytest.approx(-np.pi / 2)
        assert abs(sinint_si(1e4)) < 2e-4

    def test_array_shape_preserved(self):
        r = np.linspace(0.5, 4.0, 12).reshape(3, 4)
        assert cosint(r).shape == (3, 4)
        assert isinstance(cosint(1.0), float)

    def test_domain(self):
        with pytest.raises(DomainError):
            cosint(0.0)
        with pytest.raises(DomainError):
            cosint(np.array([1.0, -1.0]))
        with pytest.raises(DomainError):
            sinint_si(-0.1)

    def test_error_estimate(self):
        result = cosint_result(2.0)
        assert 0 <= result.est_error <= 1e-10


class TestResolventCombo:
    def test_matches_definition_near(self):
        r = np.array([0.1, 1.0, 5.0, 19.5])
        expected = np.sin(r) * cosint(r) + np.cos(r) * sinint_si(r)
        assert_allclose(resolvent_combo(r), expected, rtol=1e-13, atol=1e-15)

    @pytest.mark.parametrize("r", [25.0, 200.0, 5000.0])
    def test_far_branch_against_quadrature(self, r):
        assert resolvent_combo(r) == pytest.approx(combo_by_quadrature(r), abs=1e-10)

    def test_branches_join(self):
        below = resolvent_combo(ASYMPTOTIC_RADIUS * (1 - 1e-12))
        above = resolvent_combo(ASYMPTOTIC_RADIUS * (1 + 1e-12))
        assert below == pytest.approx(above, abs=1e-10)

    def test_decay(self):
        """w(r) ~ -cos(2r) / r for large r."""
        r = 1e4
        assert r * resolvent_combo(r) == pytest.approx(-np.cos(2 * r), abs=1e-3)

    def test_error_estimates(self):
        for r in (1e-3, 1.0, 30.0, 1e4):
            result = resolvent_combo_result(r)
            assert 0 <= result.est_error <= 1e-10

    def test_domain(self):
        with pytest.raises(DomainError):
            resolvent_combo(0.0)
