"""
Unit tests for the trace operator, eigenfunctions, shell probes and S(lambda).
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from relscat.core.error_handler import DomainError
from relscat.spectral.birman_schwinger import spectral_norm
from relscat.spectral.grid import Field, inner, make_grid, sphere_quad
from relscat.spectral.potential import BUMP, Potential
from relscat.spectral.scattering import (
    born_term,
    eprime_quadform,
    f0_norm_squared,
    f0_trace,
    fourier_at,
    gen_eigenfunction,
    shell_probe,
    smatrix,
    smatrix_lowenergy_fit,
    stationary_wave_pairing,
    time_reversal_defect,
)
from tests.fixtures import gaussian_well


@pytest.fixture(scope="module")
def grid():
    return make_grid(16, 4.0)


@pytest.fixture(scope="module")
def bump():
    return Potential(kind=BUMP, a=1.0, radius=1.5)


@pytest.fixture(scope="module")
def gaussian(grid):
    return grid.field_from(lambda x, y, z: np.exp(-(x * x + y * y + z * z)))


class TestFourier:
    def test_gaussian_values(self, gaussian):
        # exp(-r^2) has transform 2^{-3/2} exp(-k^2 / 4)
        kvecs = np.array([[0.0, 0.0, 0.0], [1.0, 0.5, 0.0], [0.3, -2.0, 1.1]])
        expected = 2**-1.5 * np.exp(-np.sum(kvecs**2, axis=1) / 4)
        # the box is cut at |x| = 4 where exp(-16) is not yet negligible
        assert_allclose(fourier_at(gaussian, kvecs), expected, rtol=1e-5)

    def test_zero_field(self, grid):
        assert_allclose(fourier_at(grid.zeros(), np.ones((2, 3))), np.zeros(2))

    def test_matches_direct_sum(self, grid):
        rng = np.random.default_rng(5)
        values = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
        f = Field(grid, values)
        kvecs = rng.uniform(-2.0, 2.0, size=(5, 3))
        x, y, z = np.meshgrid(grid.axis, grid.axis, grid.axis, indexing="ij")
        points = np.stack([x.ravel(), y.ravel(), z.ravel()], axis=1)
        direct = np.exp(-1j * kvecs @ points.T) @ f.values.ravel()
        expected = grid.cell_volume / (2 * np.pi) ** 1.5 * direct
        assert_allclose(fourier_at(f, kvecs), expected, rtol=1e-10)

    def test_trace_domain(self, gaussian):
        quad = sphere_quad(4)
        with pytest.raises(DomainError):
            f0_trace(0.0, gaussian, quad)
        with pytest.raises(DomainError):
            f0_trace(2 * np.pi, gaussian, quad)

    def test_trace_is_isotropic_for_radial_fields(self, gaussian):
        trace = f0_trace(1.0, gaussian, sphere_quad(6))
        assert_allclose(trace.values, trace.values[0], rtol=1e-5)
        assert trace.norm() ** 2 == pytest.approx(4 * np.pi * abs(trace.values[0]) ** 2)

    def test_plancherel(self, gaussian):
        assert f0_norm_squared(gaussian, sphere_quad(8)) == pytest.approx(
            gaussian.norm() ** 2, rel=1e-6
        )

    def test_spectral_density_routes(self, grid, gaussian):
        g = grid.field_from(lambda x, y, z: (1 + x) * np.exp(-(x * x + y * y + z * z)))
        form = eprime_quadform(gaussian, g, 1.0)
        assert form.discrepancy < 1e-6
        assert form.to_dict()["discrepancy"] == form.discrepancy


class TestEigenfunctions:
    @pytest.mark.parametrize("sign", [1, -1])
    def test_lippmann_schwinger_residual(self, bump, grid, sign):
        phi = gen_eigenfunction(bump, [0.0, 0.0, 1.0], sign, grid)
        assert phi.residual <= 1e-6
        assert phi.to_dict()["sign"] == sign

    def test_free_eigenfunction_is_plane_wave(self, grid):
        k = np.array([0.5, 0.0, 0.5])
        phi = gen_eigenfunction(gaussian_well(a=0.0), k, 1, grid)
        assert phi.residual == 0.0
        assert_allclose(phi.phi.values, grid.plane_wave(k).values)

    def test_threshold_momentum(self, bump, grid):
        with pytest.raises(DomainError):
            gen_eigenfunction(bump, [0.0, 0.0, 0.0], 1, grid)


class TestShellProbe:
    @pytest.mark.parametrize(
        "a, b, degree", [(0.0, 1.0, 0), (1.0, 0.5, 0), (0.5, 1.0, 2)]
    )
    def test_rejects(self, a, b, degree):
        with pytest.raises(DomainError):
            shell_probe(a, b, degree)

    def test_profile_support(self):
        probe = shell_probe(0.5, 1.5)
        kappa = np.array([0.4, 0.5, 1.0, 1.5, 2.0])
        profile = probe.profile(kappa)
        assert profile[[0, 1, 3, 4]].tolist() == [0.0, 0.0, 0.0, 0.0]
        assert profile[2] == pytest.approx(1.0)

    def test_node_weights_cover_shell(self):
        probe = shell_probe(0.5, 1.5)
        _, weights = probe.nodes()
        assert weights.sum() == pytest.approx(4 * np.pi / 3 * (1.5**3 - 0.5**3))

    def test_dipole_vanishes_on_equator(self):
        probe = shell_probe(0.5, 1.5, degree=1)
        assert abs(probe.hat(np.array([1.0, 0.0, 0.0]))[0]) == 0.0

    def test_radial_probe_is_real(self, grid):
        g = shell_probe(0.5, 1.5).synthesize(grid)
        assert np.abs(g.values.imag).max() < 1e-12 * np.abs(g.values).max()

    def test_nyquist(self, grid):
        with pytest.raises(DomainError):
            shell_probe(1.0, 7.0).synthesize(grid)


class TestStationaryPairing:
    def test_free_pairing_is_inner_product(self, grid, gaussian):
        probe = shell_probe(0.5, 1.5)
        pairing = stationary_wave_pairing(gaussian_well(a=0.0), gaussian, probe, 1)
        expected = inner(gaussian, probe.synthesize(grid))
        assert pairing.value == pytest.approx(expected, rel=1e-10)
        assert pairing.discrepancy < 1e-12

    @pytest.mark.parametrize("sign", [1, -1])
    def test_forms_agree(self, bump, gaussian, sign):
        probe = shell_probe(0.5, 1.5, radial_nodes=6, order=8)
        pairing = stationary_wave_pairing(bump, gaussian, probe, sign)
        assert pairing.discrepancy < 1e-8
        assert len(pairing.to_dict()["resolvent_form"]) == 2


class TestSMatrix:
    def test_free_is_identity(self, grid):
        S = smatrix(gaussian_well(a=0.0), 0.5, sphere_quad(6), grid)
        assert S.minus_identity_norm() == pytest.approx(0, abs=1e-14)

    def test_unitary(self, bump, grid):
        S = smatrix(bump, 0.5, sphere_quad(12), grid)
        assert S.unitarity_defect() < 1e-6
        assert S.minus_identity_norm() > 0
        assert S.to_dict()["lambda"] == 0.5

    def test_time_reversal(self, bump, grid):
        assert time_reversal_defect(bump, 0.5, sphere_quad(8), grid) < 1e-8

    def test_born_approximation(self, grid):
        V = Potential(kind=BUMP, a=1e-3, radius=1.5)
        quad = sphere_quad(8)
        S = smatrix(V, 0.8, quad, grid)
        born = born_term(V, 0.8, quad, grid)
        correction = S._weighted(S.matrix - np.eye(quad.size) - born)
        assert spectral_norm(correction) <= 1e-2 * spectral_norm(S._weighted(born))

    def test_lowenergy_fit(self, grid):
        V = Potential(kind=BUMP, a=0.3, radius=1.5)
        fit = smatrix_lowenergy_fit(V, np.geomspace(0.05, 1.0, 6), sphere_quad(8), grid)
        assert fit.exponent == pytest.approx(2.0, abs=0.3)
        assert fit.monotone
        assert np.all(fit.unitarity < 1e-6)

    @pytest.mark.parametrize("lams", [[0.1, 0.2, 0.3], [0.1, 0.2, 0.5, 1.5]])
    def test_fit_domain(self, bump, grid, lams):
        with pytest.raises(DomainError):
            smatrix_lowenergy_fit(bump, lams, sphere_quad(4), grid)
