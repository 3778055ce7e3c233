"""
Unit tests for potential families, factorization, dilates and virials.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from relscat.core.config import PotentialConfig
from relscat.core.error_handler import DomainError, UnsupportedKindError
from relscat.spectral.field_io import write_field
from relscat.spectral.grid import make_grid
from relscat.spectral.potential import (
    ANALYTIC_KINDS,
    BUMP,
    GAUSSIAN,
    TABULATED,
    YUKAWA,
    Potential,
    decay_check,
    dilate,
    factorize,
    factorize_on_grid,
    l3_norm,
    second_virial,
    virial,
)
from tests.fixtures import gaussian_well, small_grid


def radial(V, r):
    r = np.asarray(r, dtype=float)
    return V(r, np.zeros_like(r), np.zeros_like(r))


@pytest.fixture
def table_field():
    grid = make_grid(32, 8.0)
    return grid.field_from(lambda x, y, z: -np.exp(-(x * x + y * y + z * z) / 4))


class TestPotential:
    def test_gaussian_is_attractive(self):
        V = gaussian_well(a=2.0)
        assert radial(V, [0.0])[0] == pytest.approx(-2.0)
        assert np.all(V.on_grid(small_grid()) <= 0)

    def test_unknown_kind(self):
        with pytest.raises(UnsupportedKindError):
            Potential(kind="coulomb")

    def test_tabulated_needs_table(self):
        with pytest.raises(DomainError):
            Potential(kind=TABULATED)

    def test_coupling_and_scale(self):
        V = gaussian_well(a=1.0)
        assert V.with_coupling(3.0).amplitude == 3.0
        assert V.scaled(0.5).scaled(4.0).amplitude == 2.0
        assert V.with_coupling(0.0).is_zero

    def test_bump_has_compact_support(self):
        V = Potential(kind=BUMP, a=1.0, radius=1.5)
        assert radial(V, [1.49])[0] < 0
        assert radial(V, [1.5, 2.0, 3.0]).tolist() == [0.0, 0.0, 0.0]
        assert V.mass_outside(small_grid(), 1.5) == 0.0

    def test_support_radius(self):
        assert gaussian_well(width=2.0).support_radius(1e-7) == pytest.approx(
            2.0 * np.sqrt(np.log(1e7))
        )
        assert Potential(kind=BUMP, radius=1.5, tau=np.log(2.0)).support_radius() == (
            pytest.approx(3.0)
        )
        yukawa = Potential(kind=YUKAWA, mu=1.0)
        R = yukawa.support_radius(1e-7)
        assert abs(radial(yukawa, [R])[0]) == pytest.approx(1e-7, rel=1e-6)

    def test_support_radius_domain(self):
        with pytest.raises(DomainError):
            gaussian_well().support_radius(0.0)

    def test_mass_outside_is_a_fraction(self):
        grid = small_grid()
        V = gaussian_well()
        assert 0 < V.mass_outside(grid, 1.0) < 1
        assert V.mass_outside(grid, -1.0) == pytest.approx(1.0)


class TestFactorization:
    @pytest.mark.parametrize("kind", ANALYTIC_KINDS)
    def test_product_recovers_potential(self, kind):
        V = Potential(kind=kind, a=1.3)
        grid = small_grid()
        v0, u0 = factorize_on_grid(V, grid)
        assert np.all(v0 >= 0)
        assert_allclose(u0 * v0, V.on_grid(grid), atol=1e-15)

    def test_point_maps_agree_with_grid(self):
        V = gaussian_well(a=0.7)
        grid = small_grid()
        v0, u0 = factorize(V)
        x, y, z = grid.coordinates
        grid_v0, grid_u0 = factorize_on_grid(V, grid)
        assert_allclose(np.broadcast_to(v0(x, y, z), grid.shape), grid_v0)
        assert_allclose(np.broadcast_to(u0(x, y, z), grid.shape), grid_u0)

    def test_sign_of_zero(self):
        V = Potential(kind=BUMP, radius=1.0)
        _, u0 = factorize(V)
        assert radial(u0, [2.0])[0] == 0.0


class TestDilation:
    def test_dilate_rescales_argument(self):
        V = gaussian_well(a=1.0, width=1.0)
        tau = 0.4
        r = np.linspace(0.0, 3.0, 7)
        assert_allclose(radial(dilate(V, tau), r), radial(V, np.exp(-tau) * r))

    def test_dilates_compose(self):
        V = gaussian_well()
        assert dilate(dilate(V, 0.25), -0.125) == dilate(V, 0.125)


class TestVirial:
    @pytest.mark.parametrize("kind", ANALYTIC_KINDS)
    def test_virial_matches_radial_derivative(self, kind):
        V = Potential(kind=kind, a=1.0, tau=0.2)
        r = np.linspace(0.3, 1.6, 6)
        delta = 1e-5
        derivative = (radial(V, r + delta) - radial(V, r - delta)) / (2 * delta)
        assert_allclose(radial(virial(V), r), r * derivative, rtol=1e-6, atol=1e-9)

    @pytest.mark.parametrize("kind", ANALYTIC_KINDS)
    def test_second_virial_matches_radial_derivative(self, kind):
        V = Potential(kind=kind, a=1.0)
        first = virial(V)
        r = np.linspace(0.3, 1.6, 6)
        delta = 1e-5
        derivative = (radial(first, r + delta) - radial(first, r - delta)) / (2 * delta)
        second = radial(second_virial(V), r)
        assert_allclose(second, r * derivative, rtol=1e-6, atol=1e-9)

    def test_gaussian_virial_closed_form(self):
        V = gaussian_well(a=1.0, width=1.0)
        r = np.array([0.5, 1.0, 2.0])
        assert_allclose(radial(virial(V), r), 2 * r * r * np.exp(-r * r))

    def test_tabulated_virial(self, table_field):
        V = Potential.tabulated(table_field)
        vmap = virial(V)
        grid = table_field.grid
        r2 = grid.radius**2
        expected = 0.5 * r2 * np.exp(-r2 / 4)
        interior = ~vmap.boundary_mask
        assert_allclose(vmap.on_grid(grid)[interior], expected[interior], atol=1e-2)
        assert np.all(vmap.on_grid(grid)[vmap.boundary_mask] == 0.0)

    def test_second_virial_needs_analytic_kind(self, table_field):
        with pytest.raises(UnsupportedKindError):
            second_virial(Potential.tabulated(table_field))


class TestTabulated:
    def test_nodes_are_exact(self, table_field):
        V = Potential.tabulated(table_field, a=2.0)
        assert_allclose(V.on_grid(table_field.grid), 2.0 * table_field.values.real)

    def test_zero_outside_table(self, table_field):
        V = Potential.tabulated(table_field)
        assert radial(V, [20.0])[0] == 0.0

    def test_from_config(self, table_field, tmp_path):
        path = write_field(tmp_path / "v.rsc", table_field)
        config = PotentialConfig(kind=TABULATED, a=1.5, path=str(path))
        V = Potential.from_config(config)
        assert V.kind == TABULATED
        assert_allclose(V.on_grid(table_field.grid), 1.5 * table_field.values.real)

    def test_from_config_analytic(self):
        V = Potential.from_config(PotentialConfig(kind=GAUSSIAN, a=0.5, width=2.0))
        assert V == gaussian_well(a=0.5, width=2.0)


class TestNorms:
    def test_decay_check_passes(self):
        report = decay_check(gaussian_well(), sigma=4.0, grid=make_grid(32, 8.0))
        assert report.passed
        assert report.to_dict()["cap"] == 1e3

    def test_decay_check_reports_peak(self):
        # <r>^4 e^{-r^2} peaks at r = 1 with value 4 / e
        report = decay_check(gaussian_well(a=20.0), 4.0, make_grid(32, 8.0), cap=10.0)
        assert not report.passed
        assert report.sup == pytest.approx(80 / np.e)
        assert report.argmax_radius == pytest.approx(1.0)

    def test_l3_norm_of_gaussian(self):
        # (int e^{-3 r^2})^{1/3} = sqrt(pi / 3)
        value = l3_norm(gaussian_well(a=2.0), make_grid(32, 8.0))
        assert value == pytest.approx(2.0 * np.sqrt(np.pi / 3), rel=1e-4)
