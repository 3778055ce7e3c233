"""
Unit tests for the free groups, the kernel pairing and the split-step propagator.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate

from relscat.core.error_handler import ConfigError, DomainError
from relscat.spectral.dynamics import (
    PropagatorConfig,
    RadialProbe,
    SplittingPropagator,
    KernelPairing,
    TimeDependentPairing,
    correlation_mean,
    full_propagator_apply,
    propagator_apply,
    propagator_kernel_pairing,
    radial_multiplier_pairing,
    radial_transform,
    regularized_pairing,
    semigroup_apply,
    semigroup_kernel_apply,
    timedependent_wave_pairing,
)
from relscat.spectral.grid import inner, make_grid
from tests.fixtures import gaussian_well


@pytest.fixture(scope="module")
def grid():
    return make_grid(16, 4.0)


@pytest.fixture(scope="module")
def gaussian(grid):
    return grid.field_from(lambda x, y, z: np.exp(-(x * x + y * y + z * z)))


class TestFreeGroups:
    def test_semigroup_law(self, gaussian):
        composed = semigroup_apply(0.5, semigroup_apply(1.5, gaussian))
        expected = semigroup_apply(2.0, gaussian)
        assert_allclose(composed.values, expected.values, atol=1e-13)

    def test_semigroup_domain(self, gaussian):
        with pytest.raises(DomainError):
            semigroup_apply(0.0, gaussian)
        with pytest.raises(DomainError):
            semigroup_kernel_apply(-1.0, gaussian)

    def test_semigroup_preserves_mass(self, grid, gaussian):
        mass = grid.cell_volume * gaussian.values.sum()
        after = grid.cell_volume * semigroup_apply(1.0, gaussian).values.sum()
        assert after == pytest.approx(mass, rel=1e-12)

    def test_kernel_route_is_positive(self, gaussian):
        assert semigroup_kernel_apply(1.0, gaussian).values.real.min() > 0

    def test_padding_moves_tail_images_out(self, gaussian):
        kernel = semigroup_kernel_apply(1.0, gaussian)
        periodic = (semigroup_apply(1.0, gaussian) - kernel).norm()
        padded = (semigroup_apply(1.0, gaussian, pad=3) - kernel).norm()
        assert padded < periodic / 5
        with pytest.raises(DomainError):
            semigroup_apply(1.0, gaussian, pad=0)

    def test_propagator_is_unitary_group(self, gaussian):
        once = propagator_apply(0.7, gaussian)
        assert once.norm() == pytest.approx(gaussian.norm(), rel=1e-12)
        composed = propagator_apply(-0.2, once)
        expected = propagator_apply(0.5, gaussian)
        assert_allclose(composed.values, expected.values, atol=1e-13)
        back = propagator_apply(-0.7, once)
        assert_allclose(back.values, gaussian.values, atol=1e-13)

    def test_zero_time_copies(self, gaussian):
        out = propagator_apply(0.0, gaussian)
        assert out is not gaussian
        assert_allclose(out.values, gaussian.values)


class TestRadialProbe:
    def test_compact_support(self):
        probe = RadialProbe(1.5, amplitude=2.0)
        assert probe(np.array([0.0]))[0] == pytest.approx(2.0)
        assert probe(np.array([1.5, 3.0])).tolist() == [0.0, 0.0]

    def test_radius_check(self):
        with pytest.raises(DomainError):
            RadialProbe(0.0)

    def test_correlation_at_zero_is_inner_product(self):
        f, g = RadialProbe(1.5), RadialProbe(2.5)
        expected = integrate.quad(lambda r: 4 * np.pi * r * r * f(r) * g(r), 0, 1.5)[0]
        assert correlation_mean(f, g, 0.0) == pytest.approx(expected, rel=1e-7)

    def test_correlation_vanishes_beyond_supports(self):
        assert correlation_mean(RadialProbe(1.0), RadialProbe(1.0), 2.5) == 0.0


class TestKernelPairing:
    def test_reversed_time_is_conjugate(self):
        f, g = RadialProbe(1.5), RadialProbe(2.5)
        forward = regularized_pairing(1.0, 0.1, f, g)
        backward = regularized_pairing(-1.0, 0.1, f, g)
        assert backward == pytest.approx(np.conj(forward), rel=1e-8)

    def test_needs_regularization(self):
        with pytest.raises(DomainError):
            regularized_pairing(1.0, 0.0, RadialProbe(1.0), RadialProbe(1.0))

    def test_argument_checks(self, grid):
        f = RadialProbe(1.0)
        with pytest.raises(DomainError):
            propagator_kernel_pairing(0.0, f, f, grid)
        with pytest.raises(DomainError):
            propagator_kernel_pairing(1.0, f, f, grid, eps_list=[0.1, 0.05])

    def test_imaginary_time_matches_multiplier(self):
        # t = -i gives the semigroup exp(-H0)
        f, g = RadialProbe(1.5), RadialProbe(2.5)
        pairing = propagator_kernel_pairing(-1j, f, g, make_grid(32, 8.0))
        assert pairing.relative_error <= 1e-3
        assert pairing.grid_relative_error is not None
        assert pairing.to_dict()["t"] == [0.0, -1.0]

    def test_real_time_matches_radial_multiplier(self):
        f, g = RadialProbe(1.5), RadialProbe(2.5)
        pairing = propagator_kernel_pairing(1.0, f, g)
        assert pairing.relative_error <= 1e-2
        assert pairing.eps_order >= 0.9
        assert pairing.grid_relative_error is None
        assert "grid_relative_error" not in pairing.to_dict()

    def test_eps_order_of_linear_error(self):
        eps = np.array([0.2, 0.1, 0.05])
        pairing = KernelPairing(1.0, eps, 2.0 + 0.3 * eps, 2.0, 2.0)
        assert pairing.eps_order == pytest.approx(1.0)
        bent = KernelPairing(1.0, eps, 2.0 + 0.3 * eps - 0.2 * eps**2, 2.0, 2.0)
        assert 0.9 < bent.eps_order < 1.0


class TestRadialMultiplier:
    def test_transform_at_zero_is_mass(self):
        probe = RadialProbe(1.5)
        mass = integrate.quad(lambda r: 4 * np.pi * r * r * probe(r), 0, 1.5)[0]
        value = radial_transform(probe, np.array([0.0]))[0]
        assert value == pytest.approx(mass / (2 * np.pi) ** 1.5, rel=1e-8)

    def test_zero_time_is_inner_product(self):
        f, g = RadialProbe(1.5), RadialProbe(2.5)
        expected = correlation_mean(f, g, 0.0)
        assert radial_multiplier_pairing(0.0, f, g) == pytest.approx(expected, rel=1e-7)

    def test_reversed_time_is_conjugate(self):
        f, g = RadialProbe(1.5), RadialProbe(2.5)
        forward = radial_multiplier_pairing(1.0, f, g)
        assert radial_multiplier_pairing(-1.0, f, g) == pytest.approx(np.conj(forward))


class TestSteps:
    def test_config_validation(self):
        assert PropagatorConfig(t=1.0, dt=0.125).validate()
        assert PropagatorConfig(t=-1.0, dt=0.125).steps == 8
        assert not PropagatorConfig(t=1.0, dt=0.3).validate()
        assert not PropagatorConfig(t=1.0, dt=0.1, eps_list=(0.05, 0.1)).validate()

    @pytest.mark.parametrize("t, dt", [(1.0, 0.0), (1.0, 0.3)])
    def test_bad_steps(self, gaussian, t, dt):
        with pytest.raises(ConfigError):
            full_propagator_apply(gaussian_well(a=0.0), t, dt, gaussian)

    def test_cfl(self, grid):
        # max |k| on this grid is 2 pi sqrt(3)
        with pytest.raises(ConfigError):
            SplittingPropagator(gaussian_well(), grid, 0.1)


class TestSplitting:
    def test_free_case_is_exact(self, gaussian):
        out = full_propagator_apply(gaussian_well(a=0.0), 0.4, 0.04, gaussian)
        assert_allclose(out.values, propagator_apply(0.4, gaussian).values)

    def test_unitary_and_reversible(self, grid, gaussian):
        V = gaussian_well(a=2.0)
        forward = full_propagator_apply(V, 0.4, 0.04, gaussian)
        assert forward.norm() == pytest.approx(gaussian.norm(), rel=1e-12)
        back = full_propagator_apply(V, -0.4, 0.04, forward)
        assert_allclose(back.values, gaussian.values, atol=1e-12)

    def test_callback_sees_every_step(self, grid, gaussian):
        seen = []
        propagator = SplittingPropagator(gaussian_well(), grid, 0.04)
        propagator.run(gaussian, -0.2, callback=lambda j, t, psi: seen.append((j, t)))
        assert [j for j, _ in seen] == [1, 2, 3, 4, 5]
        assert seen[-1][1] == pytest.approx(-0.2)


class TestTimeDependentPairing:
    def test_free_pairing_is_constant(self, grid, gaussian):
        g = grid.field_from(lambda x, y, z: np.exp(-((x - 0.5) ** 2 + y * y + z * z)))
        free = gaussian_well(a=0.0)
        result = timedependent_wave_pairing(free, gaussian, g, 2.0, 0.04)
        assert_allclose(result.pairings, inner(gaussian, g), rtol=1e-10)
        assert result.stabilized
        assert result.warnings == []

    def test_interacting_run(self, grid, gaussian):
        result = timedependent_wave_pairing(
            gaussian_well(a=1.0), gaussian, gaussian, 2.0, 0.04, sign=-1, record_every=5
        )
        assert result.times[-1] == pytest.approx(-2.0)
        assert np.all(np.diff(result.times) < 0)
        assert_allclose(result.norms, gaussian.norm(), rtol=1e-10)
        assert set(result.time_series()) == {"t", "norm", "pairing_re", "pairing_im"}
        assert result.to_dict()["sign"] == -1

    def test_wraparound_limit(self, grid, gaussian):
        with pytest.raises(ConfigError):
            timedependent_wave_pairing(gaussian_well(), gaussian, gaussian, 3.5, 0.04)

    def test_abelian_mean_of_constant(self):
        times = np.linspace(0.0, 10.0, 1001)
        pairing = TimeDependentPairing(
            T=10.0,
            sign=1,
            times=times,
            pairings=np.full(times.size, 2.0 + 1.0j),
            norms=np.ones(times.size),
            variation=0.0,
            scale=1.0,
        )
        assert pairing.abelian(0.1) == pytest.approx(2.0 + 1.0j, rel=1e-5)

    def test_unsettled_pairing(self):
        pairing = TimeDependentPairing(
            T=1.0,
            sign=1,
            times=np.array([0.0, 1.0]),
            pairings=np.array([0.0, 1.0]),
            norms=np.ones(2),
            variation=1.0,
            scale=1.0,
        )
        assert not pairing.stabilized
