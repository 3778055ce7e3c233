"""
Unit tests for Birman-Schwinger assembly, threshold analysis and fits.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from relscat.core.config import ToleranceConfig
from relscat.core.error_handler import (
    DomainError,
    FitError,
    ResourceError,
    ThresholdError,
)
from relscat.spectral.birman_schwinger import (
    KATO_SOBOLEV_CONSTANT,
    BSDescriptor,
    analytic_coefficients,
    assemble_bs,
    bfun,
    bfun_factor,
    bs_spectrum,
    coupling_scan,
    factor_one_plus,
    invert_one_plus,
    invertibility_trace,
    kv_bound_check,
    kv_spectrum,
    loglog_fit,
    lowenergy_expansion_fit,
    radial_bins,
    scaled_b_limit,
    spectral_norm,
    support_set,
    threshold_projection,
    tune_critical_coupling,
    zero_mode_profile,
)
from relscat.spectral.grid import make_grid
from relscat.spectral.kernel_ops import RadialKernel, cached_op
from relscat.spectral.potential import BUMP, Potential
from tests.fixtures import gaussian_well


@pytest.fixture(scope="module")
def grid():
    return make_grid(16, 4.0)


@pytest.fixture(scope="module")
def bump():
    return Potential(kind=BUMP, a=1.0, radius=1.5)


@pytest.fixture(scope="module")
def critical(bump, grid):
    return tune_critical_coupling(bump, grid)


class TestSupportSet:
    def test_bump_support(self, bump, grid):
        support = support_set(bump, grid)
        assert 0 < support.size < grid.n**3
        assert np.all(np.linalg.norm(support.points, axis=1) < 1.5)
        assert support.sign == -1
        assert support.mass_outside == pytest.approx(0.0, abs=1e-12)

    def test_scatter_gather(self, bump, grid):
        support = support_set(bump, grid)
        values = np.arange(support.size, dtype=complex)
        assert_allclose(support.gather(support.scatter(values)), values)
        assert np.count_nonzero(support.scatter(values).values) == support.size - 1

    def test_zero_potential(self, grid):
        support = support_set(gaussian_well(a=0.0), grid)
        assert support.size == 0
        assert assemble_bs(gaussian_well(a=0.0), BSDescriptor.g0(), grid).size == 0

    def test_dense_limit(self, bump, grid):
        with pytest.raises(ResourceError):
            support_set(bump, grid, ToleranceConfig(dense_limit=10))


class TestDescriptor:
    def test_kernel_mapping(self):
        assert BSDescriptor.resolvent(0.0).kernel() == RadialKernel("g0")
        assert BSDescriptor.resolvent(0.5, -1).kernel() == RadialKernel(
            "glambda", 0.5, sign=-1
        )
        assert BSDescriptor.q0().kernel() == RadialKernel("q0")

    def test_rejects(self):
        with pytest.raises(DomainError):
            BSDescriptor("poisson")
        with pytest.raises(DomainError):
            BSDescriptor.resolvent(-1.0)


class TestAssembly:
    @pytest.mark.parametrize(
        "descriptor",
        [BSDescriptor.g0(), BSDescriptor.q0(), BSDescriptor.resolvent(1.0, 1)],
        ids=["g0", "q0", "resolvent"],
    )
    def test_matches_operator_route(self, bump, grid, descriptor):
        """A x = u0 K (v0 x) computed by the FFT convolution."""
        A = assemble_bs(bump, descriptor, grid)
        support = A.support
        x = np.random.default_rng(3).standard_normal(A.size) + 0j
        op = cached_op(descriptor.kernel(), grid)
        brute = support.u0 * support.gather(op.apply(support.scatter(support.v0 * x)))
        assert_allclose(A.matrix @ x, brute, atol=1e-10 * np.abs(brute).max())

    def test_one_sign_spectrum_is_symmetric(self, bump, grid):
        spectrum = bs_spectrum(assemble_bs(bump, BSDescriptor.g0(), grid))
        assert spectrum.symmetric
        assert spectrum.imag_residue < 1e-12
        assert np.all(np.diff(spectrum.eigenvalues) >= 0)
        # attractive: u0 G0 v0 is negative definite
        assert spectrum.eigenvalues.max() < 0
        vectors = spectrum.vectors
        gram = vectors.conj().T @ vectors
        assert_allclose(gram, np.eye(vectors.shape[1]), atol=1e-10)

    def test_mixed_sign_uses_general_solver(self, grid):
        def shell(x, y, z):
            r2 = x * x + y * y + z * z
            return (r2 - 1) * np.exp(-r2)

        f = grid.field_from(shell)
        V = Potential.tabulated(f)
        A = assemble_bs(V, BSDescriptor.g0(), grid, ToleranceConfig(v_cut_rel=0.1))
        assert A.support.sign == 0
        spectrum = bs_spectrum(A)
        assert not spectrum.symmetric
        assert spectrum.eigenvalues.shape == (A.size,)

    def test_spectral_norm(self):
        rng = np.random.default_rng(5)
        small = rng.standard_normal((20, 20))
        large = rng.standard_normal((300, 300))
        assert spectral_norm(small) == pytest.approx(np.linalg.norm(small, 2))
        assert spectral_norm(large) == pytest.approx(np.linalg.norm(large, 2), rel=1e-6)
        assert spectral_norm(np.zeros((0, 0))) == 0.0


class TestInverse:
    def test_invert_one_plus(self):
        A = 0.1 * np.random.default_rng(2).standard_normal((6, 6))
        result = invert_one_plus(A)
        assert_allclose(result.matrix @ (np.eye(6) + A), np.eye(6), atol=1e-12)
        assert result.condition >= 1.0

    def test_singular(self):
        with pytest.raises(ThresholdError):
            invert_one_plus(-np.eye(3), energy=0.5)

    def test_bfun(self, bump, grid):
        B = bfun(bump, 0.5, 1, grid)
        A = assemble_bs(bump, BSDescriptor.resolvent(0.5, 1), grid)
        assert_allclose(A.one_plus() @ B, np.eye(A.size), atol=1e-10)

    def test_factor_beyond_dense_limit(self):
        rng = np.random.default_rng(5)
        A = rng.standard_normal((300, 300)) + 1j * rng.standard_normal((300, 300))
        A *= 0.5 / np.linalg.norm(A, 2)
        factor = factor_one_plus(A)
        M = np.eye(300) + A
        rhs = rng.standard_normal((300, 2)) + 0j
        assert factor.size == 300
        assert_allclose(factor.solve(rhs), np.linalg.solve(M, rhs), atol=1e-10)
        assert_allclose(
            factor.solve_adjoint(rhs), np.linalg.solve(M.conj().T, rhs), atol=1e-10
        )
        sv = np.linalg.svd(M, compute_uv=False)
        assert factor.smallest_singular_value == pytest.approx(sv[-1], rel=1e-6)
        assert factor.condition == pytest.approx(sv[0] / sv[-1], rel=1e-6)

    def test_factor_singular_beyond_dense_limit(self):
        A = -np.eye(300)
        A[0, 0] = 0.0
        with pytest.raises(ThresholdError):
            factor_one_plus(A, energy=0.5)

    def test_factor_empty(self):
        factor = factor_one_plus(np.zeros((0, 0)))
        assert factor.size == 0
        assert factor.solve(np.zeros(0)).shape == (0,)

    def test_conjugate_solve_is_opposite_sign(self, bump, grid):
        plus = bfun_factor(bump, 0.5, 1, grid)
        minus = bfun(bump, 0.5, -1, grid)
        rhs = np.random.default_rng(6).standard_normal(plus.size) + 0j
        assert_allclose(plus.solve_conjugate(rhs), minus @ rhs, atol=1e-10)
        assert_allclose(plus.inverse(), bfun(bump, 0.5, 1, grid), atol=1e-10)

    def test_bfun_at_critical_coupling(self, bump, grid, critical):
        with pytest.raises(ThresholdError):
            bfun(bump.with_coupling(critical), 0.0, 1, grid)

    def test_invertibility_trace(self, bump, grid):
        trace = invertibility_trace(bump, [0.25, 0.5, 1.0], grid)
        assert trace.shape == (3,)
        assert np.all(trace > 0)


class TestThreshold:
    def test_tuned_coupling_is_first_critical(self, bump, grid, critical):
        report = coupling_scan(bump, (0.0, 1e4), grid)
        assert report.critical_couplings[0] == pytest.approx(critical, rel=1e-8)
        assert report.projection_rank == 0
        assert report.invertible
        assert report.unit_spectrum_min == pytest.approx(-1 / critical, rel=1e-8)

    def test_scan_at_critical_coupling(self, bump, grid, critical):
        V = bump.with_coupling(critical)
        report = coupling_scan(V, (0.0, 1e4), grid)
        assert report.projection_rank == 1
        assert report.smallest_singular_value > 0
        assert report.terrible_scalar is not None
        assert report.to_dict()["terrible_scalar"] == [
            report.terrible_scalar.real,
            report.terrible_scalar.imag,
        ]
        assert threshold_projection(V, grid).rank == 1

    def test_no_critical_coupling_on_repulsive_side(self, bump, grid):
        assert coupling_scan(bump, (-1e4, 0.0), grid).critical_couplings == []

    def test_repulsive_shape_cannot_be_tuned(self, grid):
        f = grid.field_from(lambda x, y, z: np.exp(-(x * x + y * y + z * z)))
        tol = ToleranceConfig(v_cut_rel=0.1)
        with pytest.raises(DomainError):
            tune_critical_coupling(Potential.tabulated(f), grid, tol)

    def test_generic_projection(self, bump, grid):
        P = threshold_projection(bump, grid)
        assert P.rank == 0
        assert P.matrix.shape == (P.support.size, P.support.size)


class TestKatoSobolev:
    def test_bound_holds(self, grid):
        report = kv_bound_check(gaussian_well(a=1.0), grid)
        assert report.passed
        assert report.bound == pytest.approx(KATO_SOBOLEV_CONSTANT * report.l3)
        assert report.to_dict()["converged"]

    def test_zero_potential(self, grid):
        assert kv_bound_check(gaussian_well(a=0.0), grid).estimate == 0.0
        assert_allclose(kv_spectrum(gaussian_well(a=0.0), grid, k=3), np.zeros(3))

    def test_attractive_spectrum_is_negative(self, grid):
        values = kv_spectrum(gaussian_well(a=1.0), grid, k=3)
        assert np.all(np.diff(values) >= 0)
        assert values[0] < 0
        norm = kv_bound_check(gaussian_well(a=1.0), grid).estimate
        assert abs(values[0]) == pytest.approx(norm, rel=1e-6)


class TestFits:
    def test_loglog_slope(self):
        x = np.geomspace(0.1, 1.0, 5)
        fit = loglog_fit(x, 3 * x**2)
        assert fit.exponent == pytest.approx(2.0)
        assert fit.intercept == pytest.approx(np.log(3.0))
        assert fit.residual < 1e-12

    @pytest.mark.parametrize(
        "x, y",
        [
            ([1.0], [1.0]),
            ([1.0, 2.0], [1.0, -1.0]),
            ([2.0, 2.0], [1.0, 3.0]),
            ([1.0, 2.0], [1.0]),
        ],
    )
    def test_degenerate(self, x, y):
        with pytest.raises(FitError):
            loglog_fit(x, y)

    def test_radial_bins(self, grid):
        radii, means = radial_bins(grid.radius, grid, 1.0, 3.0, bins=4)
        assert_allclose(radii, means)
        assert np.all(np.diff(radii) > 0)


class TestLowEnergy:
    def test_expansion_orders(self, bump, grid):
        fit = lowenergy_expansion_fit(bump, np.geomspace(0.01, 0.3, 6), grid)
        assert fit.residual_exponent >= 1.35
        assert 1.35 <= fit.log_part_exponent <= 1.65
        assert fit.k_part_exponent == pytest.approx(2.0, abs=0.1)
        assert fit.first_order_monotone
        assert len(fit.to_dict()["eps"]) == 6

    def test_log_part_is_rank_one_log_term(self, bump, grid):
        # rank one eps^2 ln(eps) u0 v0^T h^3 / (2 pi^2)
        eps = np.array([0.01, 0.02, 0.04, 0.08])
        fit = lowenergy_expansion_fit(bump, eps, grid)
        support = support_set(bump, grid)
        mass = np.sum(np.abs(support.u0 * support.v0)) * grid.cell_volume
        expected = eps**2 * np.abs(np.log(eps)) * mass / (2 * np.pi**2)
        assert_allclose(fit.log_part, expected, rtol=2e-2)
        # the full residual keeps the eps-independent eps^2 coefficient
        assert np.all(fit.residual > fit.log_part)

    def test_analytic_coefficients(self, bump, grid):
        support = support_set(bump, grid)
        plus, cubic = analytic_coefficients(support, grid, 1)
        minus, _ = analytic_coefficients(support, grid, -1)
        assert_allclose(minus, np.conj(plus))
        signs = np.sign(support.u0)[:, None] * np.sign(support.v0)
        assert np.all(cubic.real * signs <= 0)
        with pytest.raises(DomainError):
            analytic_coefficients(support, grid, 0)

    @pytest.mark.parametrize(
        "eps", [[0.1, 0.2, 0.3], [0.1, 0.2, 0.3, 0.5], [0.0, 0.1, 0.2, 0.3]]
    )
    def test_eps_domain(self, bump, grid, eps):
        with pytest.raises(DomainError):
            lowenergy_expansion_fit(bump, eps, grid)


class TestScaledB:
    def test_generic_limit_vanishes(self, bump, grid):
        limit = scaled_b_limit(bump, 1.0, [0.0, -2.0, -4.0], grid)
        assert limit.projection_rank == 0
        assert limit.norms[-1] < limit.norms[0]
        assert limit.distance == pytest.approx(limit.norms[-1])

    def test_tau_order(self, bump, grid):
        with pytest.raises(DomainError):
            scaled_b_limit(bump, 1.0, [-1.0, 0.0], grid)


class TestZeroMode:
    def test_needs_threshold_eigenvalue(self, bump, grid):
        with pytest.raises(DomainError):
            zero_mode_profile(bump, grid)

    def test_profile_at_critical_coupling(self, bump, grid, critical):
        profile = zero_mode_profile(bump.with_coupling(critical), grid)
        assert profile.kernel == "g0"
        assert profile.radii.size >= 4
        assert np.all(profile.profile > 0)
        assert profile.h_field.grid == grid
        assert profile.to_dict()["exponent"] == profile.exponent
