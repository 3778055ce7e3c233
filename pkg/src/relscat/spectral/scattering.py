"""
Trace operator, spectral density, generalized eigenfunctions and S(lambda).

Fourier values off the FFT lattice are direct sums

    f^(k) = (2 pi)^{-3/2} h^3 sum_x f(x) exp(-i k.x)

over the nodes where f is not negligible. F0(lambda) f = lambda f^(lambda omega)
on the nodes of a SphereQuad; the scattering matrix acts on coefficient
vectors on those nodes and is unitary in the weighted inner product.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from ..core.config import ToleranceConfig
from ..core.error_handler import DomainError
from .birman_schwinger import (
    SupportSet,
    bfun_factor,
    loglog_fit,
    spectral_norm,
    support_set,
)
from .grid import Field, Grid3, SphereQuad, inner, sphere_quad
from .kernel_ops import apply_eprime, apply_resolvent
from .potential import Potential

logger = logging.getLogger("relscat.spectral.scattering")

_K_CHUNK = 512
_SYNTH_CHUNK = 64


def _check_energy(lam: float, grid: Grid3) -> None:
    if not lam > 0:
        raise DomainError(f"energy must be positive, got {lam}")
    if lam >= grid.k_nyquist:
        raise DomainError(
            f"energy {lam} is not below the grid Nyquist {grid.k_nyquist:.4f}"
        )


def fourier_at(f: Field, kvecs: np.ndarray) -> np.ndarray:
    """
    Continuum-normalized f^ at arbitrary wave vectors by direct summation.

    exp(-i k.x) factors over the axes, so the sum is three contractions
    against per-axis phase tables.
    """
    kvecs = np.atleast_2d(np.asarray(kvecs, dtype=float))
    grid = f.grid
    n = grid.n
    axis = grid.axis
    flat = f.values.reshape(n * n, n)
    out = np.zeros(len(kvecs), dtype=complex)
    for start in range(0, len(kvecs), _K_CHUNK):
        part = kvecs[start : start + _K_CHUNK]
        ex, ey, ez = (
            np.exp(-1j * part[:, a, None] * axis[None, :]) for a in range(3)
        )
        along_z = (flat @ ez.T).reshape(n, n, len(part))
        along_y = np.einsum("xyk,ky->xk", along_z, ey)
        out[start : start + len(part)] = np.einsum("xk,kx->k", along_y, ex)
    return grid.cell_volume / (2.0 * np.pi) ** 1.5 * out


@dataclass(frozen=True, eq=False)
class SphereFunction:
    """Values on the nodes of a sphere quadrature."""

    quad: SphereQuad
    values: np.ndarray

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.quad.weights * np.abs(self.values) ** 2)))

    def inner(self, other: "SphereFunction") -> complex:
        return self.quad.inner(self.values, other.values)


def f0_trace(lam: float, f: Field, quad: SphereQuad) -> SphereFunction:
    """
    [F0(lam) f](omega) = lam f^(lam omega).

    Raises:
        DomainError: lam not in (0, Nyquist)
    """
    _check_energy(lam, f.grid)
    return SphereFunction(quad, lam * fourier_at(f, lam * quad.nodes))


def f0_norm_squared(
    f: Field, quad: SphereQuad, lam_max: Optional[float] = None, nodes: int = 48
) -> float:
    """int_0^lam_max ||F0(lam) f||^2 dlam by Gauss-Legendre in lam."""
    grid = f.grid
    top = min(lam_max if lam_max is not None else np.inf, 0.999 * grid.k_nyquist)
    x, w = leggauss(nodes)
    lams = 0.5 * top * (x + 1.0)
    weights = 0.5 * top * w
    total = 0.0
    for lam, weight in zip(lams, weights):
        total += weight * f0_trace(float(lam), f, quad).norm() ** 2
    return float(total)


@dataclass(frozen=True)
class EprimeForm:
    kernel_route: complex
    sphere_route: complex

    @property
    def discrepancy(self) -> float:
        scale = max(abs(self.kernel_route), abs(self.sphere_route), 1e-300)
        return abs(self.kernel_route - self.sphere_route) / scale

    def to_dict(self) -> Dict:
        return {
            "kernel_route": [self.kernel_route.real, self.kernel_route.imag],
            "sphere_route": [self.sphere_route.real, self.sphere_route.imag],
            "discrepancy": self.discrepancy,
        }


def eprime_quadform(f: Field, g: Field, lam: float, order: int = 32) -> EprimeForm:
    """
    <f, E0'(lam) g> by the sin kernel and by lam^2 <f^, g^> on the sphere |k| = lam.
    """
    _check_energy(lam, f.grid)
    kernel_route = inner(f, apply_eprime(lam, g))
    quad = sphere_quad(order)
    kv = lam * quad.nodes
    sphere_route = lam * lam * quad.inner(fourier_at(f, kv), fourier_at(g, kv))
    form = EprimeForm(complex(kernel_route), complex(sphere_route))
    logger.debug(f"E0'({lam}) form: discrepancy {form.discrepancy:.3e}")
    return form


# generalized eigenfunctions


@dataclass(frozen=True, eq=False)
class GenEigenfunction:
    k: np.ndarray
    sign: int
    phi: Field = field(repr=False)
    residual: float

    def to_dict(self) -> Dict:
        return {
            "k": self.k.tolist(),
            "sign": self.sign,
            "residual": self.residual,
            "sup": float(np.abs(self.phi.values).max()),
        }


def gen_eigenfunction(
    V: Potential,
    k: Sequence[float],
    sign: int,
    grid: Grid3,
    tol: Optional[ToleranceConfig] = None,
) -> GenEigenfunction:
    """
    phi^{+-} = phi0 - R0(lam -+ i0) v0 B(lam -+ i0) u0 phi0 with lam = |k|.

    The residual of phi + R0(lam -+ i0) V phi = phi0 is measured on the support.

    Raises:
        DomainError: |k| = 0 or beyond Nyquist
        ThresholdError: 1 + A singular
    """
    kvec = np.asarray(k, dtype=float)
    lam = float(np.linalg.norm(kvec))
    _check_energy(lam, grid)
    phi0 = grid.plane_wave(kvec)
    support = support_set(V, grid, tol)
    if support.size == 0:
        return GenEigenfunction(kvec, sign, phi0, 0.0)

    phi0_s = support.gather(phi0)
    B = bfun_factor(V, lam, -sign, grid, tol, support)
    density = support.scatter(support.v0 * B.solve(support.u0 * phi0_s))
    phi = phi0 - apply_resolvent(lam, -sign, density)

    phi_s = support.gather(phi)
    V_s = support.u0 * support.v0
    back = support.gather(apply_resolvent(lam, -sign, support.scatter(V_s * phi_s)))
    defect = phi_s + back - phi0_s
    residual = float(np.linalg.norm(defect) / np.linalg.norm(phi0_s))
    logger.debug(f"Generalized eigenfunction |k|={lam:.4f} sign={sign}: residual {residual:.2e}")
    return GenEigenfunction(kvec, sign, phi, residual)


# shell-supported probes


@dataclass(frozen=True)
class ShellProbe:
    """
    g with g^(k) = chi(|k|) Y(k/|k|) exp(-i k.c), chi a smooth bump on [a, b].

    degree 0 uses Y = 1, degree 1 uses Y = sqrt(3) omega_z. The field is
    synthesized from the same k-quadrature the stationary pairings use.
    """

    a: float
    b: float
    degree: int = 0
    center: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    radial_nodes: int = 12
    order: int = 12

    def __post_init__(self) -> None:
        if not 0 < self.a < self.b:
            raise DomainError(f"shell needs 0 < a < b, got [{self.a}, {self.b}]")
        if self.degree not in (0, 1):
            raise DomainError("shell probes support degree 0 or 1")

    def radial_rule(self) -> Tuple[np.ndarray, np.ndarray]:
        x, w = leggauss(self.radial_nodes)
        half = 0.5 * (self.b - self.a)
        return self.a + half * (x + 1.0), half * w

    def quad(self) -> SphereQuad:
        return sphere_quad(self.order)

    def profile(self, kappa: np.ndarray) -> np.ndarray:
        s = (2.0 * kappa - self.a - self.b) / (self.b - self.a)
        out = np.zeros_like(kappa, dtype=float)
        inside = np.abs(s) < 1.0
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
        return out

    def hat(self, kvecs: np.ndarray) -> np.ndarray:
        kvecs = np.atleast_2d(kvecs)
        kappa = np.linalg.norm(kvecs, axis=1)
        value = self.profile(kappa).astype(complex)
        if self.degree == 1:
            value *= np.sqrt(3.0) * kvecs[:, 2] / np.where(kappa > 0, kappa, 1.0)
        return value * np.exp(-1j * kvecs @ np.asarray(self.center, dtype=float))

    def nodes(self) -> Tuple[np.ndarray, np.ndarray]:
        """All k-quadrature nodes of the shell with their weights."""
        kappa, w_r = self.radial_rule()
        quad = self.quad()
        kvecs = (kappa[:, None, None] * quad.nodes[None, :, :]).reshape(-1, 3)
        weights = ((w_r * kappa**2)[:, None] * quad.weights[None, :]).ravel()
        return kvecs, weights

    def synthesize(self, grid: Grid3) -> Field:
        """
        g(x) = (2 pi)^{-3/2} sum_m W_m g^(k_m) exp(i k_m.x).

        Raises:
            DomainError: shell reaches the grid Nyquist
        """
        if self.b >= grid.k_nyquist:
            raise DomainError(f"shell edge {self.b} violates Nyquist {grid.k_nyquist:.4f}")
        kvecs, weights = self.nodes()
        coeff = weights * self.hat(kvecs) / (2.0 * np.pi) ** 1.5
        axis = grid.axis
        values = np.zeros(grid.shape, dtype=complex)
        for start in range(0, len(coeff), _SYNTH_CHUNK):
            part = slice(start, start + _SYNTH_CHUNK)
            kx, ky, kz = kvecs[part, 0], kvecs[part, 1], kvecs[part, 2]
            ex = np.exp(1j * kx[:, None] * axis[None, :])
            ey = np.exp(1j * ky[:, None] * axis[None, :])
            ez = np.exp(1j * kz[:, None] * axis[None, :])
            tail = coeff[part, None, None] * ey[:, :, None] * ez[:, None, :]
            values += np.tensordot(ex, tail, axes=([0], [0]))
        return Field(grid, values)


def shell_probe(
    a: float,
    b: float,
    degree: int = 0,
    center: Sequence[float] = (0.0, 0.0, 0.0),
    radial_nodes: int = 12,
    order: int = 12,
) -> ShellProbe:
    return ShellProbe(
        float(a), float(b), degree, tuple(float(c) for c in center), radial_nodes, order
    )


# stationary wave operators


@dataclass(frozen=True)
class WavePairing:
    """<f, W g> from the eigenfunction expansion and from the resolvent form."""

    eigenfunction_form: complex
    resolvent_form: complex

    @property
    def value(self) -> complex:
        return self.eigenfunction_form

    @property
    def discrepancy(self) -> float:
        scale = max(abs(self.eigenfunction_form), abs(self.resolvent_form), 1e-300)
        return abs(self.eigenfunction_form - self.resolvent_form) / scale

    def to_dict(self) -> Dict:
        e, r = self.eigenfunction_form, self.resolvent_form
        return {
            "eigenfunction_form": [e.real, e.imag],
            "resolvent_form": [r.real, r.imag],
            "discrepancy": self.discrepancy,
        }


def _support_phases(support: SupportSet, kvecs: np.ndarray) -> np.ndarray:
    """exp(i k.x_p) as an (N, M) matrix."""
    return np.exp(1j * support.points @ kvecs.T)


def stationary_wave_pairing(
    V: Potential,
    f: Field,
    probe: ShellProbe,
    sign: int,
    tol: Optional[ToleranceConfig] = None,
) -> WavePairing:
    """
    <f, W_{+-} g> for the synthesized shell probe g.

    The eigenfunction form integrates <f, phi^{+-}(k)> g^(k) over the shell;
    the resolvent form integrates <(1 - V R(lam +- i0)) f, E0'(lam) g> in lam.
    B(lam -+ i0) enters the first and the sign-swapped factorization of
    B(lam +- i0) the second, so their agreement is a nontrivial check. One LU
    of 1 + A(lam -+ i0) serves both, B(lam +- i0) being its conjugate for real V.

    Raises:
        DomainError: shell beyond Nyquist
        ThresholdError: 1 + A singular at a shell energy
    """
    grid = f.grid
    if probe.b >= grid.k_nyquist:
        raise DomainError(f"shell edge {probe.b} violates Nyquist {grid.k_nyquist:.4f}")
    support = support_set(V, grid, tol)
    kappa, w_r = probe.radial_rule()
    quad = probe.quad()
    h3 = grid.cell_volume
    norm = (2.0 * np.pi) ** 1.5
    flip = np.sign(support.u0)

    eigen_form = 0.0 + 0.0j
    resolvent_form = 0.0 + 0.0j
    for lam, weight in zip(kappa, w_r):
        lam = float(lam)
        kv = lam * quad.nodes
        ghat = probe.hat(kv)
        fhat = fourier_at(f, kv)
        eigen_inner = norm * np.conj(fhat)
        psihat = fhat
        if support.size:
            phases = _support_phases(support, kv)
            r_s = support.gather(apply_resolvent(lam, sign, f))

            B_minus = bfun_factor(V, lam, -sign, grid, tol, support)
            w = support.v0[:, None] * B_minus.solve(support.u0[:, None] * phases)
            eigen_inner = eigen_inner - h3 * (np.conj(r_s) @ w)

            # (1 + v0 R0 u0)^{-1} = S B S with S = sgn(V) on the support;
            # B(lam +- i0) is the conjugate of B(lam -+ i0)
            swapped = flip * B_minus.solve_conjugate(flip * support.v0 * r_s)
            corr = support.u0 * swapped
            psihat = fhat - h3 / norm * (np.conj(phases).T @ corr)

        eigen_form += weight * lam**2 / norm * quad.integrate(eigen_inner * ghat)
        resolvent_form += weight * lam**2 * quad.inner(psihat, ghat)

    pairing = WavePairing(complex(eigen_form), complex(resolvent_form))
    logger.info(
        f"Stationary pairing sign={sign}: {pairing.value:.6e} "
        f"(forms differ by {pairing.discrepancy:.2e})"
    )
    return pairing


# scattering matrix


@dataclass(frozen=True, eq=False)
class SMatrix:
    """S(lam) acting on coefficient vectors on the quadrature nodes."""

    lam: float
    sign: int
    matrix: np.ndarray
    quad: SphereQuad = field(repr=False)

    def _weighted(self, matrix: np.ndarray) -> np.ndarray:
        root = np.sqrt(self.quad.weights)
        return root[:, None] * matrix / root[None, :]

    @property
    def unitary_frame(self) -> np.ndarray:
        """W^{1/2} S W^{-1/2}, unitary in the plain Euclidean sense."""
        return self._weighted(self.matrix)

    def adjoint(self) -> np.ndarray:
        """Adjoint in the weighted inner product, W^{-1} S^H W."""
        w = self.quad.weights
        return self.matrix.conj().T * w[None, :] / w[:, None]

    def minus_identity_norm(self) -> float:
        return spectral_norm(self.unitary_frame - np.eye(len(self.quad.weights)))

    def unitarity_defect(self) -> float:
        X = self.unitary_frame
        return spectral_norm(X.conj().T @ X - np.eye(X.shape[0]))

    def to_dict(self) -> Dict:
        return {
            "lambda": self.lam,
            "s_minus_identity_norm": self.minus_identity_norm(),
            "unitarity_defect": self.unitarity_defect(),
        }


def _trace_phases(support: SupportSet, lam: float, quad: SphereQuad) -> np.ndarray:
    """exp(-i lam omega_j . x_p) as an (M, N) matrix."""
    return np.exp(-1j * lam * quad.nodes @ support.points.T)


def smatrix(
    V: Potential,
    lam: float,
    quad: SphereQuad,
    grid: Grid3,
    sign: int = 1,
    tol: Optional[ToleranceConfig] = None,
) -> SMatrix:
    """
    S(lam) = 1 - 2 pi i F0(lam) u0 B(lam - i0)^* v0 F0(lam)^*  (sign = +1).

    sign = -1 gives 1 + 2 pi i F0 u0 B(lam + i0)^* v0 F0^*, the time-reversed matrix.

    Raises:
        DomainError: lam not in (0, Nyquist)
        ThresholdError: 1 + A singular
    """
    _check_energy(lam, grid)
    support = support_set(V, grid, tol)
    size = len(quad.weights)
    if support.size == 0:
        return SMatrix(lam, sign, np.eye(size, dtype=complex), quad)
    B = bfun_factor(V, lam, -sign, grid, tol, support)
    E = _trace_phases(support, lam, quad)
    # u0 B^H v0 h^3 applied to E^H
    core = B.solve_adjoint((support.v0 * grid.cell_volume)[:, None] * E.conj().T)
    c = lam**2 / (2.0 * np.pi) ** 3
    T = c * (E @ (support.u0[:, None] * core)) * quad.weights[None, :]
    S = np.eye(size, dtype=complex) - sign * 2j * np.pi * T
    result = SMatrix(lam, sign, S, quad)
    logger.debug(f"S({lam:.4g}) sign={sign}: ||S - 1|| = {result.minus_identity_norm():.3e}")
    return result


def born_term(V: Potential, lam: float, quad: SphereQuad, grid: Grid3) -> np.ndarray:
    """First-order S - 1 = -2 pi i F0(lam) V F0(lam)^*."""
    _check_energy(lam, grid)
    support = support_set(V, grid)
    size = len(quad.weights)
    if support.size == 0:
        return np.zeros((size, size), dtype=complex)
    E = _trace_phases(support, lam, quad)
    potential = support.u0 * support.v0 * grid.cell_volume
    c = lam**2 / (2.0 * np.pi) ** 3
    return -2j * np.pi * c * ((E * potential[None, :]) @ E.conj().T) * quad.weights[None, :]


def time_reversal_defect(
    V: Potential, lam: float, quad: SphereQuad, grid: Grid3, tol: Optional[ToleranceConfig] = None
) -> float:
    """||S_- - S_+^*|| in the weighted metric."""
    plus = smatrix(V, lam, quad, grid, 1, tol)
    minus = smatrix(V, lam, quad, grid, -1, tol)
    difference = minus.matrix - plus.adjoint()
    return spectral_norm(plus._weighted(difference))


@dataclass
class SMatrixFit:
    lams: np.ndarray
    norms: np.ndarray
    unitarity: np.ndarray
    exponent: float

    @property
    def monotone(self) -> bool:
        return bool(np.all(np.diff(self.norms) >= -0.05 * self.norms.max()))

    def to_dict(self) -> Dict:
        return {
            "lambda": self.lams.tolist(),
            "s_minus_identity_norm": self.norms.tolist(),
            "unitarity_defect": self.unitarity.tolist(),
            "exponent": self.exponent,
            "monotone": self.monotone,
        }


def smatrix_lowenergy_fit(
    V: Potential,
    lam_list: Sequence[float],
    quad: SphereQuad,
    grid: Grid3,
    tol: Optional[ToleranceConfig] = None,
) -> SMatrixFit:
    """
    ||S(lam) - 1|| along lam_list and its log-log exponent.

    Raises:
        DomainError: lam_list outside (0, 1] or fewer than four values
        FitError: degenerate fit
    """
    lams = np.sort(np.asarray(lam_list, dtype=float))
    if lams.size < 4 or np.any(lams <= 0) or np.any(lams > 1):
        raise DomainError("lam_list needs at least four values in (0, 1]")
    norms, unitarity = [], []
    for lam in lams:
        S = smatrix(V, float(lam), quad, grid, 1, tol)
        norms.append(S.minus_identity_norm())
        unitarity.append(S.unitarity_defect())
    exponent = loglog_fit(lams, norms).slope
    fit = SMatrixFit(lams, np.asarray(norms), np.asarray(unitarity), exponent)
    logger.info(f"||S(lam) - 1|| exponent {fit.exponent:.3f}")
    return fit
