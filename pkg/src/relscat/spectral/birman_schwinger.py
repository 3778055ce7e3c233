"""
Birman-Schwinger matrices on the support of a potential.

With V = u0 v0 and a convolution kernel k the dense matrix

    A_pq = u0(x_p) k(x_p - x_q) v0(x_q) h^3

acts on the nodes where v0 is not negligible. B(z) = (1 + A(z))^{-1}, and the
eigenvalue -1 of u0 G0 v0 marks the couplings at which zero becomes a
threshold eigenvalue.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh, svds
from scipy.spatial.distance import cdist

from ..core.config import ToleranceConfig
from ..core.error_handler import (
    DomainError,
    FitError,
    NumericalError,
    ResourceError,
    ThresholdError,
)
from .grid import Field, Grid3, quarter_inverse_laplacian
from .kernel_ops import (
    RadialKernel,
    ball_radius,
    cached_op,
    check_resolution,
    kernel_matrix,
)
from .potential import Potential, factorize_on_grid, l3_norm

logger = logging.getLogger("relscat.spectral.birman_schwinger")

KATO_SOBOLEV_CONSTANT = 2.0 ** (-1.0 / 3.0) * np.pi ** (-2.0 / 3.0)
DISCRETIZATION_SLACK = 5e-2
DESCRIPTOR_KINDS = ("resolvent", "g0", "q0", "klambda", "mlambda")
DENSE_SVD_LIMIT = 256


def _tolerances(tol: Optional[ToleranceConfig]) -> ToleranceConfig:
    return tol if tol is not None else ToleranceConfig()


@dataclass(frozen=True, eq=False)
class SupportSet:
    """Grid nodes carrying v0 above the cut, with the factor values there."""

    grid: Grid3
    index: np.ndarray
    points: np.ndarray
    v0: np.ndarray
    u0: np.ndarray
    mass_outside: float

    @property
    def size(self) -> int:
        return len(self.index)

    @property
    def sign(self) -> int:
        """Common sign of V on the support, 0 when it changes sign."""
        signs = np.unique(np.sign(self.u0))
        if len(signs) == 1:
            return int(signs[0])
        return 0

    def scatter(self, values: np.ndarray) -> Field:
        """Field equal to values on the support and zero elsewhere."""
        out = np.zeros(self.grid.n**3, dtype=complex)
        out[self.index] = values
        return Field(self.grid, out)

    def gather(self, f: Field) -> np.ndarray:
        self.grid.check(f)
        return f.values.ravel()[self.index]


def support_set(V: Potential, grid: Grid3, tol: Optional[ToleranceConfig] = None) -> SupportSet:
    """
    Nodes where v0 > v_cut_rel * max v0.

    Raises:
        ResourceError: more nodes than the dense limit
    """
    tol = _tolerances(tol)
    v0, u0 = factorize_on_grid(V, grid)
    v0 = v0.ravel()
    u0 = u0.ravel()
    peak = float(v0.max()) if v0.size else 0.0
    if peak == 0.0:
        empty = np.zeros(0, dtype=int)
        return SupportSet(grid, empty, np.zeros((0, 3)), np.zeros(0), np.zeros(0), 0.0)

    keep = v0 > tol.v_cut_rel * peak
    index = np.flatnonzero(keep)
    if len(index) > tol.dense_limit:
        ratio = (tol.dense_limit / len(index)) ** (1.0 / 3.0)
        suggested = max(16, 2 * int(grid.n * ratio / 2))
        raise ResourceError(
            f"support has {len(index)} nodes, dense limit is {tol.dense_limit}",
            hint=f"downsample to n <= {suggested} or raise v_cut_rel",
        )

    mass = float(np.sum(v0[~keep] ** 2) / np.sum(v0**2))
    if mass > tol.support_mass:
        logger.warning(
            f"Support cut drops {mass:.2e} of the v0^2 mass (limit {tol.support_mass:.0e})"
        )

    x, y, z = np.unravel_index(index, grid.shape)
    axis = grid.axis
    points = np.stack([axis[x], axis[y], axis[z]], axis=1)
    logger.debug(f"Support set: {len(index)} of {grid.n ** 3} nodes, outside mass {mass:.2e}")
    return SupportSet(grid, index, points, v0[index], u0[index], mass)


@dataclass(frozen=True)
class BSDescriptor:
    """Which kernel sits between u0 and v0."""

    kind: str = "resolvent"
    lam: float = 0.0
    sign: int = 1

    def __post_init__(self) -> None:
        if self.kind not in DESCRIPTOR_KINDS:
            raise DomainError(f"unknown descriptor kind '{self.kind}'")
        if self.lam < 0:
            raise DomainError("lambda must be nonnegative")

    @classmethod
    def resolvent(cls, lam: float, sign: int = 1) -> "BSDescriptor":
        return cls("resolvent", float(lam), sign)

    @classmethod
    def g0(cls) -> "BSDescriptor":
        return cls("g0")

    @classmethod
    def q0(cls) -> "BSDescriptor":
        return cls("q0")

    def kernel(self) -> RadialKernel:
        if self.kind == "resolvent":
            if self.lam == 0.0:
                return RadialKernel("g0")
            return RadialKernel("glambda", self.lam, sign=self.sign)
        if self.kind in ("g0", "q0"):
            return RadialKernel(self.kind)
        return RadialKernel(self.kind, self.lam, sign=self.sign)


@dataclass(frozen=True, eq=False)
class BSMatrix:
    descriptor: BSDescriptor
    support: SupportSet
    matrix: np.ndarray

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def one_plus(self) -> np.ndarray:
        return np.eye(self.size, dtype=complex) + self.matrix


def assemble_bs(
    V: Potential,
    descriptor: BSDescriptor,
    grid: Grid3,
    tol: Optional[ToleranceConfig] = None,
    support: Optional[SupportSet] = None,
) -> BSMatrix:
    """
    Dense u0 K v0 h^3 on the support set; diagonal cells use the ball average.

    Raises:
        ResourceError: support larger than the dense limit
        AssemblyError: kernel not resolved on the grid
    """
    if support is None:
        support = support_set(V, grid, tol)
    if support.size == 0:
        return BSMatrix(descriptor, support, np.zeros((0, 0), dtype=complex))
    k = descriptor.kernel()
    check_resolution(k, grid)
    K = kernel_matrix(k, support.points, grid.h)
    matrix = support.u0[:, None] * K * (support.v0[None, :] * grid.cell_volume)
    logger.debug(
        f"Assembled BS matrix {descriptor.kind} lam={descriptor.lam} "
        f"sign={descriptor.sign}: {support.size}x{support.size}"
    )
    return BSMatrix(descriptor, support, matrix)


def spectral_norm(matrix: np.ndarray) -> float:
    """Largest singular value; Lanczos for large matrices."""
    n = min(matrix.shape) if matrix.size else 0
    if n == 0:
        return 0.0
    if n <= DENSE_SVD_LIMIT:
        return float(scipy.linalg.svdvals(matrix)[0])
    start = np.full(matrix.shape[1], 1.0 / np.sqrt(matrix.shape[1]), dtype=matrix.dtype)
    return float(svds(matrix, k=1, v0=start, return_singular_vectors=False)[0])


# B(z) = (1 + A(z))^{-1}


@dataclass(frozen=True, eq=False)
class BInverse:
    matrix: np.ndarray
    smallest_singular_value: float
    condition: float


@dataclass(frozen=True, eq=False)
class BFactor:
    """LU factors of 1 + A; applies B = (1 + A)^{-1} without forming it."""

    lu: Tuple[np.ndarray, np.ndarray]
    smallest_singular_value: float
    condition: float

    @property
    def size(self) -> int:
        return self.lu[0].shape[0]

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """B rhs."""
        if self.size == 0:
            return np.asarray(rhs, dtype=complex)
        return scipy.linalg.lu_solve(self.lu, rhs)

    def solve_adjoint(self, rhs: np.ndarray) -> np.ndarray:
        """B^H rhs."""
        if self.size == 0:
            return np.asarray(rhs, dtype=complex)
        return scipy.linalg.lu_solve(self.lu, rhs, trans=2)

    def solve_conjugate(self, rhs: np.ndarray) -> np.ndarray:
        """conj(B) rhs; for real V this applies B(lam +- i0) given B(lam -+ i0)."""
        return np.conj(self.solve(np.conj(rhs)))

    def inverse(self) -> np.ndarray:
        return self.solve(np.eye(self.size, dtype=complex))


def _lanczos_range(
    one_plus: np.ndarray, lu: Tuple[np.ndarray, np.ndarray]
) -> Tuple[float, float]:
    """Largest and smallest singular value of 1 + A; the latter via the LU inverse."""
    n = one_plus.shape[0]
    if np.any(np.diag(lu[0]) == 0):
        return spectral_norm(one_plus), 0.0
    inverse = LinearOperator(
        (n, n),
        matvec=lambda x: scipy.linalg.lu_solve(lu, x),
        rmatvec=lambda x: scipy.linalg.lu_solve(lu, x, trans=2),
        dtype=complex,
    )
    start = np.full(n, 1.0 / np.sqrt(n), dtype=complex)
    top = svds(inverse, k=1, v0=start, return_singular_vectors=False)[0]
    return spectral_norm(one_plus), float(1.0 / top)


def factor_one_plus(
    matrix: np.ndarray, tol_inv: float = 1e-10, energy: Optional[float] = None
) -> BFactor:
    """
    LU factors of 1 + A with its extreme singular values.

    Up to DENSE_SVD_LIMIT rows the singular values come from a full SVD,
    beyond it from Lanczos on 1 + A and on the LU inverse.

    Raises:
        ThresholdError: smallest singular value of 1 + A at or below tol_inv
    """
    n = matrix.shape[0]
    if n == 0:
        empty = (np.zeros((0, 0), dtype=complex), np.zeros(0, dtype=np.int32))
        return BFactor(empty, 1.0, 1.0)
    one_plus = np.eye(n, dtype=complex) + matrix
    if n <= DENSE_SVD_LIMIT:
        sv = scipy.linalg.svdvals(one_plus)
        largest, smallest = float(sv[0]), float(sv[-1])
        lu = None
    else:
        lu = scipy.linalg.lu_factor(one_plus, check_finite=False)
        largest, smallest = _lanczos_range(one_plus, lu)
    if smallest <= tol_inv:
        raise ThresholdError(
            "1 + A is singular (threshold or eigenvalue hit)", smallest, energy
        )
    if lu is None:
        lu = scipy.linalg.lu_factor(one_plus, check_finite=False)
    condition = largest / smallest
    logger.debug(f"Factored 1 + A (n={n}, energy={energy}): cond={condition:.3e}")
    return BFactor(lu, smallest, condition)


def invert_one_plus(
    matrix: np.ndarray, tol_inv: float = 1e-10, energy: Optional[float] = None
) -> BInverse:
    """
    (1 + A)^{-1} by LU with partial pivoting.

    Raises:
        ThresholdError: smallest singular value of 1 + A at or below tol_inv
    """
    factor = factor_one_plus(matrix, tol_inv, energy)
    return BInverse(factor.inverse(), factor.smallest_singular_value, factor.condition)


def bfun_factor(
    V: Potential,
    lam: float,
    sign: int,
    grid: Grid3,
    tol: Optional[ToleranceConfig] = None,
    support: Optional[SupportSet] = None,
) -> BFactor:
    """
    B(lam +- i0) in factored form, for callers that only apply it.

    Raises:
        ThresholdError: 1 + A singular within tol_inv
    """
    tol = _tolerances(tol)
    A = assemble_bs(V, BSDescriptor.resolvent(lam, sign), grid, tol, support)
    return factor_one_plus(A.matrix, tol.tol_inv, energy=lam)


def bfun_report(
    V: Potential,
    lam: float,
    sign: int,
    grid: Grid3,
    tol: Optional[ToleranceConfig] = None,
    support: Optional[SupportSet] = None,
) -> BInverse:
    tol = _tolerances(tol)
    A = assemble_bs(V, BSDescriptor.resolvent(lam, sign), grid, tol, support)
    return invert_one_plus(A.matrix, tol.tol_inv, energy=lam)


def bfun(
    V: Potential,
    lam: float,
    sign: int,
    grid: Grid3,
    tol: Optional[ToleranceConfig] = None,
    support: Optional[SupportSet] = None,
) -> np.ndarray:
    """
    B(lam +- i0) = (1 + u0 R0(lam +- i0) v0)^{-1}; lam = 0 uses G0.

    Raises:
        ThresholdError: 1 + A singular within tol_inv
    """
    return bfun_report(V, lam, sign, grid, tol, support).matrix


def invertibility_trace(
    V: Potential,
    lams: Sequence[float],
    grid: Grid3,
    sign: int = 1,
    tol: Optional[ToleranceConfig] = None,
) -> np.ndarray:
    """Smallest singular value of 1 + A(lam) along lams."""
    support = support_set(V, grid, tol)
    out = []
    for lam in lams:
        A = assemble_bs(V, BSDescriptor.resolvent(lam, sign), grid, tol, support)
        out.append(scipy.linalg.svdvals(A.one_plus())[-1] if A.size else 1.0)
    return np.asarray(out, dtype=float)


# threshold analysis


@dataclass(frozen=True, eq=False)
class BSSpectrum:
    """
    Eigenpairs of a Birman-Schwinger matrix, ascending.

    For a potential of one sign the matrix is symmetric and the vectors are
    orthonormal; otherwise they come from the general eigensolver.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    imag_residue: float
    symmetric: bool


def bs_spectrum(A: BSMatrix) -> BSSpectrum:
    """
    Raises:
        NumericalError: eigensolver did not converge
    """
    if A.size == 0:
        return BSSpectrum(np.zeros(0), np.zeros((0, 0)), 0.0, True)
    s = A.support.sign
    try:
        if s != 0:
            # A = s * diag(v0) K diag(v0) h^3 with K symmetric
            frame = s * A.matrix
            sym = 0.5 * (frame + frame.conj().T)
            residue = float(np.max(np.abs(frame - sym)))
            values, vectors = scipy.linalg.eigh(sym)
            values = s * values
            order = np.argsort(values)
            return BSSpectrum(values[order], vectors[:, order], residue, True)
        values, vectors = scipy.linalg.eig(A.matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolve of BS matrix failed: {exc}") from exc
    order = np.argsort(values.real)
    residue = float(np.max(np.abs(values.imag))) if values.size else 0.0
    return BSSpectrum(values.real[order], vectors[:, order], residue, False)


@dataclass(frozen=True, eq=False)
class ThresholdProjection:
    """Orthogonal projection onto the eigenvectors of u0 G0 v0 at -1."""

    matrix: np.ndarray
    basis: np.ndarray
    eigenvalues: np.ndarray
    support: SupportSet

    @property
    def rank(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True)
class TerribleCheck:
    invertible: bool
    smallest_singular_value: Optional[float]
    scalar: Optional[complex] = None


@dataclass
class ThresholdReport:
    """Coupling scan summary at the potential's own coupling."""

    coupling: float
    critical_couplings: List[float]
    eigenvalues_near_minus_one: List[float]
    projection_rank: int
    invertible: bool
    smallest_singular_value: Optional[float]
    support_size: int
    imag_residue: float
    unit_spectrum_min: Optional[float] = None
    terrible_scalar: Optional[complex] = field(default=None, repr=False)

    def to_dict(self) -> Dict:
        scalar = self.terrible_scalar
        return {
            "coupling": self.coupling,
            "critical_couplings": list(self.critical_couplings),
            "eigenvalues_near_minus_one": list(self.eigenvalues_near_minus_one),
            "projection_rank": self.projection_rank,
            "invertible": self.invertible,
            "smallest_singular_value": self.smallest_singular_value,
            "support_size": self.support_size,
            "imag_residue": self.imag_residue,
            "unit_spectrum_min": self.unit_spectrum_min,
            "terrible_scalar": None if scalar is None else [scalar.real, scalar.imag],
        }


def _unit_spectrum(
    V: Potential, grid: Grid3, tol: Optional[ToleranceConfig]
) -> Tuple[BSMatrix, BSSpectrum]:
    M0 = assemble_bs(V.with_coupling(1.0), BSDescriptor.g0(), grid, tol)
    return M0, bs_spectrum(M0)


def threshold_projection(
    V: Potential, grid: Grid3, tol: Optional[ToleranceConfig] = None
) -> ThresholdProjection:
    """Projection P for u0 G0 v0 of V at its own coupling (rank 0 when generic)."""
    tol = _tolerances(tol)
    A = assemble_bs(V, BSDescriptor.g0(), grid, tol)
    spectrum = bs_spectrum(A)
    near = np.abs(spectrum.eigenvalues + 1.0) <= tol.tol_eig
    basis = spectrum.vectors[:, near]
    if basis.shape[1] and not spectrum.symmetric:
        basis, _ = np.linalg.qr(basis)
    matrix = basis @ basis.conj().T
    logger.debug(f"Threshold projection rank {basis.shape[1]}")
    return ThresholdProjection(matrix, basis, spectrum.eigenvalues[near], A.support)


def terrible_check(
    P: ThresholdProjection, V: Potential, grid: Grid3, tol: Optional[ToleranceConfig] = None
) -> TerribleCheck:
    """Invertibility of P u0 Q0 v0 restricted to range(P)."""
    tol = _tolerances(tol)
    if P.rank == 0:
        return TerribleCheck(True, None)
    Q = assemble_bs(V, BSDescriptor.q0(), grid, tol, P.support).matrix
    restricted = P.basis.conj().T @ Q @ P.basis
    smallest = float(scipy.linalg.svdvals(restricted)[-1])
    scalar = complex(restricted[0, 0]) if P.rank == 1 else None
    logger.info(f"Restricted u0 Q0 v0: smallest singular value {smallest:.4e}")
    return TerribleCheck(smallest > tol.tol_inv, smallest, scalar)


def coupling_scan(
    V: Potential,
    a_range: Tuple[float, float],
    grid: Grid3,
    tol: Optional[ToleranceConfig] = None,
) -> ThresholdReport:
    """
    Critical couplings a* = -1/mu of the unit-coupling matrix M0 = u0 G0 v0.

    Raises:
        NumericalError: eigensolve failed
    """
    tol = _tolerances(tol)
    lo, hi = sorted(float(a) for a in a_range)
    M0, spectrum = _unit_spectrum(V, grid, tol)
    mu = spectrum.eigenvalues
    scale = float(np.max(np.abs(mu))) if mu.size else 0.0
    significant = mu[np.abs(mu) > 1e-14 * scale] if scale else mu[:0]
    critical = sorted(float(-1.0 / m) for m in significant if lo <= -1.0 / m <= hi)

    scaled = V.a * mu
    near = scaled[np.abs(scaled + 1.0) <= tol.tol_eig]
    if len(near):
        check = terrible_check(threshold_projection(V, grid, tol), V, grid, tol)
    else:
        check = TerribleCheck(True, None)

    report = ThresholdReport(
        coupling=float(V.a),
        critical_couplings=critical,
        eigenvalues_near_minus_one=[float(x) for x in near],
        projection_rank=int(len(near)),
        invertible=check.invertible,
        smallest_singular_value=check.smallest_singular_value,
        support_size=M0.size,
        imag_residue=spectrum.imag_residue,
        unit_spectrum_min=float(mu[0]) if mu.size else None,
        terrible_scalar=check.scalar,
    )
    logger.info(
        f"Coupling scan on [{lo}, {hi}]: {len(critical)} critical couplings, "
        f"rank P = {report.projection_rank}"
    )
    return report


def tune_critical_coupling(
    V: Potential, grid: Grid3, tol: Optional[ToleranceConfig] = None, max_iter: int = 8
) -> float:
    """
    Newton iteration on a -> mu_min(a M0) + 1.

    Raises:
        DomainError: M0 has no negative eigenvalue
        NumericalError: no convergence
    """
    tol = _tolerances(tol)
    M0, spectrum = _unit_spectrum(V, grid, tol)
    if not spectrum.eigenvalues.size or spectrum.eigenvalues[0] >= 0:
        raise DomainError("potential has no attractive channel; no critical coupling")
    slope = float(spectrum.eigenvalues[0])
    a = float(V.a) if V.a > 0 else 1.0
    residual = np.inf
    for iteration in range(max_iter):
        scaled = BSMatrix(M0.descriptor, M0.support, a * M0.matrix)
        mu_min = float(bs_spectrum(scaled).eigenvalues[0])
        residual = mu_min + 1.0
        logger.debug(f"Newton step {iteration}: a={a:.12g} residual={residual:.3e}")
        if abs(residual) <= 1e-3 * tol.tol_eig:
            return a
        a -= residual / slope
    raise NumericalError("critical coupling tuning did not converge", partial=a)


# low-energy behavior


@dataclass(frozen=True)
class LogLogFit:
    slope: float
    intercept: float
    residual: float

    @property
    def exponent(self) -> float:
        return self.slope


def loglog_fit(x: Sequence[float], y: Sequence[float]) -> LogLogFit:
    """
    Least-squares line through (log x, log y).

    Raises:
        FitError: fewer than two points, non-positive data, or a single abscissa
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or x.size != y.size:
        raise FitError(f"log-log fit needs at least two paired points, got {x.size}")
    if np.any(~(x > 0)) or np.any(~(y > 0)) or not np.all(np.isfinite(y)):
        raise FitError("log-log fit needs positive finite data")
    lx, ly = np.log(x), np.log(y)
    if np.ptp(lx) == 0:
        raise FitError("log-log fit needs distinct abscissae")
    slope, intercept = np.polyfit(lx, ly, 1)
    residual = float(np.sqrt(np.mean((ly - (slope * lx + intercept)) ** 2)))
    return LogLogFit(float(slope), float(intercept), residual)


@dataclass
class LowEnergyFit:
    """
    Residuals of A(eps) against G0 + eps Q0 and their fitted exponents.

    residual is ||A(eps) - A(g0) - eps A(q0)||. Its eps^2 coefficient has an
    eps-independent part that dominates at desk-scale eps, so the raw exponent
    sits near 2. log_part removes eps^2 C2 + eps^3 C3 (closed forms) and keeps
    eps^2 ln(eps) u0 v0 / (2 pi^2), the term bounded by eps^{3/2} D_eps.
    """

    eps: np.ndarray
    residual: np.ndarray
    log_part: np.ndarray
    k_part: np.ndarray
    first_order: np.ndarray
    residual_exponent: float
    log_part_exponent: float
    k_part_exponent: float
    first_order_exponent: float

    @property
    def first_order_monotone(self) -> bool:
        # eps ascending, so the first-order difference must grow
        return bool(np.all(np.diff(self.first_order) >= -1e-12 * self.first_order.max()))

    def to_dict(self) -> Dict:
        return {
            "eps": self.eps.tolist(),
            "residual": self.residual.tolist(),
            "log_part": self.log_part.tolist(),
            "k_part": self.k_part.tolist(),
            "first_order": self.first_order.tolist(),
            "residual_exponent": self.residual_exponent,
            "log_part_exponent": self.log_part_exponent,
            "k_part_exponent": self.k_part_exponent,
            "first_order_exponent": self.first_order_exponent,
            "first_order_monotone": self.first_order_monotone,
        }


def analytic_coefficients(
    support: SupportSet, grid: Grid3, sign: int = 1
) -> Tuple[np.ndarray, np.ndarray]:
    """
    eps^2 and eps^3 coefficients of u0 (K_eps + M_eps - eps Q0) v0 without ln(eps).

    Kernels: c2(r) = +-i / (2 pi) + (ln r + gamma + 1) / (2 pi^2) and
    c3(r) = -r / (8 pi); diagonal cells take their ball averages.
    """
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    r = cdist(support.points, support.points)
    R = ball_radius(grid.h)
    off = r > 0
    log_r = np.where(off, np.log(np.where(off, r, 1.0)), np.log(R) - 1.0 / 3.0)
    c2 = sign * 1j / (2.0 * np.pi) + (log_r + np.euler_gamma + 1.0) / (2.0 * np.pi**2)
    c3 = -np.where(off, r, 0.75 * R) / (8.0 * np.pi)
    weight = support.u0[:, None] * (support.v0[None, :] * grid.cell_volume)
    return weight * c2, weight * c3


def lowenergy_expansion_fit(
    V: Potential,
    eps_list: Sequence[float],
    grid: Grid3,
    sign: int = 1,
    tol: Optional[ToleranceConfig] = None,
) -> LowEnergyFit:
    """
    Fit ||A(eps) - A(g0) - eps A(q0)||, its ln(eps) part and the K part.

    Raises:
        DomainError: eps outside (0, 0.3] or fewer than four values
        FitError: degenerate fit
    """
    eps = np.sort(np.asarray(eps_list, dtype=float))
    if eps.size < 4 or np.any(eps <= 0) or np.any(eps > 0.3):
        raise DomainError("eps_list needs at least four values in (0, 0.3]")
    support = support_set(V, grid, tol)
    if support.size == 0:
        raise FitError("zero potential has no low-energy residual to fit")
    Aq = assemble_bs(V, BSDescriptor.q0(), grid, tol, support).matrix
    C2, C3 = analytic_coefficients(support, grid, sign)

    residual, log_part, k_part, first = [], [], [], []
    for e in eps:
        Ak = assemble_bs(V, BSDescriptor("klambda", e, sign), grid, tol, support).matrix
        Am = assemble_bs(V, BSDescriptor("mlambda", e, sign), grid, tol, support).matrix
        # A(eps) - A(g0) = u0 (K_eps + M_eps) v0
        difference = Ak + Am
        remainder = difference - e * Aq
        residual.append(spectral_norm(remainder))
        log_part.append(spectral_norm(remainder - e * e * C2 - e**3 * C3))
        k_part.append(spectral_norm(Ak - 2.0 * e * Aq))
        first.append(spectral_norm(difference))
        logger.debug(
            f"eps={e:.4g}: residual={residual[-1]:.4e} log_part={log_part[-1]:.4e} "
            f"k_part={k_part[-1]:.4e}"
        )

    fit = LowEnergyFit(
        eps=eps,
        residual=np.asarray(residual),
        log_part=np.asarray(log_part),
        k_part=np.asarray(k_part),
        first_order=np.asarray(first),
        residual_exponent=loglog_fit(eps, residual).slope,
        log_part_exponent=loglog_fit(eps, log_part).slope,
        k_part_exponent=loglog_fit(eps, k_part).slope,
        first_order_exponent=loglog_fit(eps, first).slope,
    )
    logger.info(
        f"Low-energy exponents: residual {fit.residual_exponent:.3f}, "
        f"ln(eps) part {fit.log_part_exponent:.3f}, K-part {fit.k_part_exponent:.3f}, "
        f"first order {fit.first_order_exponent:.3f}"
    )
    return fit


@dataclass(frozen=True, eq=False)
class ScaledBLimit:
    taus: np.ndarray
    norms: np.ndarray
    limit: np.ndarray
    closed_form: np.ndarray
    projection_rank: int

    @property
    def distance(self) -> float:
        return spectral_norm(self.limit - self.closed_form)


def resonant_limit(P: np.ndarray, Q: np.ndarray, lam: float) -> np.ndarray:
    """(1 + P (lam Q - 1))^{-1} P."""
    n = P.shape[0]
    return scipy.linalg.solve(np.eye(n) + P @ (lam * Q - np.eye(n)), P)


def scaled_b_limit(
    V: Potential,
    lam: float,
    tau_list: Sequence[float],
    grid: Grid3,
    sign: int = 1,
    tol: Optional[ToleranceConfig] = None,
) -> ScaledBLimit:
    """
    e^tau B(e^tau lam +- i0) along decreasing tau.

    The limit is 0 when rank P = 0 and (1 + P(lam Q - 1))^{-1} P otherwise.

    Raises:
        DomainError: tau_list not strictly decreasing
        ThresholdError: 1 + A singular at some tau
    """
    taus = np.asarray(tau_list, dtype=float)
    if taus.size == 0 or np.any(np.diff(taus) >= 0):
        raise DomainError("tau_list must be strictly decreasing")
    tol = _tolerances(tol)
    support = support_set(V, grid, tol)
    norms = []
    scaled = np.zeros((support.size, support.size), dtype=complex)
    for tau in taus:
        B = bfun(V, np.exp(tau) * lam, sign, grid, tol, support)
        scaled = np.exp(tau) * B
        norms.append(spectral_norm(scaled))
        logger.debug(f"tau={tau:.3f}: ||e^tau B|| = {norms[-1]:.4e}")

    projection = threshold_projection(V, grid, tol)
    if projection.rank:
        Q = assemble_bs(V, BSDescriptor.q0(), grid, tol, support).matrix
        closed = resonant_limit(projection.matrix, Q, lam)
    else:
        closed = np.zeros_like(scaled)
    return ScaledBLimit(taus, np.asarray(norms), scaled, closed, projection.rank)


# Kato-Sobolev bound


@dataclass(frozen=True)
class KVBound:
    estimate: float
    bound: float
    l3: float
    converged: bool = True

    @property
    def passed(self) -> bool:
        return self.estimate <= self.bound * (1.0 + DISCRETIZATION_SLACK)

    def to_dict(self) -> Dict:
        return {
            "estimate": self.estimate,
            "bound": self.bound,
            "l3": self.l3,
            "converged": self.converged,
            "passed": self.passed,
        }


def _kv_operator(V: Potential, grid: Grid3) -> LinearOperator:
    values = V.on_grid(grid)
    size = grid.n**3

    def matvec(x: np.ndarray) -> np.ndarray:
        f = Field(grid, np.asarray(x, dtype=float).reshape(grid.shape))
        g = quarter_inverse_laplacian(grid, f)
        g = Field(grid, values * g.values)
        return quarter_inverse_laplacian(grid, g).values.real.ravel()

    return LinearOperator((size, size), matvec=matvec, dtype=float)


def _start_vector(grid: Grid3, seed: int = 0) -> np.ndarray:
    x = np.random.default_rng(seed).standard_normal(grid.n**3)
    return x - x.mean()


def kv_bound_check(V: Potential, grid: Grid3, seed: int = 0) -> KVBound:
    """
    ||(-Laplacian)^{-1/4} V (-Laplacian)^{-1/4}|| against 2^{-1/3} pi^{-2/3} ||V||_3.

    A Lanczos stall returns the partial estimate with converged = False.
    """
    l3 = l3_norm(V, grid)
    bound = KATO_SOBOLEV_CONSTANT * l3
    if l3 == 0.0:
        return KVBound(0.0, 0.0, 0.0)
    op = _kv_operator(V, grid)
    try:
        values = eigsh(
            op,
            k=1,
            which="LM",
            v0=_start_vector(grid, seed),
            tol=1e-10,
            return_eigenvectors=False,
        )
        estimate, converged = float(np.max(np.abs(values))), True
    except ArpackNoConvergence as exc:
        partial = np.abs(exc.eigenvalues)
        estimate = float(partial.max()) if partial.size else float("nan")
        converged = False
        logger.warning(f"Kato-Sobolev eigensolve stalled; partial estimate {estimate:.4e}")
    logger.info(f"K_V norm {estimate:.6f} vs bound {bound:.6f}")
    return KVBound(estimate, bound, l3, converged)


def kv_spectrum(V: Potential, grid: Grid3, k: int = 4, seed: int = 0) -> np.ndarray:
    """
    Most negative eigenvalues of K_V, ascending.

    Raises:
        NumericalError: eigensolve did not converge
    """
    if V.is_zero:
        return np.zeros(k)
    try:
        values = eigsh(
            _kv_operator(V, grid),
            k=k,
            which="SA",
            v0=_start_vector(grid, seed),
            tol=1e-10,
            return_eigenvectors=False,
        )
    except ArpackNoConvergence as exc:
        raise NumericalError("K_V eigensolve did not converge", partial=exc.eigenvalues) from exc
    return np.sort(values)


# zero-energy modes


@dataclass(frozen=True, eq=False)
class ZeroModeProfile:
    kernel: str
    radii: np.ndarray
    profile: np.ndarray
    exponent: float
    l2_norm: float
    h_field: Field = field(repr=False)

    def to_dict(self) -> Dict:
        return {
            "kernel": self.kernel,
            "radii": self.radii.tolist(),
            "profile": self.profile.tolist(),
            "exponent": self.exponent,
            "l2_norm": self.l2_norm,
        }


def radial_bins(
    values: np.ndarray, grid: Grid3, r_min: float, r_max: float, bins: int = 12
) -> Tuple[np.ndarray, np.ndarray]:
    """Mean radius and mean value per logarithmic shell of [r_min, r_max]."""
    edges = np.geomspace(r_min, r_max, bins + 1)
    r = grid.radius.ravel()
    v = np.asarray(values).ravel()
    which = np.digitize(r, edges) - 1
    radii, means = [], []
    for b in range(bins):
        sel = which == b
        if np.any(sel):
            radii.append(r[sel].mean())
            means.append(v[sel].mean())
    return np.asarray(radii), np.asarray(means)


def zero_mode_profile(
    V: Potential,
    grid: Grid3,
    tol: Optional[ToleranceConfig] = None,
    kernel: str = "g0",
) -> ZeroModeProfile:
    """
    Tail of h = K(v0 psi) for the -1 eigenvector psi of u0 G0 v0.

    kernel = "q0" gives the Newtonian contrast run.

    Raises:
        DomainError: rank P = 0 at this coupling
        FitError: fewer than four populated shells in [L/4, L/2]
    """
    projection = threshold_projection(V, grid, tol)
    if projection.rank == 0:
        raise DomainError("no eigenvalue -1 at this coupling; tune the coupling first")
    support = projection.support
    psi = projection.basis[:, 0]
    h = cached_op(RadialKernel(kernel), grid).apply(support.scatter(support.v0 * psi))

    r_min, r_max = grid.L / 4.0, grid.L / 2.0
    radii, profile = radial_bins(np.abs(h.values), grid, r_min, r_max)
    if radii.size < 4:
        raise FitError(f"only {radii.size} populated shells in [{r_min}, {r_max}]")
    fit = loglog_fit(radii, profile)
    result = ZeroModeProfile(kernel, radii, profile, -fit.slope, h.norm(), h)
    logger.info(f"Zero-mode tail ({kernel}): exponent {result.exponent:.3f}")
    return result
