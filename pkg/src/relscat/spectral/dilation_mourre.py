"""
Dilation group, covariance and spectrum-scaling identities, dilation limits
of the wave operators and S(lambda), and the positivity conditions behind
the Mourre-type argument.

(U_tau f)(x) = exp(3 tau / 2) f(exp(tau) x). On the grid U_tau acts axis by
axis as exact trigonometric interpolation of the samples at exp(tau) x.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.fft
from scipy import ndimage, signal
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from ..core.config import ToleranceConfig
from ..core.error_handler import DomainError, NumericalError, ThresholdError
from .birman_schwinger import bfun_factor, support_set
from .grid import (
    Field,
    Grid3,
    SphereQuad,
    abs_d_apply,
    inner,
    make_grid,
    multiplier_apply,
)
from .kernel_ops import apply_resolvent, ball_radius
from .potential import Potential, dilate, second_virial, virial
from .scattering import ShellProbe, smatrix

logger = logging.getLogger("relscat.spectral.dilation_mourre")

ESCAPE_TOL = 1e-10
COMMUTATOR_TAU = 1e-3
FORM_TOL = 1e-8
LOCALIZED_FRACTION = 0.5
NORM_FLOOR = 1e-12


# the dilation group


@lru_cache(maxsize=16)
def _dilation_matrix(grid: Grid3, tau: float) -> np.ndarray:
    """
    Trigonometric interpolation of one axis at exp(tau) x_i.

    The interpolant is periodic, so a sample point stays valid until it
    passes the middle of the boundary cell; rows beyond that are zeroed.
    """
    n = grid.n
    x = grid.axis
    y = np.exp(tau) * x
    k = grid.dual_axis
    shift = y + grid.L
    phase = np.exp(1j * np.outer(shift, k))
    if n % 2 == 0:
        phase[:, n // 2] = np.cos(k[n // 2] * shift)
    matrix = phase @ scipy.fft.fft(np.eye(n), axis=0) / n
    matrix[np.abs(y) > grid.L + 0.5 * grid.h] = 0.0
    return matrix


def _escaped_fraction(f: Field, reach: float) -> float:
    x, y, z = f.grid.coordinates
    box = np.maximum(np.maximum(np.abs(x), np.abs(y)), np.abs(z))
    weight = np.abs(f.values) ** 2
    total = weight.sum()
    if total == 0.0:
        return 0.0
    return float(weight[np.broadcast_to(box > reach, f.grid.shape)].sum() / total)


def dilate_field(tau: float, f: Field, escape_tol: Optional[float] = ESCAPE_TOL) -> Field:
    """
    U_tau f, band-limited resample at exp(tau) x scaled by exp(3 tau / 2).

    Raises:
        DomainError: for tau < 0, more than escape_tol of ||f||^2 lies where
            exp(tau) x cannot reach, so U_tau f would leave the grid
    """
    if tau == 0:
        return f.copy()
    grid = f.grid
    if tau < 0 and escape_tol is not None:
        escaped = _escaped_fraction(f, np.exp(tau) * (grid.L - grid.h))
        if escaped > escape_tol:
            raise DomainError(
                f"U_tau f leaves the grid at tau={tau}: {escaped:.2e} of the mass escapes"
            )
    M = _dilation_matrix(grid, float(tau))
    v = np.einsum("ia,abc->ibc", M, f.values, optimize=True)
    v = np.einsum("jb,ibc->ijc", M, v, optimize=True)
    v = np.einsum("kc,ijc->ijk", M, v, optimize=True)
    return Field(grid, np.exp(1.5 * tau) * v)


def covariance_check(tau: float, f: Field, power: float = 1.0) -> float:
    """||(U_{-tau} |D|^p U_tau - exp(p tau) |D|^p) f|| / || |D|^p f ||."""
    grid = f.grid
    symbol = grid.k_norm**power

    def apply(g: Field) -> Field:
        return multiplier_apply(grid, symbol, g)

    reference = apply(f)
    conjugated = dilate_field(-tau, apply(dilate_field(tau, f)), escape_tol=None)
    defect = (conjugated - reference * np.exp(power * tau)).norm() / reference.norm()
    logger.debug(f"Covariance tau={tau} power={power}: defect {defect:.3e}")
    return float(defect)


@dataclass(frozen=True)
class DilationReport:
    tau: float
    covariance_defect: float
    unitarity_defect: float
    group_defect: float

    def to_dict(self) -> Dict:
        return {
            "tau": self.tau,
            "covariance_defect": self.covariance_defect,
            "unitarity_defect": self.unitarity_defect,
            "group_defect": self.group_defect,
        }


def dilation_report(tau: float, f: Field) -> DilationReport:
    forward = dilate_field(tau, f)
    back = dilate_field(-tau, forward)
    norm = f.norm()
    return DilationReport(
        tau=float(tau),
        covariance_defect=covariance_check(tau, f),
        unitarity_defect=abs(forward.norm() - norm) / norm,
        group_defect=(back - f).norm() / norm,
    )


def conjugated_hamiltonian_apply(V: Potential, tau: float, f: Field) -> Field:
    """U_{-tau} H U_tau f = (exp(tau) H0 + V_tau) f."""
    grid = f.grid
    return abs_d_apply(f) * np.exp(tau) + Field(grid, dilate(V, tau).on_grid(grid) * f.values)


def hamiltonian_apply(V: Potential, f: Field) -> Field:
    return abs_d_apply(f) + Field(f.grid, V.on_grid(f.grid) * f.values)


# bound states and spectrum scaling


def _hamiltonian(V: Potential, grid: Grid3) -> LinearOperator:
    values = V.on_grid(grid)
    k = grid.k_norm
    shape = grid.shape

    def matvec(x: np.ndarray) -> np.ndarray:
        u = np.asarray(x, dtype=float).reshape(shape)
        kinetic = scipy.fft.ifftn(k * scipy.fft.fftn(u)).real
        return (kinetic + values * u).ravel()

    size = grid.n**3
    return LinearOperator((size, size), matvec=matvec, rmatvec=matvec, dtype=float)


def bound_states(
    V: Potential, grid: Grid3, k: int = 1, tol: Optional[ToleranceConfig] = None
) -> np.ndarray:
    """
    Negative eigenvalues among the k lowest of H0 + V on the grid, ascending.

    The zero mode of the periodic box is pulled below 0 by about
    int V / (2 L)^3 and is spread over the whole box. Eigenvectors with less
    than LOCALIZED_FRACTION of their mass inside |x| <= L / 2 are such box
    modes and are dropped.

    Raises:
        NumericalError: Lanczos did not converge
    """
    tol_eig = (tol or ToleranceConfig()).tol_eig
    start = np.exp(-0.5 * grid.radius**2).ravel()
    try:
        values, vectors = eigsh(
            _hamiltonian(V, grid), k=k, which="SA", v0=start, tol=1e-12
        )
    except ArpackNoConvergence as error:
        raise NumericalError(
            "bound-state eigensolve did not converge",
            partial={"eigenvalues": np.sort(error.eigenvalues).tolist()},
        ) from error
    inside = (grid.radius <= 0.5 * grid.L).ravel()
    density = np.abs(vectors) ** 2
    fraction = density[inside].sum(axis=0) / density.sum(axis=0)
    keep = (values < -tol_eig) & (fraction >= LOCALIZED_FRACTION)
    for value in values[(values < -tol_eig) & ~keep]:
        logger.debug(f"Dropped box mode at {value:.3e}")
    return np.sort(values[keep])


@dataclass(frozen=True)
class ScalingRow:
    tau: float
    eigenvalues: Tuple[float, ...]
    expected: Tuple[float, ...]
    mismatch: float


@dataclass
class SpectrumScaling:
    base: np.ndarray
    rows: List[ScalingRow] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return len(self.base) == 0

    def max_mismatch(self) -> float:
        return max((row.mismatch for row in self.rows), default=0.0)

    def table(self) -> Dict[str, np.ndarray]:
        def lowest(values: Tuple[float, ...]) -> float:
            return values[0] if values else np.nan

        return {
            "tau": np.array([row.tau for row in self.rows]),
            "eigenvalue": np.array([lowest(row.eigenvalues) for row in self.rows]),
            "expected": np.array([lowest(row.expected) for row in self.rows]),
            "mismatch": np.array([row.mismatch for row in self.rows]),
        }


def spectrum_scaling_check(
    V: Potential,
    tau_list: Sequence[float],
    grid: Grid3,
    k: int = 1,
    tol: Optional[ToleranceConfig] = None,
) -> SpectrumScaling:
    """
    Lowest eigenvalues of H0 + exp(-tau) V_tau against exp(-tau) times those of H0 + V.

    The report is empty when H0 + V has no bound state on the grid.
    """
    base = bound_states(V, grid, k, tol)
    report = SpectrumScaling(base=base)
    if report.empty:
        logger.warning("No bound state below zero; spectrum scaling report is empty")
        return report
    for tau in tau_list:
        scaled = dilate(V, tau).scaled(np.exp(-tau))
        values = bound_states(scaled, grid, k, tol)[: len(base)]
        expected = np.exp(-tau) * base[: len(values)]
        if len(values) == 0:
            mismatch = float("inf")
        else:
            mismatch = float(np.max(np.abs(values - expected) / np.abs(expected)))
        report.rows.append(ScalingRow(float(tau), tuple(values), tuple(expected), mismatch))
        logger.debug(f"Spectrum scaling tau={tau}: mismatch {mismatch:.3e}")
    logger.info(f"Spectrum scaling: max mismatch {report.max_mismatch():.3e}")
    return report


# dilation limits of W and S


def sample_at(f: Field, points: np.ndarray, order: int = 5) -> np.ndarray:
    """Spline interpolation of f at arbitrary points inside the box."""
    grid = f.grid
    coords = ((np.asarray(points, dtype=float) + grid.L) / grid.h).T
    if np.any(coords < 0) or np.any(coords > grid.n - 1):
        raise DomainError("interpolation points leave the grid")
    real = ndimage.map_coordinates(f.values.real, coords, order=order, mode="nearest")
    imag = ndimage.map_coordinates(f.values.imag, coords, order=order, mode="nearest")
    return real + 1j * imag


def wave_dilation_pairing(
    V: Potential,
    f: Field,
    probe: ShellProbe,
    tau: float,
    sign: int,
    tol: Optional[ToleranceConfig] = None,
    resolved: Optional[Dict[float, Field]] = None,
) -> complex:
    """
    <f, (U_{-tau} W_{+-} U_tau - 1) g> for the shell probe g.

    U_{-tau} W(H, H0) U_tau is the wave operator of H0 + exp(-tau) V_tau,
    whose Birman-Schwinger inverse at lam equals B(exp(tau) lam) of V on the
    unscaled support. Only R0(lam +- i0) f at the points exp(tau) x_p is
    needed, interpolated from the grid. resolved keeps R0(lam +- i0) f per
    shell node across calls with the same f and sign.

    Raises:
        DomainError: shell beyond Nyquist
        ThresholdError: 1 + A singular at some exp(tau) lam
    """
    grid = f.grid
    if probe.b >= grid.k_nyquist:
        raise DomainError(f"shell edge {probe.b} violates Nyquist {grid.k_nyquist:.4f}")
    support = support_set(V, grid, tol)
    if support.size == 0:
        return 0.0 + 0.0j
    scale = float(np.exp(tau))
    points = scale * support.points
    kappa, w_r = probe.radial_rule()
    quad = probe.quad()
    prefactor = scale**2 * grid.cell_volume / (2.0 * np.pi) ** 1.5
    flip = np.sign(support.u0)
    cache = resolved if resolved is not None else {}

    total = 0.0 + 0.0j
    for lam, weight in zip(kappa, w_r):
        lam = float(lam)
        if lam not in cache:
            cache[lam] = apply_resolvent(lam, sign, f)
        r_s = sample_at(cache[lam], points)
        B = bfun_factor(V, scale * lam, sign, grid, tol, support)
        corr = support.u0 * flip * B.solve(flip * support.v0 * r_s)
        kv = lam * quad.nodes
        phases = np.exp(-1j * scale * kv @ support.points.T)
        corrhat = prefactor * (phases @ corr)
        total -= weight * lam**2 * quad.inner(corrhat, probe.hat(kv))
    logger.debug(f"Wave dilation tau={tau} sign={sign}: {total:.6e}")
    return complex(total)


@dataclass
class DilationSweep:
    taus: List[float]
    values: List[complex]
    largest_usable_tau: Optional[float]
    failed_at: Optional[float] = None

    def magnitudes(self) -> np.ndarray:
        return np.abs(np.asarray(self.values, dtype=complex))

    def decay_ratios(self) -> np.ndarray:
        """|P(tau_j)| / |P(tau_{j+1})| along decreasing tau."""
        mags = self.magnitudes()
        return mags[:-1] / np.maximum(mags[1:], 1e-300)

    def table(self) -> Dict[str, np.ndarray]:
        values = np.asarray(self.values, dtype=complex)
        return {
            "tau": np.asarray(self.taus),
            "pairing_re": values.real,
            "pairing_im": values.imag,
            "magnitude": np.abs(values),
        }


def largest_usable_tau(
    V: Potential,
    f: Field,
    probe: ShellProbe,
    taus: Sequence[float],
    sign: int = -1,
    tol: Optional[ToleranceConfig] = None,
) -> DilationSweep:
    """
    Pairings along taus, most negative first, stopping at the first singular 1 + A.

    The last tau evaluated without a ThresholdError is the largest usable one.
    """
    ordered = sorted(float(t) for t in taus)
    sweep = DilationSweep(taus=[], values=[], largest_usable_tau=None)
    resolved: Dict[float, Field] = {}
    for tau in ordered:
        try:
            value = wave_dilation_pairing(V, f, probe, tau, sign, tol, resolved)
        except ThresholdError as error:
            sweep.failed_at = tau
            logger.warning(f"Birman-Schwinger singular at tau={tau}: {error}")
            break
        sweep.taus.append(tau)
        sweep.values.append(value)
        sweep.largest_usable_tau = tau
    # report along decreasing tau
    sweep.taus.reverse()
    sweep.values.reverse()
    return sweep


@dataclass
class SMatrixDilation:
    lam: float
    taus: np.ndarray
    norms: np.ndarray

    @property
    def strictly_decreasing(self) -> bool:
        """Each step down in tau lowers ||S(exp(tau) lam) - 1|| by more than NORM_FLOOR."""
        order = np.argsort(-self.taus)
        return bool(np.all(np.diff(self.norms[order]) < -NORM_FLOOR))

    def table(self) -> Dict[str, np.ndarray]:
        return {
            "tau": self.taus,
            "energy": self.lam * np.exp(self.taus),
            "s_minus_identity": self.norms,
        }


def smatrix_dilation_check(
    V: Potential,
    lam: float,
    tau_list: Sequence[float],
    quad: SphereQuad,
    grid: Grid3,
    tol: Optional[ToleranceConfig] = None,
) -> SMatrixDilation:
    """||U_{-tau} S U_tau - 1|| on the fiber lam, i.e. ||S(exp(tau) lam) - 1||."""
    taus = np.asarray(tau_list, dtype=float)
    norms = np.array(
        [smatrix(V, lam * np.exp(t), quad, grid, 1, tol).minus_identity_norm() for t in taus]
    )
    return SMatrixDilation(float(lam), taus, norms)


# Kato inequality and Mourre-type positivity


def _inverse_radius(grid: Grid3) -> np.ndarray:
    r = grid.radius
    origin = 3.0 / (2.0 * ball_radius(grid.h))
    safe = np.where(r > 0, r, 1.0)
    return np.where(r > 0, 1.0 / safe, origin)


def _coulomb_form(values: np.ndarray, grid: Grid3) -> float:
    return float(grid.cell_volume * np.sum(np.abs(values) ** 2 * _inverse_radius(grid)))


def _upsample(values: np.ndarray) -> np.ndarray:
    out = values
    for axis in range(3):
        out = signal.resample(out, 2 * values.shape[axis], axis=axis)
    return out


@dataclass(frozen=True)
class KatoMargin:
    kinetic: float
    coulomb: float
    margin: float

    def to_dict(self) -> Dict:
        return {"kinetic": self.kinetic, "coulomb": self.coulomb, "margin": self.margin}


def kato_check(f: Field) -> KatoMargin:
    """
    <f, |D| f> - (2 / pi) <f, |x|^{-1} f>.

    The origin cell of |x|^{-1} is its ball average 3 / (2 R_c). The O(h^2)
    error this leaves is removed by one Richardson step against the
    band-limited refinement of f on the grid of half spacing.
    """
    grid = f.grid
    if f.norm() == 0.0:
        raise DomainError("kato_check needs f != 0")
    kinetic = float(inner(f, abs_d_apply(f)).real)
    coarse = _coulomb_form(f.values, grid)
    fine = _coulomb_form(_upsample(f.values), make_grid(2 * grid.n, grid.L))
    coulomb = 2.0 / np.pi * (4.0 * fine - coarse) / 3.0
    result = KatoMargin(kinetic, float(coulomb), kinetic - float(coulomb))
    logger.debug(f"Kato margin {result.margin:.6f} (kinetic {kinetic:.6f})")
    return result


def gaussian_field(
    grid: Grid3, width: float = 1.0, center: Sequence[float] = (0.0, 0.0, 0.0)
) -> Field:
    """L^2-normalized Gaussian exp(-|x - c|^2 / (2 width^2))."""
    c = np.asarray(center, dtype=float)

    def gauss(x: np.ndarray, y: np.ndarray, z: np.ndarray) -> np.ndarray:
        d2 = (x - c[0]) ** 2 + (y - c[1]) ** 2 + (z - c[2]) ** 2
        return np.exp(-d2 / (2 * width**2))

    g = grid.field_from(gauss)
    return g * (1.0 / g.norm())


def moment_free_packet(grid: Grid3, width: float = 1.5, order: int = 2) -> Field:
    """
    (-Delta)^order of the Gaussian, L^2-normalized.

    Its transform vanishes to order 2 * order at k = 0, so |D| of it decays
    like |x|^(-4 - 2 * order) and the periodic images of that tail stay far
    below the commutator tolerance.
    """
    g = gaussian_field(grid, width)
    f = multiplier_apply(grid, grid.k_norm ** (2 * order), g)
    return f * (1.0 / f.norm())


def random_bandlimited_fields(
    grid: Grid3, count: int, seed: int = 0, cutoff: float = 2.0
) -> List[Field]:
    """Real fields with random Fourier coefficients damped by exp(-|k|^2 / (2 cutoff^2))."""
    rng = np.random.default_rng(seed)
    envelope = np.exp(-0.5 * (grid.k_norm / cutoff) ** 2)
    fields = []
    for _ in range(count):
        coeff = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
        values = scipy.fft.ifftn(envelope * coeff).real
        f = Field(grid, values.astype(complex))
        fields.append(f * (1.0 / f.norm()))
    return fields


@dataclass(frozen=True)
class MourreReport:
    c1: float
    c2: float
    min_m: float
    argmin: Tuple[float, float, float]
    virial_cap: float
    second_virial_cap: float
    kato_margin: float
    decay_cap: float
    passed: bool

    @property
    def decay_ok(self) -> bool:
        return self.virial_cap <= self.decay_cap and self.second_virial_cap <= self.decay_cap

    def to_dict(self) -> Dict:
        return {
            "c1": self.c1,
            "c2": self.c2,
            "min_m": self.min_m,
            "argmin": list(self.argmin),
            "virial_cap": self.virial_cap,
            "second_virial_cap": self.second_virial_cap,
            "kato_margin": self.kato_margin,
            "decay_ok": self.decay_ok,
            "passed": self.passed,
        }


def _check_constants(c1: float, c2: float) -> None:
    if not (0.0 <= c1 < 1.0 and 0.0 <= c2 < 1.0):
        raise DomainError(f"c1, c2 must lie in [0, 1), got {c1}, {c2}")


def mourre_field(V: Potential, c1: float, c2: float, grid: Grid3) -> np.ndarray:
    """M(x) = (2 / pi) c2 / |x| - c1 V(x) - x . grad V(x), origin cell ball-averaged."""
    coulomb = 2.0 / np.pi * c2 * _inverse_radius(grid)
    return coulomb - c1 * V.on_grid(grid) - virial(V).on_grid(grid)


def mourre_positivity(
    V: Potential,
    c1: float,
    c2: float,
    grid: Grid3,
    tol: Optional[ToleranceConfig] = None,
) -> MourreReport:
    """
    Pointwise positivity of M together with the decay caps of x . grad V
    and x . grad (x . grad V) weighted by <x>.

    Raises:
        DomainError: c1 or c2 outside [0, 1)
        UnsupportedKindError: tabulated V
    """
    _check_constants(c1, c2)
    tol = tol or ToleranceConfig()
    second = second_virial(V)
    x, y, z = grid.coordinates
    second_values = np.broadcast_to(second(x, y, z), grid.shape)
    M = mourre_field(V, c1, c2, grid)
    idx = np.unravel_index(int(np.argmin(M)), grid.shape)
    weight = np.sqrt(1.0 + grid.radius**2)
    report = MourreReport(
        c1=float(c1),
        c2=float(c2),
        min_m=float(M[idx]),
        argmin=tuple(float(grid.axis[i]) for i in idx),
        virial_cap=float(np.max(weight * np.abs(virial(V).on_grid(grid)))),
        second_virial_cap=float(np.max(weight * np.abs(second_values))),
        kato_margin=kato_check(gaussian_field(grid)).margin,
        decay_cap=tol.decay_cap,
        passed=bool(M[idx] > 0 and c1 + c2 < 1.0),
    )
    logger.info(
        f"Mourre c1={c1} c2={c2}: min M = {report.min_m:.4e} at {report.argmin}, "
        f"{'pass' if report.passed else 'fail'}"
    )
    return report


@dataclass(frozen=True)
class FormSample:
    t_form: float
    m_form: float

    @property
    def gap(self) -> float:
        return self.t_form - self.m_form


@dataclass
class MourreFormReport:
    c1: float
    c2: float
    samples: List[FormSample]
    passed: bool


def mourre_form_check(
    V: Potential,
    c1: float,
    c2: float,
    fields: Sequence[Field],
) -> MourreFormReport:
    """
    Samples <f, (T - (1 - c1 - c2) H0) f> >= <f, M f> >= 0 with
    T = (1 - c1) H0 - c1 V - x . grad V, on the given fields.

    The first inequality is c2 times the Kato margin. The second is only
    required where M is pointwise positive.
    """
    _check_constants(c1, c2)
    samples = []
    passed = True
    for f in fields:
        grid = f.grid
        density = np.abs(f.values) ** 2
        potential_part = grid.cell_volume * np.sum(
            density * (c1 * V.on_grid(grid) + virial(V).on_grid(grid))
        )
        kinetic = float(inner(f, abs_d_apply(f)).real)
        M = mourre_field(V, c1, c2, grid)
        sample = FormSample(
            t_form=float(c2 * kinetic - potential_part),
            m_form=float(grid.cell_volume * np.sum(density * M)),
        )
        samples.append(sample)
        slack = FORM_TOL * f.norm() ** 2
        if sample.gap < -slack or (np.min(M) > 0 and sample.m_form < -slack):
            passed = False
    return MourreFormReport(float(c1), float(c2), samples, passed)


@dataclass(frozen=True)
class CommutatorCheck:
    tau: float
    defect: float
    route: str


def commutator_check(
    V: Potential,
    f: Field,
    tau: float = COMMUTATOR_TAU,
    route: str = "resample",
) -> CommutatorCheck:
    """
    Central difference of tau -> U_{-tau} H U_tau f at 0 against (|D| - x . grad V) f.

    route "resample" applies dilate_field on both sides of H. Route "exact"
    differentiates the closed form exp(tau) H0 + V_tau and only checks the
    virial of V.
    """
    if route not in ("exact", "resample"):
        raise DomainError(f"unknown commutator route '{route}'")
    grid = f.grid
    if route == "exact":
        plus = conjugated_hamiltonian_apply(V, tau, f)
        minus = conjugated_hamiltonian_apply(V, -tau, f)
    else:
        plus = dilate_field(-tau, hamiltonian_apply(V, dilate_field(tau, f)), escape_tol=None)
        minus = dilate_field(tau, hamiltonian_apply(V, dilate_field(-tau, f)), escape_tol=None)
    derivative = (plus - minus) * (1.0 / (2.0 * tau))
    target = abs_d_apply(f) - Field(grid, virial(V).on_grid(grid) * f.values)
    defect = (derivative - target).norm() / target.norm()
    logger.debug(f"Commutator tau={tau} route={route}: defect {defect:.3e}")
    return CommutatorCheck(float(tau), float(defect), route)
