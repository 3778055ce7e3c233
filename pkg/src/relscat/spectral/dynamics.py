"""
Free semigroup and unitary group, the interacting propagator and
time-dependent wave-operator probes.

The multiplier routes act on the periodic grid. The kernel route for the
propagator pairs two radial probes through the Poisson kernel with complex
parameter s = eps + i t,

    <exp(-s H0) f, g> = int_0^inf 4 pi r^2 conj(p_s(r)) Gamma(r) dr,

where Gamma is the spherical mean of the cross-correlation of f and g, and
extrapolates eps -> 0. Its reference is the radial multiplier pairing
4 pi int k^2 exp(i conj(t) k) f^(k) g^(k) dk, which needs no box.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import scipy.fft
from numpy.polynomial.legendre import leggauss
from scipy import integrate

from ..core.error_handler import ConfigError, DomainError, NumericalError
from .grid import Field, Grid3, inner, multiplier_apply, padded_multiplier_apply
from .kernel_ops import RadialKernel, cached_op, richardson
from .potential import Potential

logger = logging.getLogger("relscat.spectral.dynamics")

CFL_LIMIT = 0.5
WRAP_FRACTION = 0.8
STABILIZATION_TOL = 2e-2
_RADIAL_NODES = 64


@dataclass(frozen=True)
class PropagatorConfig:
    t: float
    dt: float
    eps_list: Sequence[float] = (0.2, 0.1, 0.05)

    def validate(self) -> bool:
        if not self.dt > 0:
            return False
        steps = abs(self.t) / self.dt
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            return False
        eps = np.asarray(self.eps_list, dtype=float)
        return bool(eps.size and np.all(eps > 0) and np.all(np.diff(eps) < 0))

    @property
    def steps(self) -> int:
        return int(round(abs(self.t) / self.dt))


def semigroup_apply(t: float, f: Field, pad: int = 1) -> Field:
    """
    exp(-t H0) f through the multiplier exp(-t |k|).

    The Poisson kernel decays like |x|^-4, so periodic images of the output
    leak into the box; pad > 1 moves them out.

    Raises:
        DomainError: t <= 0 or pad < 1
    """
    if not t > 0:
        raise DomainError(f"semigroup needs t > 0, got {t}")
    return padded_multiplier_apply(f, lambda k: np.exp(-t * k), pad)


def semigroup_kernel_apply(t: float, f: Field) -> Field:
    """exp(-t H0) f by convolution with t / (pi^2 (r^2 + t^2)^2)."""
    if not t > 0:
        raise DomainError(f"semigroup needs t > 0, got {t}")
    return cached_op(RadialKernel("poisson", t=t), f.grid).apply(f)


def propagator_apply(t: float, f: Field) -> Field:
    """exp(-i t H0) f through the multiplier exp(-i t |k|)."""
    if t == 0:
        return f.copy()
    return multiplier_apply(f.grid, np.exp(-1j * t * f.grid.k_norm), f)


# radial probes and the kernel route


@dataclass(frozen=True)
class RadialProbe:
    """Smooth compactly supported radial bump exp(1 - 1/(1 - (r/R)^2)) scaled by amplitude."""

    radius: float
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise DomainError("probe radius must be positive")

    def __call__(self, r: np.ndarray) -> np.ndarray:
        s = np.asarray(r, dtype=float) / self.radius
        out = np.zeros_like(s)
        inside = s < 1.0
        out[inside] = self.amplitude * np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
        return out

    def on_grid(self, grid: Grid3) -> Field:
        return Field(grid, self(grid.radius))


def _spherical_mean(g: RadialProbe, a: np.ndarray, r: float) -> np.ndarray:
    """Mean of g over the sphere of radius r centered at distance a from the origin."""
    x, w = leggauss(_RADIAL_NODES)
    lo = np.abs(a - r)
    hi = np.minimum(a + r, g.radius)
    out = np.zeros_like(a)
    ok = hi > lo
    if not np.any(ok):
        return out
    lo_ok, hi_ok, a_ok = lo[ok], hi[ok], a[ok]
    half = 0.5 * (hi_ok - lo_ok)
    rho = lo_ok[:, None] + half[:, None] * (x[None, :] + 1.0)
    total = half * np.sum(w[None, :] * g(rho) * rho, axis=1)
    out[ok] = total / (2.0 * a_ok * r)
    return out


def correlation_mean(f: RadialProbe, g: RadialProbe, r: float) -> float:
    """Spherical mean over |z| = r of int conj(f(y)) g(y + z) dy."""
    x, w = leggauss(_RADIAL_NODES)
    a = 0.5 * f.radius * (x + 1.0)
    weights = 0.5 * f.radius * w * 4.0 * np.pi * a * a * f(a)
    mean = g(a) if r <= 0 else _spherical_mean(g, a, r)
    return float(np.sum(weights * mean))


def _panel_nodes(top: float, panels: int, order: int = 16):
    x, w = leggauss(order)
    edges = np.linspace(0.0, top, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    half = 0.5 * np.diff(edges)[:, None]
    return (mid + half * x[None, :]).ravel(), (half * w[None, :]).ravel()


def radial_transform(probe: RadialProbe, k: np.ndarray, panels: int = 64) -> np.ndarray:
    """Unitary Fourier transform sqrt(2 / pi) int r^2 sinc(k r) probe(r) dr."""
    r, w = _panel_nodes(probe.radius, panels)
    sinc = np.sinc(np.multiply.outer(np.asarray(k, dtype=float), r) / np.pi)
    return np.sqrt(2.0 / np.pi) * sinc @ (w * r * r * probe(r))


def radial_multiplier_pairing(
    t: complex,
    f: RadialProbe,
    g: RadialProbe,
    k_max: float = 120.0,
    panels: int = 240,
) -> complex:
    """
    <exp(-i t H0) f, g> = 4 pi int k^2 exp(i conj(t) k) f^(k) g^(k) dk.

    The multiplier route without a periodic box; the probe transforms are
    negligible beyond k_max.
    """
    k, w = _panel_nodes(k_max, panels)
    phase = np.exp(1j * np.conj(complex(t)) * k)
    product = radial_transform(f, k) * radial_transform(g, k)
    return complex(4.0 * np.pi * np.sum(w * k * k * phase * product))


def _poisson_conj(s: complex, r: float) -> complex:
    return complex(np.conj(s / (np.pi**2 * (r * r + s * s) ** 2)))


def regularized_pairing(t: complex, eps: float, f: RadialProbe, g: RadialProbe) -> complex:
    """<exp(-(eps + i t) H0) f, g> by radial quadrature."""
    s = complex(eps) + 1j * complex(t)
    if s.real <= 0:
        raise DomainError("regularized pairing needs Re(eps + i t) > 0")
    top = f.radius + g.radius
    peak = abs(s.imag)
    points = [peak] if 0 < peak < top else None

    def integrand(r: float) -> complex:
        return 4.0 * np.pi * r * r * _poisson_conj(s, r) * correlation_mean(f, g, r)

    kwargs: Dict = {"limit": 400, "epsabs": 1e-13, "epsrel": 1e-10}
    if points:
        kwargs["points"] = points
    real = integrate.quad(lambda r: integrand(r).real, 0.0, top, **kwargs)[0]
    imag = integrate.quad(lambda r: integrand(r).imag, 0.0, top, **kwargs)[0]
    return complex(real, imag)


@dataclass(frozen=True, eq=False)
class KernelPairing:
    t: complex
    eps: np.ndarray
    values: np.ndarray
    extrapolated: complex
    multiplier: complex
    grid_multiplier: Optional[complex] = None

    @property
    def relative_error(self) -> float:
        return abs(self.extrapolated - self.multiplier) / max(abs(self.multiplier), 1e-300)

    @property
    def grid_relative_error(self) -> Optional[float]:
        """Periodic-grid multiplier against the radial one; sampling error only."""
        if self.grid_multiplier is None:
            return None
        scale = max(abs(self.multiplier), 1e-300)
        return abs(self.grid_multiplier - self.multiplier) / scale

    @property
    def eps_order(self) -> float:
        """
        Order of |value(eps) - limit| in eps between the two smallest eps.

        The error is a eps + b eps^2 + ..., so the local order tends to 1
        from one side as eps shrinks.
        """
        errors = np.abs(self.values - self.extrapolated)
        order = np.argsort(self.eps)[:2]
        e, d = self.eps[order], errors[order]
        if np.any(d <= 0):
            return float("inf")
        return float(np.log(d[1] / d[0]) / np.log(e[1] / e[0]))

    def to_dict(self) -> Dict:
        t = complex(self.t)
        out = {
            "t": [t.real, t.imag],
            "eps": self.eps.tolist(),
            "values": [[v.real, v.imag] for v in self.values],
            "extrapolated": [self.extrapolated.real, self.extrapolated.imag],
            "multiplier": [self.multiplier.real, self.multiplier.imag],
            "relative_error": self.relative_error,
            "eps_order": self.eps_order,
        }
        if self.grid_multiplier is not None:
            out["grid_relative_error"] = self.grid_relative_error
        return out


def _multiplier_pairing(t: complex, f: Field, g: Field) -> complex:
    """<exp(-i t H0) f, g> on the grid; imaginary t gives the semigroup."""
    symbol = np.exp(-1j * complex(t) * f.grid.k_norm)
    return inner(multiplier_apply(f.grid, symbol, f), g)


def propagator_kernel_pairing(
    t: complex,
    f: RadialProbe,
    g: RadialProbe,
    grid: Optional[Grid3] = None,
    eps_list: Sequence[float] = (0.2, 0.1, 0.05),
) -> KernelPairing:
    """
    eps -> 0 limit of the regularized kernel pairing, against the multiplier route.

    The reference is radial_multiplier_pairing. The bumps are too sharp for a
    coarse periodic grid, so the grid multiplier is only reported when a grid
    is given.

    Raises:
        DomainError: t = 0
        NumericalError: the three-node and two-node extrapolations disagree
    """
    if t == 0:
        raise DomainError("propagator kernel pairing needs t != 0")
    eps = np.asarray(eps_list, dtype=float)
    if eps.size < 3 or np.any(eps <= 0):
        raise DomainError("eps_list needs at least three positive values")
    values = np.array([regularized_pairing(t, e, f, g) for e in eps])
    extrapolated = complex(richardson(eps[-3:], values[-3:], powers=(1.0, 2.0)))
    linear = complex(richardson(eps[-2:], values[-2:], powers=(1.0,)))
    if abs(extrapolated - linear) > 0.1 * abs(extrapolated) + 1e-12:
        raise NumericalError(
            f"eps extrapolation not converged at t={t}",
            partial={"eps": eps.tolist(), "values": values.tolist()},
        )
    on_grid = None
    if grid is not None:
        on_grid = complex(_multiplier_pairing(t, f.on_grid(grid), g.on_grid(grid)))
    result = KernelPairing(
        complex(t),
        eps,
        values,
        extrapolated,
        radial_multiplier_pairing(t, f, g),
        on_grid,
    )
    logger.info(f"Kernel pairing t={t}: relative error {result.relative_error:.3e}")
    return result


# interacting propagator


def _check_cfl(V_values: np.ndarray, grid: Grid3, dt: float) -> None:
    rate = max(float(np.max(np.abs(V_values))), float(grid.k_norm.max()))
    if dt * rate > CFL_LIMIT:
        raise ConfigError(
            f"time step {dt} too large: dt * max(|V|, |k|max) = {dt * rate:.3f} > {CFL_LIMIT}"
        )


def _steps(t: float, dt: float) -> int:
    if not dt > 0:
        raise ConfigError(f"time step must be positive, got {dt}")
    steps = abs(t) / dt
    if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
        raise ConfigError(f"|t| / dt = {steps} is not an integer")
    return int(round(steps))


class SplittingPropagator:
    """Strang splitting exp(-i dt V/2) exp(-i dt H0) exp(-i dt V/2)."""

    def __init__(self, V: Potential, grid: Grid3, dt: float):
        values = V.on_grid(grid)
        _check_cfl(values, grid, dt)
        self.grid = grid
        self.dt = dt
        self._values = values
        self._phase_cache: Dict[float, tuple] = {}

    def _phases(self, step: float):
        if step not in self._phase_cache:
            self._phase_cache[step] = (
                np.exp(-0.5j * step * self._values),
                np.exp(-1j * step * self.grid.k_norm),
            )
        return self._phase_cache[step]

    def step(self, psi: np.ndarray, step: float) -> np.ndarray:
        half, kinetic = self._phases(step)
        psi = half * psi
        psi = scipy.fft.ifftn(kinetic * scipy.fft.fftn(psi))
        return half * psi

    def run(self, f: Field, t: float, callback: Optional[Callable] = None) -> Field:
        steps = _steps(t, self.dt)
        step = self.dt if t >= 0 else -self.dt
        psi = f.values.copy()
        for j in range(steps):
            psi = self.step(psi, step)
            if callback is not None:
                callback(j + 1, (j + 1) * step, psi)
        return Field(self.grid, psi)


def full_propagator_apply(V: Potential, t: float, dt: float, f: Field) -> Field:
    """
    exp(-i t (H0 + V)) f by Strang splitting.

    Raises:
        ConfigError: |t| / dt not integral or the step violates the CFL limit
    """
    if V.is_zero:
        _steps(t, dt)
        return propagator_apply(t, f)
    return SplittingPropagator(V, f.grid, dt).run(f, t)


@dataclass
class TimeDependentPairing:
    T: float
    sign: int
    times: np.ndarray
    pairings: np.ndarray
    norms: np.ndarray
    variation: float
    scale: float
    warnings: List[str] = field(default_factory=list)

    @property
    def value(self) -> complex:
        return complex(self.pairings[-1])

    @property
    def stabilized(self) -> bool:
        return self.variation <= STABILIZATION_TOL * self.scale

    def abelian(self, eps: float) -> complex:
        """2 eps int_0^T exp(-2 eps t) P(t) dt plus exp(-2 eps T) P(T) for the tail."""
        t = np.abs(self.times)
        weights = np.exp(-2.0 * eps * t)
        body = 2.0 * eps * integrate.trapezoid(weights * self.pairings, t)
        return complex(body + np.exp(-2.0 * eps * t[-1]) * self.pairings[-1])

    def time_series(self) -> Dict[str, np.ndarray]:
        return {
            "t": self.times,
            "norm": self.norms,
            "pairing_re": self.pairings.real,
            "pairing_im": self.pairings.imag,
        }

    def to_dict(self) -> Dict:
        return {
            "T": self.T,
            "sign": self.sign,
            "value": [self.value.real, self.value.imag],
            "variation": self.variation,
            "stabilized": self.stabilized,
            "warnings": list(self.warnings),
        }


def timedependent_wave_pairing(
    V: Potential,
    f: Field,
    g: Field,
    T: float,
    dt: float,
    sign: int = 1,
    record_every: int = 10,
) -> TimeDependentPairing:
    """
    <f, exp(i t H) exp(-i t H0) g> for t = sign * T, recorded along the way.

    The variation between t = T/2 and t = T is reported; a pairing that has
    not settled within STABILIZATION_TOL ||f|| ||g|| carries a warning.

    Raises:
        ConfigError: T beyond WRAP_FRACTION * L, or a bad time step
    """
    grid = f.grid
    grid.check(g)
    if not T > 0:
        raise ConfigError(f"T must be positive, got {T}")
    if T > WRAP_FRACTION * grid.L:
        raise ConfigError(f"T = {T} exceeds {WRAP_FRACTION} L = {WRAP_FRACTION * grid.L}")
    steps = _steps(T, dt)
    half_step = steps // 2
    ghat = scipy.fft.fftn(g.values)
    step = sign * dt

    times: List[float] = [0.0]
    pairings: List[complex] = [inner(f, g)]
    norms: List[float] = [f.norm()]

    def record(j: int, t: float, psi: np.ndarray) -> None:
        if j % record_every and j not in (half_step, steps):
            return
        free = Field(grid, scipy.fft.ifftn(np.exp(-1j * t * grid.k_norm) * ghat))
        evolved = Field(grid, psi)
        times.append(t)
        pairings.append(inner(evolved, free))
        norms.append(evolved.norm())

    if V.is_zero:
        for j in range(1, steps + 1):
            record(j, j * step, propagator_apply(j * step, f).values)
    else:
        SplittingPropagator(V, grid, dt).run(f, sign * T, callback=record)

    t_arr = np.asarray(times)
    p_arr = np.asarray(pairings)
    mid = int(np.argmin(np.abs(np.abs(t_arr) - half_step * dt)))
    variation = float(abs(p_arr[-1] - p_arr[mid]))
    result = TimeDependentPairing(
        T=float(T),
        sign=sign,
        times=t_arr,
        pairings=p_arr,
        norms=np.asarray(norms),
        variation=variation,
        scale=f.norm() * g.norm(),
    )
    if not result.stabilized:
        message = (
            f"pairing not stabilized: |P(T) - P(T/2)| = {variation:.3e} "
            f"> {STABILIZATION_TOL} ||f|| ||g||"
        )
        result.warnings.append(message)
        logger.warning(message)
    logger.info(f"Time-dependent pairing T={T} sign={sign}: {result.value:.6e}")
    return result
