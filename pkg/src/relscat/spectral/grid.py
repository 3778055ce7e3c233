"""
Uniform centered 3-D grids, fields and Fourier multipliers.

Nodes are x_j = -L + j h (j = 0..n-1, h = 2L/n), so the origin is node n/2.
The continuum Fourier transform uses the symmetric normalization

    f^(k) = (2 pi)^{-3/2} int f(x) exp(-i k.x) dx,

discretized as (2 pi)^{-3/2} h^3 exp(-i k.x_0) FFT(f) on the dual nodes
k = 2 pi fftfreq(n, h). Multipliers are applied as IFFT(symbol * FFT(f)).
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Tuple, Union

import numpy as np
import scipy.fft
from numpy.polynomial.legendre import leggauss

from ..core.error_handler import ConfigError, DomainError, ShapeError

logger = logging.getLogger("relscat.spectral.grid")

Symbol = Union[np.ndarray, Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]]


@dataclass(frozen=True, eq=False)
class Grid3:
    """Uniform centered grid with n points per axis on [-L, L)^3."""

    n: int
    L: float

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Grid3):
            return NotImplemented
        return self.n == other.n and self.L == other.L

    def __hash__(self) -> int:
        return hash((self.n, self.L))

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.n

    @property
    def cell_volume(self) -> float:
        return self.h**3

    @property
    def shape(self) -> Tuple[int, int, int]:
        return (self.n, self.n, self.n)

    @property
    def origin_index(self) -> Tuple[int, int, int]:
        m = self.n // 2
        return (m, m, m)

    @property
    def k_nyquist(self) -> float:
        """Largest dual coordinate per axis, pi/h."""
        return np.pi / self.h

    @property
    def dual_cell_volume(self) -> float:
        return (2.0 * np.pi / (self.n * self.h)) ** 3

    @cached_property
    def axis(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.n)

    @cached_property
    def dual_axis(self) -> np.ndarray:
        return 2.0 * np.pi * scipy.fft.fftfreq(self.n, d=self.h)

    @cached_property
    def coordinates(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        x = self.axis
        return (x[:, None, None], x[None, :, None], x[None, None, :])

    @cached_property
    def dual_coordinates(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        k = self.dual_axis
        return (k[:, None, None], k[None, :, None], k[None, None, :])

    @cached_property
    def radius(self) -> np.ndarray:
        """|x| at every node."""
        x, y, z = self.coordinates
        return np.sqrt(x * x + y * y + z * z)

    @cached_property
    def k_norm(self) -> np.ndarray:
        """|k| at every dual node."""
        kx, ky, kz = self.dual_coordinates
        return np.sqrt(kx * kx + ky * ky + kz * kz)

    @cached_property
    def _shift_phase(self) -> np.ndarray:
        # exp(-i k.x_0) with x_0 = (-L, -L, -L)
        p = np.exp(1j * self.dual_axis * self.L)
        return p[:, None, None] * p[None, :, None] * p[None, None, :]

    def nodes_radius(self) -> np.ndarray:
        return self.radius

    def zeros(self) -> "Field":
        return Field(self, np.zeros(self.shape, dtype=complex))

    def field_from(
        self, fn: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
    ) -> "Field":
        """Sample fn(x, y, z) on the nodes."""
        x, y, z = self.coordinates
        values = np.broadcast_to(fn(x, y, z), self.shape)
        return Field(self, np.array(values, dtype=complex))

    def plane_wave(self, k0: np.ndarray) -> "Field":
        k0 = np.asarray(k0, dtype=float)
        return self.field_from(
            lambda x, y, z: np.exp(1j * (k0[0] * x + k0[1] * y + k0[2] * z))
        )

    def check(self, f: "Field") -> None:
        if f.grid != self:
            raise ShapeError(
                f"field lives on grid (n={f.grid.n}, L={f.grid.L}), "
                f"expected (n={self.n}, L={self.L})"
            )


@dataclass
class Field:
    """Complex samples of a function on a Grid3."""

    grid: Grid3
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=complex)
        if values.size != self.grid.n**3:
            raise ShapeError(
                f"field has {values.size} values, grid needs {self.grid.n ** 3}"
            )
        self.values = values.reshape(self.grid.shape)

    def norm(self) -> float:
        return float(np.sqrt(self.grid.cell_volume * np.sum(np.abs(self.values) ** 2)))

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())

    def real(self) -> np.ndarray:
        return self.values.real.copy()

    def _other(self, other: "Field") -> np.ndarray:
        self.grid.check(other)
        return other.values

    def __add__(self, other: "Field") -> "Field":
        return Field(self.grid, self.values + self._other(other))

    def __sub__(self, other: "Field") -> "Field":
        return Field(self.grid, self.values - self._other(other))

    def __mul__(self, scalar: complex) -> "Field":
        return Field(self.grid, self.values * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "Field":
        return Field(self.grid, -self.values)


def make_grid(n: int, L: float) -> Grid3:
    """
    Build a centered grid with spacing h = 2L/n.

    Raises:
        ConfigError: n odd or below 16, or L not positive
    """
    if not isinstance(n, (int, np.integer)) or n < 16 or n % 2:
        raise ConfigError(f"grid size n must be an even integer >= 16, got {n}")
    if not L > 0:
        raise ConfigError(f"grid half-extent L must be positive, got {L}")
    grid = Grid3(int(n), float(L))
    logger.debug(f"Grid n={grid.n} L={grid.L} h={grid.h}")
    return grid


def _symbol_values(grid: Grid3, symbol: Symbol) -> np.ndarray:
    if callable(symbol):
        values = np.broadcast_to(symbol(*grid.dual_coordinates), grid.shape)
    else:
        values = np.asarray(symbol)
        if values.shape != grid.shape:
            raise ShapeError(
                f"symbol shape {values.shape} does not match grid {grid.shape}"
            )
    return values


def multiplier_apply(grid: Grid3, symbol: Symbol, f: Field) -> Field:
    """
    Apply the Fourier multiplier symbol(D) to f.

    Args:
        grid: Grid of f
        symbol: Array on the dual grid (FFT order) or callable (kx, ky, kz) -> array
        f: Input field

    Returns:
        F^{-1} symbol(k) F f
    """
    grid.check(f)
    values = _symbol_values(grid, symbol)
    out = scipy.fft.ifftn(values * scipy.fft.fftn(f.values))
    return Field(grid, out)


def padded_multiplier_apply(
    f: Field, fn: Callable[[np.ndarray], np.ndarray], pad: int = 2
) -> Field:
    """
    fn(|D|) f on a grid enlarged pad times, restricted back to f's grid.

    Periodic images of f sit 2 pad L apart instead of 2 L.

    Raises:
        DomainError: pad < 1
    """
    grid = f.grid
    if pad < 1:
        raise DomainError("pad must be >= 1")
    if pad == 1:
        return multiplier_apply(grid, fn(grid.k_norm), f)
    big = make_grid(grid.n * pad, grid.L * pad)
    lo = (big.n - grid.n) // 2
    sl = slice(lo, lo + grid.n)
    values = np.zeros(big.shape, dtype=complex)
    values[sl, sl, sl] = f.values
    out = multiplier_apply(big, fn(big.k_norm), Field(big, values))
    return Field(grid, out.values[sl, sl, sl])


def radial_symbol(fn: Callable[[np.ndarray], np.ndarray]) -> Callable:
    """Wrap fn(|k|) as a multiplier symbol."""

    def symbol(kx: np.ndarray, ky: np.ndarray, kz: np.ndarray) -> np.ndarray:
        return fn(np.sqrt(kx * kx + ky * ky + kz * kz))

    return symbol


def abs_d_apply(f: Field) -> Field:
    """H_0 f = |D| f."""
    return multiplier_apply(f.grid, f.grid.k_norm, f)


def quarter_inverse_laplacian(grid: Grid3, f: Field) -> Field:
    """
    (-Laplacian)^{-1/4} f, multiplier |k|^{-1/2}.

    The k = 0 mode is set to zero.
    """
    k = grid.k_norm
    symbol = np.zeros_like(k)
    nonzero = k > 0
    symbol[nonzero] = k[nonzero] ** -0.5
    return multiplier_apply(grid, symbol, f)


def fourier_transform(f: Field) -> np.ndarray:
    """Continuum-normalized f^ on the dual grid (FFT order)."""
    grid = f.grid
    scale = grid.cell_volume / (2.0 * np.pi) ** 1.5
    return scale * grid._shift_phase * scipy.fft.fftn(f.values)


def inverse_fourier_transform(grid: Grid3, fhat: np.ndarray) -> Field:
    """Inverse of fourier_transform for dual-grid samples."""
    if np.shape(fhat) != grid.shape:
        raise ShapeError(f"dual samples shape {np.shape(fhat)} != {grid.shape}")
    scale = (2.0 * np.pi) ** 1.5 / grid.cell_volume
    values = scipy.fft.ifftn(scale * np.conj(grid._shift_phase) * fhat)
    return Field(grid, values)


def inner(f: Field, g: Field) -> complex:
    """<f, g> = h^3 sum conj(f) g."""
    f.grid.check(g)
    return complex(f.grid.cell_volume * np.vdot(f.values, g.values))


def weighted_norm(s: float, f: Field) -> float:
    """L2 norm of <x>^s f."""
    weight = (1.0 + f.grid.radius**2) ** (0.5 * s)
    return float(
        np.sqrt(f.grid.cell_volume * np.sum(np.abs(weight * f.values) ** 2))
    )


@dataclass(frozen=True)
class SphereQuad:
    """Product rule on the unit sphere: nodes (M, 3) and weights (M,)."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int = 0
    polar: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)

    @property
    def size(self) -> int:
        return len(self.weights)

    def integrate(self, values: np.ndarray) -> complex:
        return complex(np.sum(self.weights * values))

    def inner(self, phi: np.ndarray, psi: np.ndarray) -> complex:
        """Weighted sphere inner product sum_j w_j conj(phi_j) psi_j."""
        return complex(np.sum(self.weights * np.conj(phi) * psi))


def sphere_quad(order: int) -> SphereQuad:
    """
    Gauss-Legendre in cos(theta) times 2*order uniform azimuths.

    Integrates spherical harmonics of degree < 2*order exactly.

    Raises:
        ConfigError: order < 4
    """
    if order < 4:
        raise ConfigError(f"sphere quadrature order must be >= 4, got {order}")
    mu, w_mu = leggauss(order)
    n_phi = 2 * order
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    sin_theta = np.sqrt(1.0 - mu**2)

    nodes = np.stack(
        [
            (sin_theta[:, None] * np.cos(phi)[None, :]).ravel(),
            (sin_theta[:, None] * np.sin(phi)[None, :]).ravel(),
            np.broadcast_to(mu[:, None], (order, n_phi)).ravel(),
        ],
        axis=1,
    )
    weights = np.broadcast_to(w_mu[:, None] * (2.0 * np.pi / n_phi), (order, n_phi))
    return SphereQuad(
        nodes=nodes, weights=weights.ravel().copy(), order=order, polar=mu
    )
