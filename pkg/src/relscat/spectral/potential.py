"""
Potential families, their factorization V = u0 v0, dilates and virials.

Every potential is V(x) = scale * a * shape(exp(-tau) x), where shape is the
unit-coupling profile of its kind:

    gaussian-well       -exp(-r^2 / width^2)
    yukawa-regularized  -exp(-mu r) / <r>
    bump                -exp(1 - 1 / (1 - (r/radius)^2)) for r < radius
    tabulated           real part of a field file, interpolated
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.optimize import brentq

from ..core.config import PotentialConfig
from ..core.error_handler import DomainError, UnsupportedKindError
from .grid import Field, Grid3

logger = logging.getLogger("relscat.spectral.potential")

GAUSSIAN = "gaussian-well"
YUKAWA = "yukawa-regularized"
BUMP = "bump"
TABULATED = "tabulated"
ANALYTIC_KINDS = (GAUSSIAN, YUKAWA, BUMP)

PointMap = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


class TabulatedProfile:
    """Samples of a real potential on its own grid with trilinear interpolation."""

    def __init__(self, f: Field):
        self.grid = f.grid
        self.values = np.ascontiguousarray(f.values.real, dtype=float)
        axis = self.grid.axis
        self._interp = RegularGridInterpolator(
            (axis, axis, axis), self.values, bounds_error=False, fill_value=0.0
        )

    def __call__(self, x: np.ndarray, y: np.ndarray, z: np.ndarray) -> np.ndarray:
        x, y, z = np.broadcast_arrays(x, y, z)
        pts = np.stack([x.ravel(), y.ravel(), z.ravel()], axis=1)
        return self._interp(pts).reshape(x.shape)

    def virial(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        x . grad V by 4th-order central differences on the table grid.

        Returns:
            (virial values, boundary mask); the two outermost layers on each
            face lack a full stencil, are set to 0 and flagged in the mask.
        """
        v = self.values
        h = self.grid.h
        x, y, z = self.grid.coordinates
        out = np.zeros_like(v)
        for axis, coord in enumerate((x, y, z)):
            d = (
                -np.roll(v, -2, axis)
                + 8 * np.roll(v, -1, axis)
                - 8 * np.roll(v, 1, axis)
                + np.roll(v, 2, axis)
            ) / (12 * h)
            out += coord * d
        mask = np.zeros(v.shape, dtype=bool)
        for axis in range(3):
            edge = [slice(None)] * 3
            for idx in (0, 1, -2, -1):
                edge[axis] = idx
                mask[tuple(edge)] = True
        out[mask] = 0.0
        return out, mask


@dataclass(frozen=True)
class Potential:
    """Real, decaying potential V(x) = scale * a * shape(exp(-tau) x)."""

    kind: str = GAUSSIAN
    a: float = 1.0
    width: float = 1.0
    mu: float = 1.0
    radius: float = 2.0
    sigma: float = 4.0
    tau: float = 0.0
    scale: float = 1.0
    table: Optional[TabulatedProfile] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.kind not in ANALYTIC_KINDS + (TABULATED,):
            raise UnsupportedKindError(f"unknown potential kind '{self.kind}'")
        if self.kind == TABULATED and self.table is None:
            raise DomainError("tabulated potential needs a table")

    @property
    def is_analytic(self) -> bool:
        return self.kind in ANALYTIC_KINDS

    @property
    def is_zero(self) -> bool:
        return self.a == 0.0 or self.scale == 0.0

    @property
    def amplitude(self) -> float:
        return self.scale * self.a

    # radial profile of the unit-coupling shape and its derivatives

    def _shape(self, r: np.ndarray) -> np.ndarray:
        if self.kind == GAUSSIAN:
            return -np.exp(-((r / self.width) ** 2))
        if self.kind == YUKAWA:
            return -np.exp(-self.mu * r) / np.sqrt(1.0 + r * r)
        s = r / self.radius
        out = np.zeros_like(r)
        inside = s < 1.0
        out[inside] = -np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
        return out

    def _shape_d1(self, r: np.ndarray) -> np.ndarray:
        if self.kind == GAUSSIAN:
            w2 = self.width**2
            return (2.0 * r / w2) * np.exp(-r * r / w2)
        if self.kind == YUKAWA:
            br = np.sqrt(1.0 + r * r)
            return np.exp(-self.mu * r) * (self.mu / br + r / br**3)
        s = r / self.radius
        out = np.zeros_like(r)
        inside = s < 1.0
        si = s[inside]
        dphi = -2.0 * si / (1.0 - si**2) ** 2
        out[inside] = -np.exp(1.0 - 1.0 / (1.0 - si**2)) * dphi / self.radius
        return out

    def _shape_d2(self, r: np.ndarray) -> np.ndarray:
        if self.kind == GAUSSIAN:
            w2 = self.width**2
            return np.exp(-r * r / w2) * (2.0 / w2 - 4.0 * r * r / w2**2)
        if self.kind == YUKAWA:
            br = np.sqrt(1.0 + r * r)
            q = self.mu / br + r / br**3
            dq = -self.mu * r / br**3 + 1.0 / br**3 - 3.0 * r * r / br**5
            return np.exp(-self.mu * r) * (-self.mu * q + dq)
        s = r / self.radius
        out = np.zeros_like(r)
        inside = s < 1.0
        si = s[inside]
        one = 1.0 - si**2
        dphi = -2.0 * si / one**2
        ddphi = -2.0 / one**2 - 8.0 * si**2 / one**3
        out[inside] = (
            -np.exp(1.0 - 1.0 / one) * (dphi**2 + ddphi) / self.radius**2
        )
        return out

    def __call__(self, x: np.ndarray, y: np.ndarray, z: np.ndarray) -> np.ndarray:
        """V at the points (x, y, z)."""
        c = np.exp(-self.tau)
        if self.kind == TABULATED:
            assert self.table is not None
            return self.amplitude * self.table(c * x, c * y, c * z)
        r = c * np.sqrt(x * x + y * y + z * z)
        return self.amplitude * self._shape(np.asarray(r, dtype=float))

    def on_grid(self, grid: Grid3) -> np.ndarray:
        """Real samples of V on the nodes of grid."""
        if (
            self.kind == TABULATED
            and self.tau == 0.0
            and self.table is not None
            and self.table.grid == grid
        ):
            return self.amplitude * self.table.values
        x, y, z = grid.coordinates
        return np.broadcast_to(self(x, y, z), grid.shape).astype(float)

    def with_coupling(self, a: float) -> "Potential":
        return replace(self, a=float(a))

    def scaled(self, c: float) -> "Potential":
        """c * V; e^{-tau} V_tau is dilate(V, tau).scaled(exp(-tau))."""
        return replace(self, scale=self.scale * float(c))

    def support_radius(self, rel_cut: float = 1e-7) -> float:
        """Radius beyond which |V| < rel_cut * max |V| (analytic kinds)."""
        if not 0 < rel_cut < 1:
            raise DomainError("rel_cut must lie in (0, 1)")
        growth = np.exp(self.tau)
        if self.kind == GAUSSIAN:
            return growth * self.width * np.sqrt(np.log(1.0 / rel_cut))
        if self.kind == BUMP:
            return growth * self.radius
        if self.kind == YUKAWA:
            target = np.log(rel_cut)

            def excess(r: float) -> float:
                return -self.mu * r - 0.5 * np.log1p(r * r) - target

            upper = 1.0
            while excess(upper) > 0:
                upper *= 2.0
            return growth * brentq(excess, 0.0, upper)
        assert self.table is not None
        vals = np.abs(self.table.values)
        peak = vals.max()
        if peak == 0.0:
            return 0.0
        return growth * float(self.table.grid.radius[vals >= rel_cut * peak].max())

    def mass_outside(self, grid: Grid3, radius: float) -> float:
        """Fraction of the grid integral of |V| carried by nodes with |x| > radius."""
        v = np.abs(self.on_grid(grid))
        total = v.sum()
        if total == 0.0:
            return 0.0
        return float(v[grid.radius > radius].sum() / total)

    @classmethod
    def tabulated(cls, f: Field, a: float = 1.0, sigma: float = 4.0) -> "Potential":
        return cls(kind=TABULATED, a=a, sigma=sigma, table=TabulatedProfile(f))

    @classmethod
    def from_config(cls, config: PotentialConfig) -> "Potential":
        """Build a potential from a recipe's potential block."""
        if config.kind == TABULATED:
            from .field_io import read_field

            if not config.path:
                raise DomainError("tabulated potential needs 'path'")
            table = TabulatedProfile(read_field(config.path))
            return cls(kind=TABULATED, a=config.a, sigma=config.sigma, table=table)
        return cls(
            kind=config.kind,
            a=config.a,
            width=config.width,
            mu=config.mu,
            radius=config.radius,
            sigma=config.sigma,
        )


def factorize(V: Potential) -> Tuple[PointMap, PointMap]:
    """
    v0 = |V|^{1/2}, u0 = v0 sgn(V) with sgn(0) = 0.

    Returns:
        (v0, u0) as point maps
    """

    def v0(x: np.ndarray, y: np.ndarray, z: np.ndarray) -> np.ndarray:
        return np.sqrt(np.abs(V(x, y, z)))

    def u0(x: np.ndarray, y: np.ndarray, z: np.ndarray) -> np.ndarray:
        vals = V(x, y, z)
        return np.sqrt(np.abs(vals)) * np.sign(vals)

    return v0, u0


def factorize_on_grid(V: Potential, grid: Grid3) -> Tuple[np.ndarray, np.ndarray]:
    """(v0, u0) sampled on the nodes of grid."""
    vals = V.on_grid(grid)
    v0 = np.sqrt(np.abs(vals))
    return v0, v0 * np.sign(vals)


def dilate(V: Potential, tau: float) -> Potential:
    """V_tau(x) = V(exp(-tau) x)."""
    return replace(V, tau=V.tau + float(tau))


class VirialMap:
    """
    x . grad V as a point map.

    For tabulated potentials the values come from finite differences on the
    table grid; boundary_mask flags the cells without a full stencil.
    """

    def __init__(self, V: Potential):
        self.V = V
        self.boundary_mask: Optional[np.ndarray] = None
        self._tab: Optional[TabulatedProfile] = None
        if V.kind == TABULATED:
            assert V.table is not None
            values, mask = V.table.virial()
            self.boundary_mask = mask
            self._tab = TabulatedProfile(Field(V.table.grid, values))

    def __call__(self, x: np.ndarray, y: np.ndarray, z: np.ndarray) -> np.ndarray:
        V = self.V
        c = np.exp(-V.tau)
        if self._tab is not None:
            return V.amplitude * self._tab(c * x, c * y, c * z)
        r = c * np.sqrt(x * x + y * y + z * z)
        r = np.asarray(r, dtype=float)
        return V.amplitude * r * V._shape_d1(r)

    def on_grid(self, grid: Grid3) -> np.ndarray:
        x, y, z = grid.coordinates
        return np.broadcast_to(self(x, y, z), grid.shape).astype(float)


def virial(V: Potential) -> VirialMap:
    """Ṽ(x) = x . grad V(x)."""
    return VirialMap(V)


def second_virial(V: Potential) -> PointMap:
    """
    x . grad (x . grad V) = r f' + r^2 f'' for radial analytic kinds.

    Raises:
        UnsupportedKindError: tabulated potentials
    """
    if not V.is_analytic:
        raise UnsupportedKindError("second virial needs an analytic potential kind")

    def second(x: np.ndarray, y: np.ndarray, z: np.ndarray) -> np.ndarray:
        r = np.exp(-V.tau) * np.sqrt(x * x + y * y + z * z)
        r = np.asarray(r, dtype=float)
        return V.amplitude * (r * V._shape_d1(r) + r * r * V._shape_d2(r))

    return second


@dataclass(frozen=True)
class DecayReport:
    sigma: float
    sup: float
    argmax_radius: float
    cap: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "sigma": self.sigma,
            "sup": self.sup,
            "argmax_radius": self.argmax_radius,
            "cap": self.cap,
            "passed": self.passed,
        }


def decay_check(V: Potential, sigma: float, grid: Grid3, cap: float = 1e3) -> DecayReport:
    """sup over nodes of <x>^sigma |V(x)| against cap."""
    weighted = (1.0 + grid.radius**2) ** (0.5 * sigma) * np.abs(V.on_grid(grid))
    idx = np.unravel_index(int(np.argmax(weighted)), grid.shape)
    sup = float(weighted[idx])
    report = DecayReport(
        sigma=float(sigma),
        sup=sup,
        argmax_radius=float(grid.radius[idx]),
        cap=float(cap),
        passed=bool(np.isfinite(sup) and sup <= cap),
    )
    logger.debug(f"decay_check sigma={sigma}: sup={sup:.4e} at r={report.argmax_radius:.3f}")
    return report


def l3_norm(V: Potential, grid: Grid3) -> float:
    """(h^3 sum |V|^3)^{1/3}."""
    return float((grid.cell_volume * np.sum(np.abs(V.on_grid(grid)) ** 3)) ** (1.0 / 3.0))
