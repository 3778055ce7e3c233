"""
Radial convolution kernels of the free resolvent and friends.

    g0        1 / (2 pi^2 r^2)                  (-Laplacian)^{-1/2}
    klambda   lambda exp(+-i lambda r) / (2 pi r)
    mlambda   lambda w(lambda r) / (2 pi^2 r)   w = sin ci + cos si
    glambda   g0 + klambda + mlambda            R0(lambda +- i0)
    q0        1 / (4 pi r)                      Newtonian kernel
    poisson   s / (pi^2 (r^2 + s^2)^2)          exp(-s |D|), Re s > 0
    eprime    lambda sin(lambda r) / (2 pi^2 r) spectral density E0'(lambda)

A KernelOp applies h^3 sum_q k(x_p - x_q) f(x_q) exactly through an FFT on
the zero-padded (2n)^3 lattice. The singular diagonal cell uses the average
of the kernel over the ball of volume h^3 (radius R_c = h (3 / 4 pi)^{1/3}),
or in "lattice" mode the value that makes the lattice sum exact on constants.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, Iterable, Optional, Sequence, Tuple

import numpy as np
import scipy.fft
from numpy.polynomial.legendre import leggauss
from scipy import integrate
from scipy.spatial.distance import cdist

from ..core.error_handler import AssemblyError, DomainError
from .grid import Field, Grid3, multiplier_apply, padded_multiplier_apply
from .specfun import resolvent_combo

logger = logging.getLogger("relscat.spectral.kernel_ops")

KINDS = ("g0", "klambda", "mlambda", "glambda", "q0", "poisson", "eprime")
LAMBDA_KINDS = ("klambda", "mlambda", "glambda", "eprime")
SELF_TERMS = ("ball", "lattice")
# regularized simple-cubic lattice sums sum'_j |j|^-2 and sum'_j |j|^-1
LATTICE_ZETA_2 = -8.913633
LATTICE_ZETA_1 = -2.837297

_BALL_NODES, _BALL_WEIGHTS = leggauss(32)


@dataclass(frozen=True)
class RadialKernel:
    """
    Kernel descriptor.

    lam is the energy for the lambda kinds; t is the (possibly complex)
    Poisson parameter; sign selects R0(lambda + i0) (+1) or R0(lambda - i0) (-1).
    """

    kind: str
    lam: float = 0.0
    t: complex = 0.0
    sign: int = 1

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise DomainError(f"unknown kernel kind '{self.kind}'")
        if self.sign not in (1, -1):
            raise DomainError("sign must be +1 or -1")
        if self.kind in LAMBDA_KINDS and not self.lam > 0:
            raise DomainError(f"kernel '{self.kind}' needs lambda > 0")
        if self.kind == "poisson" and complex(self.t) == 0:
            raise DomainError("poisson kernel needs t != 0")

    @property
    def is_real(self) -> bool:
        return self.kind in ("g0", "mlambda", "q0", "eprime") or (
            self.kind == "poisson" and complex(self.t).imag == 0.0
        )


def _values(k: RadialKernel, r: np.ndarray) -> np.ndarray:
    lam = k.lam
    if k.kind == "g0":
        return 1.0 / (2.0 * np.pi**2 * r * r)
    if k.kind == "q0":
        return 1.0 / (4.0 * np.pi * r)
    if k.kind == "klambda":
        return lam * np.exp(1j * k.sign * lam * r) / (2.0 * np.pi * r)
    if k.kind == "mlambda":
        return lam * resolvent_combo(lam * r) / (2.0 * np.pi**2 * r)
    if k.kind == "glambda":
        return (
            _values(RadialKernel("g0"), r)
            + _values(RadialKernel("klambda", lam, sign=k.sign), r)
            + _values(RadialKernel("mlambda", lam), r)
        )
    if k.kind == "eprime":
        return lam * np.sin(lam * r) / (2.0 * np.pi**2 * r)
    s = complex(k.t)
    return s / (np.pi**2 * (r * r + s * s) ** 2)


def eval_kernel(k: RadialKernel, r: "np.ndarray | float") -> "np.ndarray | complex":
    """
    Pointwise kernel value at r > 0.

    Raises:
        DomainError: r <= 0 (the diagonal is handled by assemble)
    """
    arr = np.asarray(r, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("eval_kernel requires r > 0")
    out = np.asarray(_values(k, arr.ravel()), dtype=complex).reshape(arr.shape)
    if np.ndim(r) == 0:
        return complex(out)
    return out


def radial_profile(k: RadialKernel, r: np.ndarray) -> np.ndarray:
    """Kernel samples for CSV dumps."""
    return np.asarray(eval_kernel(k, np.asarray(r, dtype=float)))


def ball_radius(h: float) -> float:
    """Radius of the ball with volume h^3."""
    return h * (3.0 / (4.0 * np.pi)) ** (1.0 / 3.0)


def _ball_average(fn, R: float) -> complex:
    """(3 / R^3) int_0^R fn(r) r^2 dr for fn smooth enough on (0, R]."""
    r = 0.5 * R * (_BALL_NODES + 1.0)
    w = 0.5 * R * _BALL_WEIGHTS
    return complex(3.0 / R**3 * np.sum(w * r * r * fn(r)))


def diagonal_value(k: RadialKernel, h: float) -> complex:
    """
    Value used for the zero-offset cell.

    1/r^2 and 1/r are averaged in closed form over the ball of radius R_c
    (3 / R_c^2 and 3 / (2 R_c)). Smooth remainders take their r -> 0 limit,
    except the logarithmic remainder of mlambda which is averaged numerically.
    """
    R = ball_radius(h)
    lam = k.lam
    if k.kind == "g0":
        return 3.0 / (2.0 * np.pi**2 * R * R)
    if k.kind == "q0":
        return 3.0 / (8.0 * np.pi * R)
    if k.kind == "klambda":
        return lam / (2.0 * np.pi) * (3.0 / (2.0 * R) + 1j * k.sign * lam)
    if k.kind == "mlambda":
        singular = lam / (2.0 * np.pi**2) * (-np.pi / 2.0) * 3.0 / (2.0 * R)
        remainder = _ball_average(
            lambda r: lam * (resolvent_combo(lam * r) + np.pi / 2.0) / (2.0 * np.pi**2 * r),
            R,
        )
        return singular + remainder
    if k.kind == "glambda":
        return (
            diagonal_value(RadialKernel("g0"), h)
            + diagonal_value(RadialKernel("klambda", lam, sign=k.sign), h)
            + diagonal_value(RadialKernel("mlambda", lam), h)
        )
    if k.kind == "eprime":
        return lam * lam / (2.0 * np.pi**2)
    s = complex(k.t)
    return 1.0 / (np.pi**2 * s**3)


def _singular_coefficients(k: RadialKernel) -> Tuple[float, float]:
    """(c2, c1) of the c2 / r^2 + c1 / r part of k at the origin."""
    lam = k.lam
    if k.kind == "g0":
        return 1.0 / (2.0 * np.pi**2), 0.0
    if k.kind == "q0":
        return 0.0, 1.0 / (4.0 * np.pi)
    if k.kind == "klambda":
        return 0.0, lam / (2.0 * np.pi)
    if k.kind == "mlambda":
        return 0.0, -lam / (4.0 * np.pi)
    if k.kind == "glambda":
        return 1.0 / (2.0 * np.pi**2), lam / (4.0 * np.pi)
    return 0.0, 0.0


def lattice_diagonal(k: RadialKernel, h: float) -> complex:
    """
    Zero-offset value that makes the lattice sum of the 1/r^2 and 1/r parts
    exact on constants.

    The ball average leaves an O(h) error for 1/r^2 (O(h^2) for 1/r) in
    h^3 sum_q k(x_p - x_q) f(x_q); replacing it by -zeta(p) h^(3 - p) per
    singular term moves the error to O(h^3).
    """
    c2, c1 = _singular_coefficients(k)
    rho = ball_radius(1.0)
    shift = c2 * (-LATTICE_ZETA_2 - 3.0 / rho**2) / h**2
    shift += c1 * (-LATTICE_ZETA_1 - 1.5 / rho) / h
    return diagonal_value(k, h) + shift


def self_term(k: RadialKernel, h: float, mode: str = "ball") -> complex:
    if mode not in SELF_TERMS:
        raise DomainError(f"unknown self term '{mode}', expected one of {SELF_TERMS}")
    return diagonal_value(k, h) if mode == "ball" else lattice_diagonal(k, h)


def kernel_matrix(k: RadialKernel, points: np.ndarray, h: float) -> np.ndarray:
    """
    Dense kernel matrix k(x_p - x_q) between distinct grid points.

    On the lattice h Z^3 (or a shift of it) |x_p - x_q|^2 / h^2 is an integer,
    so k is evaluated once per distinct distance and looked up.

    Args:
        k: Kernel
        points: (N, 3) grid node coordinates
        h: Grid spacing (fixes the diagonal cell value)
    """
    steps = points / h
    lattice = np.rint(steps - steps[:1])
    if len(points) and np.max(np.abs(steps - steps[:1] - lattice)) < 1e-6:
        ij = lattice.astype(np.int32)
        d2 = np.zeros((len(points), len(points)), dtype=np.int32)
        for axis in range(3):
            d2 += (ij[:, None, axis] - ij[None, :, axis]) ** 2
        r = h * np.sqrt(np.arange(int(d2.max()) + 1, dtype=float))
        r[0] = 1.0
        table = np.asarray(_values(k, r), dtype=complex)
        table[0] = diagonal_value(k, h)
        return table[d2]
    r = cdist(points, points)
    diag = np.eye(len(points), dtype=bool)
    r[diag] = 1.0
    out = np.asarray(_values(k, r), dtype=complex)
    out[diag] = diagonal_value(k, h)
    return out


def check_resolution(k: RadialKernel, grid: Grid3) -> None:
    if k.kind in LAMBDA_KINDS and k.lam * grid.h >= np.pi:
        raise AssemblyError(
            f"kernel '{k.kind}' oscillates faster than the grid resolves "
            f"(lambda h = {k.lam * grid.h:.3f} >= pi)"
        )
    if k.kind == "poisson" and complex(k.t).real <= 0:
        raise AssemblyError(
            "poisson kernel with Re t <= 0 is not integrable on the grid "
            "(use the radial pairing for real-time propagators)"
        )


class KernelOp:
    """
    Discretized convolution operator on a grid.

    The kernel is sampled at the offsets j h, |j| <= n - 1 per axis, and
    stored wrapped on the (2n)^3 lattice so that one padded FFT convolution
    equals the double sum over grid nodes.
    """

    def __init__(self, kernel: RadialKernel, grid: Grid3, mode: str = "ball"):
        check_resolution(kernel, grid)
        self.kernel = kernel
        self.grid = grid
        self.mode = mode
        self.diagonal = self_term(kernel, grid.h, mode)

        n = grid.n
        m = 2 * n
        offsets = np.arange(m)
        offsets = np.where(offsets < n, offsets, offsets - m) * grid.h
        ox = offsets[:, None, None]
        oy = offsets[None, :, None]
        oz = offsets[None, None, :]
        r = np.sqrt(ox * ox + oy * oy + oz * oz)
        r[0, 0, 0] = 1.0
        sampled = np.asarray(_values(kernel, r), dtype=complex)
        sampled[0, 0, 0] = self.diagonal
        # offset n is never reached by node differences
        sampled[n, :, :] = 0.0
        sampled[:, n, :] = 0.0
        sampled[:, :, n] = 0.0
        self.khat = scipy.fft.fftn(sampled) * grid.cell_volume
        logger.debug(
            f"Assembled {kernel.kind} (lam={kernel.lam}, t={kernel.t}, "
            f"sign={kernel.sign}) on n={n}"
        )

    def pad_transform(self, f: Field) -> np.ndarray:
        self.grid.check(f)
        n = self.grid.n
        padded = np.zeros((2 * n,) * 3, dtype=complex)
        padded[:n, :n, :n] = f.values
        return scipy.fft.fftn(padded)

    def apply_transformed(self, fhat_padded: np.ndarray) -> Field:
        n = self.grid.n
        out = scipy.fft.ifftn(self.khat * fhat_padded)[:n, :n, :n]
        return Field(self.grid, out)

    def apply(self, f: Field) -> Field:
        return self.apply_transformed(self.pad_transform(f))

    __call__ = apply

    def tail_mass(self) -> float:
        """
        Fraction of int |k| over R^3 lying beyond the box half-extent L.

        Infinite for kernels that are not absolutely integrable.
        """
        return kernel_tail_fraction(self.kernel, self.grid.L)


def assemble(k: RadialKernel, grid: Grid3, mode: str = "ball") -> KernelOp:
    """
    Discretize kernel k on grid; mode picks the zero-offset value (see self_term).

    Raises:
        AssemblyError: kernel not integrable or not resolved on the grid
    """
    return KernelOp(k, grid, mode)


@lru_cache(maxsize=8)
def cached_op(k: RadialKernel, grid: Grid3, mode: str = "ball") -> KernelOp:
    return assemble(k, grid, mode)


def apply_g0(f: Field) -> Field:
    return cached_op(RadialKernel("g0"), f.grid).apply(f)


def apply_q0(f: Field) -> Field:
    return cached_op(RadialKernel("q0"), f.grid).apply(f)


def apply_resolvent(lam: float, sign: int, f: Field, mode: str = "ball") -> Field:
    """
    R0(lambda +- i0) f = (G0 + K_lambda^+- + M_lambda) f.

    The three convolutions share one forward transform. mode "ball" matches
    the Birman-Schwinger matrices; "lattice" is the accurate standalone route.

    Raises:
        DomainError: lambda <= 0 (use apply_g0)
    """
    if not lam > 0:
        raise DomainError("apply_resolvent needs lambda > 0; use apply_g0 at lambda = 0")
    grid = f.grid
    ops = [
        cached_op(RadialKernel("g0"), grid, mode),
        cached_op(RadialKernel("klambda", lam, sign=sign), grid, mode),
        cached_op(RadialKernel("mlambda", lam), grid, mode),
    ]
    fhat = ops[0].pad_transform(f)
    khat = ops[0].khat + ops[1].khat + ops[2].khat
    n = grid.n
    return Field(grid, scipy.fft.ifftn(khat * fhat)[:n, :n, :n])


def apply_eprime(lam: float, f: Field) -> Field:
    return cached_op(RadialKernel("eprime", lam), f.grid).apply(f)


def dense_apply(
    k: RadialKernel, grid: Grid3, f: Field, block: int = 512, mode: str = "ball"
) -> Field:
    """Direct double sum h^3 sum_q k(x_p - x_q) f(x_q); small-grid oracle."""
    grid.check(f)
    x, y, z = np.meshgrid(grid.axis, grid.axis, grid.axis, indexing="ij")
    points = np.stack([x.ravel(), y.ravel(), z.ravel()], axis=1)
    vec = f.values.ravel()
    out = np.empty(len(points), dtype=complex)
    diag = self_term(k, grid.h, mode)
    for start in range(0, len(points), block):
        rows = points[start : start + block]
        r = cdist(rows, points)
        zero = r == 0.0
        r[zero] = 1.0
        kv = np.asarray(_values(k, r), dtype=complex)
        kv[zero] = diag
        out[start : start + block] = kv @ vec
    return Field(grid, grid.cell_volume * out.reshape(grid.shape))


# radial quadratures


def _radial_quad(
    fn, a: float = 0.0, b: float = np.inf, points: Optional[Sequence[float]] = None
) -> complex:
    def re(r: float) -> float:
        return float(np.real(fn(r)))

    def im(r: float) -> float:
        return float(np.imag(fn(r)))

    kwargs: Dict = {"limit": 400}
    if points is not None and np.isfinite(b):
        kwargs["points"] = points
    real_part = integrate.quad(re, a, b, **kwargs)[0]
    imag_part = integrate.quad(im, a, b, **kwargs)[0]
    return complex(real_part, imag_part)


def kernel_mass(k: RadialKernel) -> complex:
    """
    int_{R^3} k(x) dx by radial quadrature.

    Raises:
        AssemblyError: kernel not absolutely integrable
    """
    if k.kind != "poisson":
        raise AssemblyError(f"kernel '{k.kind}' is not integrable over R^3")
    s = complex(k.t)
    if s.real <= 0:
        raise AssemblyError("poisson mass needs Re t > 0")
    scale = abs(s)

    def integrand(r: float) -> complex:
        return 4.0 * np.pi * r * r * complex(_values(k, np.array([r]))[0])

    return _radial_quad(integrand, 0.0, 10.0 * scale) + _radial_quad(integrand, 10.0 * scale)


def kernel_tail_fraction(k: RadialKernel, L: float) -> float:
    if k.kind != "poisson" or complex(k.t).real <= 0:
        return math.inf

    def absolute(r: float) -> float:
        return 4.0 * np.pi * r * r * abs(complex(_values(k, np.array([r]))[0]))

    total = integrate.quad(absolute, 0.0, np.inf, limit=400)[0]
    tail = integrate.quad(absolute, L, np.inf, limit=400)[0]
    return float(tail / total)


def weight_l2_norm(s: float) -> float:
    """||<x>^{-s}||_{L^2(R^3)}; finite iff s > 3/2."""
    if s <= 1.5:
        raise DomainError(f"weight factor <x>^-{s} is not square integrable (need s > 3/2)")
    value = integrate.quad(lambda r: 4.0 * np.pi * r * r * (1.0 + r * r) ** (-s), 0.0, np.inf)[0]
    return float(np.sqrt(value))


def _mlambda_l2_squared(lam: float) -> float:
    """
    int 4 pi r^2 m_lambda(r)^2 dr on Gauss-Legendre panels in r.

    Panels are at most 0.25 wide and resolve a quarter of the period
    pi / lambda; past r_cut = 400 / lambda the mean w(u)^2 ~ 1/(2u^2) + 1/(6u^4)
    closes the integral.
    """
    cut = 400.0 / lam
    width = min(0.25, np.pi / (4.0 * lam))
    panels = int(math.ceil(cut / width))
    nodes, weights = leggauss(16)
    edges = np.linspace(0.0, cut, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    r = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    values = np.real(_values(RadialKernel("mlambda", lam), r))
    body = float(np.sum(w * 4.0 * np.pi * r * r * values**2))
    u = lam * cut
    tail = lam * (1.0 / (2.0 * u) + 1.0 / (6.0 * u**3)) / np.pi**3
    return body + tail


@dataclass(frozen=True)
class HSNorm:
    """
    ||<x>^{-s} K||_HS = ||<.>^{-s}||_2 ||k||_2.

    For g0 the kernel is split at split_radius into an L^1 core (l1_core)
    and an L^2 tail; value then refers to the tail.
    """

    value: float
    weight_norm: float
    kernel_norm: float
    l1_core: Optional[float] = None
    split_radius: Optional[float] = None


def kernel_l2_norm(k: RadialKernel) -> float:
    """
    ||k||_{L^2(R^3)} by radial quadrature.

    Raises:
        AssemblyError: naming the divergent factor
    """
    if k.kind == "mlambda":
        return float(np.sqrt(_mlambda_l2_squared(k.lam)))
    if k.kind == "poisson" and complex(k.t).real > 0:
        value = _radial_quad(
            lambda r: 4.0 * np.pi * r * r * abs(complex(_values(k, np.array([r]))[0])) ** 2
        )
        return float(np.sqrt(value.real))
    raise AssemblyError(f"kernel factor ||{k.kind}||_2 diverges")


def hs_weighted_norm(k: RadialKernel, s: float) -> HSNorm:
    """
    Weighted Hilbert-Schmidt norm of the convolution by k.

    Raises:
        DomainError: weight factor not square integrable
        AssemblyError: kernel factor not square integrable
    """
    weight = weight_l2_norm(s)
    if k.kind == "g0":
        return hs_norm_g0_split(1.0, s)
    kernel = kernel_l2_norm(k)
    logger.debug(f"HS norm {k.kind} lam={k.lam} s={s}: {weight * kernel:.6e}")
    return HSNorm(weight * kernel, weight, kernel)


def hs_norm_g0_split(split_radius: float = 1.0, s: float = 2.0) -> HSNorm:
    """
    g0 = g1 + g2 split at radius a: g1 = g0 on the ball (L^1), g2 the L^2 tail.

    ||g1||_1 = 2a / pi and ||g2||_2 = (pi^3 a)^{-1/2}; the split radius is a
    free choice, so the result is a diagnostic.
    """
    a = float(split_radius)
    if not a > 0:
        raise DomainError("split radius must be positive")
    weight = weight_l2_norm(s)
    tail = 1.0 / np.sqrt(np.pi**3 * a)
    return HSNorm(weight * tail, weight, tail, l1_core=2.0 * a / np.pi, split_radius=a)


# epsilon-regularized multiplier route


def richardson(eps: Sequence[float], values: Sequence, powers: Iterable[float] = (0.5, 1.0)):
    """
    Extrapolate values(eps) to eps = 0 assuming v(eps) = v0 + sum_j c_j eps^{p_j}.

    Needs len(eps) == 1 + len(powers); values may be scalars or arrays.
    """
    eps = np.asarray(eps, dtype=float)
    powers = list(powers)
    if len(eps) != len(powers) + 1:
        raise DomainError(f"richardson needs {len(powers) + 1} nodes, got {len(eps)}")
    design = np.column_stack([np.ones_like(eps)] + [eps**p for p in powers])
    weights = np.linalg.solve(design.T, np.eye(len(eps))[:, 0])
    stacked = np.stack([np.asarray(v) for v in values])
    return np.tensordot(weights, stacked, axes=1)


def resolvent_multiplier(lam: float, sign: int, eps: float, f: Field, pad: int = 2) -> Field:
    """(|D| - lam -+ i eps)^{-1} f on a grid enlarged pad times, restricted back."""
    return padded_multiplier_apply(f, lambda k: 1.0 / (k - lam - 1j * sign * eps), pad)


def resolvent_multiplier_oracle(
    lam: float,
    sign: int,
    f: Field,
    eps_list: Sequence[float] = (0.2, 0.1, 0.05),
    pad: int = 2,
) -> Field:
    """Richardson-extrapolated eps -> 0 limit of resolvent_multiplier."""
    samples = [resolvent_multiplier(lam, sign, e, f, pad).values for e in eps_list]
    return Field(f.grid, richardson(eps_list, samples))


def radial_resolvent_limit(
    lam: float,
    sign: int,
    transform: Callable[[np.ndarray], np.ndarray],
    r: np.ndarray,
    k_max: float,
    panels: int = 64,
    order: int = 32,
) -> np.ndarray:
    """
    lim_{eps -> 0} (|D| - lam -+ i eps)^{-1} f at radii r, for radial f.

    transform is the radial profile of the unitary Fourier transform of f,
    negligible beyond k_max. With g(k) = sqrt(2 / pi) k^2 sinc(k r) f^(k) the
    limit is PV int g / (k - lam) dk +- i pi g(lam); the principal value is
    taken on (g(k) - g(lam)) / (k - lam) plus g(lam) ln((k_max - lam) / lam).
    No periodic box is involved.
    """
    if not 0 < lam < k_max:
        raise DomainError(f"need 0 < lambda < k_max, got {lam}, {k_max}")
    nodes, weights = leggauss(order)
    edges = np.linspace(0.0, k_max, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    half = 0.5 * np.diff(edges)[:, None]
    k = (mid + half * nodes[None, :]).ravel()
    w = (half * weights[None, :]).ravel()
    r = np.asarray(r, dtype=float)

    def g(kv: np.ndarray) -> np.ndarray:
        sinc = np.sinc(np.multiply.outer(r, kv) / np.pi)
        return np.sqrt(2.0 / np.pi) * kv**2 * transform(kv) * sinc

    at_lam = g(np.array([lam]))[..., 0]
    smooth = (g(k) - at_lam[..., None]) / (k - lam)
    principal = smooth @ w + at_lam * np.log((k_max - lam) / lam)
    return principal + 1j * sign * np.pi * at_lam


def gaussian_resolvent_limit(lam: float, sign: int, f: Field, width: float) -> Field:
    """
    R0(lam +- i0) f for f = p exp(-|x|^2 / (2 width^2)) centred at the origin,
    through radial_resolvent_limit on the distinct grid radii.
    """
    grid = f.grid
    peak = float(f.values[grid.origin_index].real)

    def transform(k: np.ndarray) -> np.ndarray:
        return peak * width**3 * np.exp(-0.5 * (k * width) ** 2)

    radii, inverse = np.unique(grid.radius, return_inverse=True)
    values = radial_resolvent_limit(lam, sign, transform, radii, 12.0 / width)
    return Field(grid, values[inverse].reshape(grid.shape))
