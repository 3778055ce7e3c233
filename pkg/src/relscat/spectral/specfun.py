"""
Cosine and sine integrals and the resolvent combination

    w(r) = sin(r) ci(r) + cos(r) si(r),   si(r) = Si(r) - pi/2,

which enters the kernel m_lambda of the free resolvent. All functions accept
scalars or numpy arrays and return the same shape.
"""

import logging
from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.polynomial.laguerre import laggauss
from scipy.special import sici

from ..core.error_handler import DomainError

logger = logging.getLogger("relscat.spectral.specfun")

EULER_GAMMA = 0.57721566490153286061

# Above this radius w(r) is evaluated from the auxiliary functions f, g.
ASYMPTOTIC_RADIUS = 20.0

ArrayLike = Union[float, np.ndarray]

_LAGUERRE_FINE = laggauss(48)
_LAGUERRE_COARSE = laggauss(32)
_CHUNK = 1 << 15


@dataclass(frozen=True)
class SpecFunResult:
    """Value together with an absolute error estimate."""

    value: float
    est_error: float


def _as_array(r: ArrayLike) -> np.ndarray:
    return np.asarray(r, dtype=float)


def _check_positive(r: np.ndarray, name: str) -> None:
    if np.any(~(r > 0)):
        raise DomainError(f"{name} requires r > 0")


def _shape_like(values: np.ndarray, r: ArrayLike) -> ArrayLike:
    if np.ndim(r) == 0:
        return float(values)
    return values


def cosint(r: ArrayLike) -> ArrayLike:
    """Ci(r) = -int_r^inf cos(t)/t dt for r > 0."""
    x = _as_array(r)
    _check_positive(x, "cosint")
    return _shape_like(sici(x)[1], r)


def sinint_si(r: ArrayLike) -> ArrayLike:
    """si(r) = Si(r) - pi/2 for r >= 0; si(0) = -pi/2."""
    x = _as_array(r)
    if np.any(~(x >= 0)):
        raise DomainError("sinint_si requires r >= 0")
    return _shape_like(sici(x)[0] - np.pi / 2, r)


def _auxiliary(x: np.ndarray, nodes_weights: tuple) -> tuple:
    """
    Auxiliary functions f, g of the sine/cosine integrals.

    f(x) = int_0^inf exp(-x t) / (1 + t^2) dt
    g(x) = int_0^inf t exp(-x t) / (1 + t^2) dt

    evaluated with Gauss-Laguerre after t = u / x.
    """
    u, w = nodes_weights
    t = u[None, :] / x[:, None]
    denom = 1.0 + t * t
    f = (w[None, :] / denom).sum(axis=1) / x
    g = (w[None, :] * t / denom).sum(axis=1) / x
    return f, g


def _combo_far(x: np.ndarray) -> tuple:
    f = np.empty_like(x)
    g = np.empty_like(x)
    f_c = np.empty_like(x)
    g_c = np.empty_like(x)
    for start in range(0, len(x), _CHUNK):
        part = slice(start, start + _CHUNK)
        f[part], g[part] = _auxiliary(x[part], _LAGUERRE_FINE)
        f_c[part], g_c[part] = _auxiliary(x[part], _LAGUERRE_COARSE)
    c2, s2 = np.cos(2 * x), np.sin(2 * x)
    value = -(f * c2 + g * s2)
    err = np.abs(f - f_c) + np.abs(g - g_c) + 4 * np.finfo(float).eps * np.abs(value)
    return value, err


def _combo_near(x: np.ndarray) -> tuple:
    si_plus, ci = sici(x)
    si = si_plus - np.pi / 2
    a = np.sin(x) * ci
    b = np.cos(x) * si
    value = a + b
    err = 8 * np.finfo(float).eps * (np.abs(a) + np.abs(b) + 1.0)
    return value, err


def _combo(x: np.ndarray) -> tuple:
    value = np.empty_like(x)
    err = np.empty_like(x)
    far = x > ASYMPTOTIC_RADIUS
    if np.any(~far):
        value[~far], err[~far] = _combo_near(x[~far])
    if np.any(far):
        value[far], err[far] = _combo_far(x[far])
    return value, err


def resolvent_combo(r: ArrayLike) -> ArrayLike:
    """
    w(r) = sin(r) ci(r) + cos(r) si(r) for r > 0.

    For r > ASYMPTOTIC_RADIUS the identity w = -(f cos 2r + g sin 2r) is used,
    which avoids summing two oscillating terms of size 1/r.
    """
    x = _as_array(r)
    _check_positive(x, "resolvent_combo")
    flat = np.atleast_1d(x).ravel()
    value, _ = _combo(flat)
    return _shape_like(value.reshape(np.shape(x)), r)


def resolvent_combo_result(r: float) -> SpecFunResult:
    """resolvent_combo at a scalar r with its error estimate."""
    x = _as_array(r)
    _check_positive(x, "resolvent_combo")
    value, err = _combo(np.atleast_1d(x).astype(float))
    return SpecFunResult(value=float(value[0]), est_error=float(err[0]))


def cosint_result(r: float) -> SpecFunResult:
    value = float(cosint(r))
    return SpecFunResult(value=value, est_error=4 * np.finfo(float).eps * (abs(value) + 1.0))


def sinint_si_result(r: float) -> SpecFunResult:
    value = float(sinint_si(r))
    return SpecFunResult(value=value, est_error=4 * np.finfo(float).eps * (abs(value) + 1.0))
