"""
Limiting spectral shapes: the global density of P + Q for rank fractions (p, q), the Jacobi level
density with exponent ratios (s, t), supports, atoms, Johnstone's edge point, and quadrature.
"""
import logging
import math
from dataclasses import dataclass
from functools import partial
from typing import Any, Callable

import numpy as np
from scipy import integrate as sp_integrate

from projsum.spectra import Interval
from projsum.specfun import DomainError

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8
MASS_TOL = 1e-6
# Subinterval cap for adaptive quadrature
_QUAD_LIMIT = 200


class IntegrationError(RuntimeError):
    """Raised when adaptive quadrature does not reach the requested tolerance."""


@dataclass(frozen=True)
class LimitParams:
    """Limiting rank fractions p <= q of P and Q."""

    p: float
    q: float

    def __post_init__(self) -> None:
        if not (0 < self.p < 1 and 0 < self.q < 1):
            raise ValueError(f"p and q must lie in (0, 1), got p={self.p}, q={self.q}")
        if self.p > self.q:
            raise ValueError(f"expected p <= q, got p={self.p}, q={self.q}")
        if abs(self.c - (1 + self.a**2 - self.b**2) / 2) > 1e-14:
            raise ValueError("c = (1 + a^2 - b^2) / 2 identity violated")

    @property
    def a(self) -> float:
        return self.q - self.p

    @property
    def b(self) -> float:
        return 1.0 - self.p - self.q

    @property
    def c(self) -> float:
        return self.p * (1 - self.q) + self.q * (1 - self.p)

    @property
    def mu(self) -> float:
        """Half-width of the outer support: the upper edge sits at 1 + mu."""
        return math.sqrt(self.q * (1 - self.p)) + math.sqrt(self.p * (1 - self.q))


@dataclass(frozen=True)
class LimitShape:
    intervals: tuple[Interval, ...]
    atoms: tuple[tuple[float, float], ...]
    density: Callable[[Any], Any]

    def atom_mass(self) -> float:
        return float(sum(w for _, w in self.atoms))


# -----------------------------------------------------------------------------
# Quadrature
# -----------------------------------------------------------------------------


def _quad(g: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    result = sp_integrate.quad(g, lo, hi, epsabs=tol, epsrel=0.0, limit=_QUAD_LIMIT, full_output=1)
    if len(result) > 3:
        raise IntegrationError(f"quadrature on [{lo}, {hi}] did not converge: {result[3]}")
    value, err = result[0], result[1]
    if err > tol:
        raise IntegrationError(f"quadrature error estimate {err:.2e} exceeds {tol:.2e}")
    return float(value)


def integrate(f: Callable[[float], float], iv: Interval, tol: float = DEFAULT_TOL) -> float:
    """
    int_iv f. Each half of the interval is integrated with x = endpoint +- u^2, which removes
    inverse-square-root singularities at the endpoints.
    """
    lo, hi = float(iv.lo), float(iv.hi)
    if hi == lo:
        return 0.0
    mid = 0.5 * (lo + hi)
    half_tol = 0.5 * tol
    left = _quad(lambda u: 2.0 * u * float(f(lo + u * u)), 0.0, math.sqrt(mid - lo), half_tol)
    right = _quad(lambda u: 2.0 * u * float(f(hi - u * u)), 0.0, math.sqrt(hi - mid), half_tol)
    return left + right


# -----------------------------------------------------------------------------
# Sum P + Q
# -----------------------------------------------------------------------------


def support_sum(lp: LimitParams) -> tuple[Interval, Interval]:
    """(I1, I2) = (1 + I, 1 - I) with I = [|r1 - r2|, r1 + r2], r1 = sqrt(q(1-p)), r2 = sqrt(p(1-q))."""
    r1 = math.sqrt(lp.q * (1 - lp.p))
    r2 = math.sqrt(lp.p * (1 - lp.q))
    lo, hi = abs(r1 - r2), r1 + r2
    return Interval(1.0 + lo, 1.0 + hi), Interval(1.0 - hi, 1.0 - lo)


def _check_poles(x: np.ndarray, poles: tuple[float, ...]) -> None:
    for pole in poles:
        if np.any(x == pole):
            raise DomainError(f"density has a pole at x={pole}")


def limit_density_sum(lp: LimitParams, x: Any) -> Any:
    """|(1/pi) sqrt(-a^2 + 2c(x-1)^2 - (x-1)^4) / (x(x-1)(x-2))| on the support, 0 elsewhere."""
    arr = np.asarray(x, dtype=float)
    i1, i2 = support_sum(lp)
    inside = i1.contains(arr) | i2.contains(arr)
    _check_poles(arr[inside], (0.0, 1.0, 2.0))
    u = arr - 1.0
    radicand = np.clip(-lp.a**2 + 2.0 * lp.c * u**2 - u**4, 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        value = np.abs(np.sqrt(radicand) / (math.pi * arr * u * (u - 1.0)))
    value = np.where(inside, value, 0.0)
    return float(value) if arr.ndim == 0 else value


def atoms_sum(lp: LimitParams) -> list[tuple[float, float]]:
    """Atom (1, |a|) when a != 0, (0, b) when b > 0, (2, -b) when b < 0."""
    out = []
    if lp.a != 0:
        out.append((1.0, abs(lp.a)))
    if lp.b > 0:
        out.append((0.0, lp.b))
    elif lp.b < 0:
        out.append((2.0, -lp.b))
    return out


def limit_shape_sum(lp: LimitParams) -> LimitShape:
    i1, i2 = support_sum(lp)
    return LimitShape(
        intervals=(i2, i1),
        atoms=tuple(atoms_sum(lp)),
        density=partial(limit_density_sum, lp),
    )


# -----------------------------------------------------------------------------
# Jacobi level density
# -----------------------------------------------------------------------------


def _check_st(s: float, t: float) -> None:
    if not (s >= 0 and t >= 0) or math.isinf(s) or math.isinf(t):
        raise ValueError(f"s and t must be finite and >= 0, got s={s}, t={t}")


def _jacobi_acd(s: float, t: float) -> tuple[float, float, float]:
    big_s = 2.0 + s + t
    a = s / big_s
    c = 0.5 * (1.0 + (s**2 - t**2) / big_s**2)
    d = 2.0 * math.sqrt((1 + s) * (1 + t) * (1 + s + t)) / big_s**2
    return a, c, d


def printed_jacobi_halfwidth(s: float, t: float) -> float:
    """Half-width without the factor 2; gives [1/4, 3/4] at s = t = 0 and is kept for comparison logs."""
    _check_st(s, t)
    return math.sqrt((1 + s) * (1 + t) * (1 + s + t)) / (2.0 + s + t) ** 2


def support_jacobi(s: float, t: float) -> Interval:
    _check_st(s, t)
    _a, c, d = _jacobi_acd(s, t)
    return Interval(max(c - d, 0.0), min(c + d, 1.0))


def limit_density_jacobi(s: float, t: float, x: Any) -> Any:
    """|((2+s+t)/(2 pi)) sqrt(-a^2 + 2cx - x^2) / (x(x-1))| on [c-d, c+d], 0 elsewhere."""
    _check_st(s, t)
    arr = np.asarray(x, dtype=float)
    a, c, _d = _jacobi_acd(s, t)
    inside = support_jacobi(s, t).contains(arr)
    _check_poles(arr[inside], (0.0, 1.0))
    radicand = np.clip(-a**2 + 2.0 * c * arr - arr**2, 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        value = np.abs((2.0 + s + t) / (2.0 * math.pi) * np.sqrt(radicand) / (arr * (arr - 1.0)))
    value = np.where(inside, value, 0.0)
    return float(value) if arr.ndim == 0 else value


def limit_shape_jacobi(s: float, t: float) -> LimitShape:
    return LimitShape(
        intervals=(support_jacobi(s, t),),
        atoms=(),
        density=partial(limit_density_jacobi, s, t),
    )


def jacobi_params_for(s: float, t: float) -> LimitParams:
    """Rank fractions (1/(2+s+t), (1+s)/(2+s+t)) whose P + Q spectrum maps onto the (s, t) Jacobi law."""
    _check_st(s, t)
    big_s = 2.0 + s + t
    return LimitParams(1.0 / big_s, (1.0 + s) / big_s)


def johnstone_edge(s: float, t: float) -> float:
    """(1 - cos(phi + gamma)) / 2 with cos phi = (t-s)/(2+s+t), cos gamma = (t+s)/(2+s+t)."""
    _check_st(s, t)
    big_s = 2.0 + s + t
    phi = math.acos((t - s) / big_s)
    gamma = math.acos((t + s) / big_s)
    return (1.0 - math.cos(phi + gamma)) / 2.0


# -----------------------------------------------------------------------------
# Mass
# -----------------------------------------------------------------------------


def interval_mass(shape: LimitShape, iv: Interval, tol: float = DEFAULT_TOL) -> float:
    """Continuous mass of the shape inside iv (atoms excluded)."""
    total = 0.0
    for support in shape.intervals:
        lo, hi = max(support.lo, iv.lo), min(support.hi, iv.hi)
        if hi > lo:
            total += integrate(shape.density, Interval(lo, hi), tol)
    return total


def shape_mass(shape: LimitShape, tol: float = DEFAULT_TOL) -> float:
    """Continuous mass over the support plus the atom weights."""
    continuous = sum(integrate(shape.density, iv, tol) for iv in shape.intervals)
    total = continuous + shape.atom_mass()
    if abs(total - 1.0) > MASS_TOL:
        logger.warning("limit shape mass %.9f differs from 1 by more than %.0e", total, MASS_TOL)
    return total
