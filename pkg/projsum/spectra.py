"""
Eigenvalue correspondence between Jacobi points t in [0, 1] and the spectrum of P + theta Q:
each t gives the pair 1/2 (1 + theta +- sqrt((1 - theta)^2 + 4 theta t)); q - p eigenvalues sit at theta
and N - p - q at 0.
"""
import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from projsum import config
from projsum.ensembles import EnsembleParams

logger = logging.getLogger(__name__)

# Slack allowed on t when inverting the map
_T_SLACK = 1e-12


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    closed_lo: bool = True
    closed_hi: bool = True

    def __post_init__(self) -> None:
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise ValueError("interval endpoints must not be NaN")
        if self.lo > self.hi:
            raise ValueError(f"interval needs lo <= hi, got [{self.lo}, {self.hi}]")

    @classmethod
    def open(cls, lo: float, hi: float) -> "Interval":
        return cls(lo, hi, False, False)

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, x: Any) -> Any:
        x = np.asarray(x, dtype=float)
        above = x >= self.lo if self.closed_lo else x > self.lo
        below = x <= self.hi if self.closed_hi else x < self.hi
        return above & below

    def __str__(self) -> str:
        left = "[" if self.closed_lo else "("
        right = "]" if self.closed_hi else ")"
        return f"{left}{self.lo:g}, {self.hi:g}{right}"


@dataclass(frozen=True)
class Spectrum:
    """Sorted continuous eigenvalues plus atom counts at 0, theta and (overfull only) 1 + theta."""

    continuous_eigenvalues: np.ndarray
    atom_at_zero: int
    atom_at_theta: int
    theta: float
    total_dim: int
    atom_at_top: int = 0

    def __post_init__(self) -> None:
        values = np.sort(np.asarray(self.continuous_eigenvalues, dtype=float))
        object.__setattr__(self, "continuous_eigenvalues", values)
        if min(self.atom_at_zero, self.atom_at_theta, self.atom_at_top) < 0:
            raise ValueError("atom counts must be nonnegative")
        total = values.size + self.atom_at_zero + self.atom_at_theta + self.atom_at_top
        if total != self.total_dim:
            raise ValueError(f"spectrum accounts for {total} eigenvalues, expected {self.total_dim}")

    def atoms(self) -> list[tuple[float, int]]:
        """(location, multiplicity) for each nonempty atom."""
        out = [
            (0.0, self.atom_at_zero),
            (float(self.theta), self.atom_at_theta),
            (1.0 + self.theta, self.atom_at_top),
        ]
        return [(loc, k) for loc, k in out if k > 0]

    def all_eigenvalues(self) -> np.ndarray:
        parts = [self.continuous_eigenvalues] + [np.full(k, loc) for loc, k in self.atoms()]
        return np.sort(np.concatenate(parts))


def _check_theta(theta: float) -> None:
    if theta == 0 or not math.isfinite(theta):
        raise ValueError(f"theta must be finite and nonzero, got {theta}")


def map_jacobi_to_sum(t: Any, theta: float) -> tuple[Any, Any]:
    """(lambda_minus, lambda_plus) ordered by value. Works elementwise on arrays."""
    _check_theta(theta)
    arr = np.asarray(t, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0) or np.any(arr > 1):
        raise ValueError("t must lie in [0, 1]")
    center = 0.5 * (1.0 + theta)
    half = 0.5 * np.sqrt((1.0 - theta) ** 2 + 4.0 * theta * arr)
    lam_a, lam_b = center - half, center + half
    lo, hi = np.minimum(lam_a, lam_b), np.maximum(lam_a, lam_b)
    if arr.ndim == 0:
        return float(lo), float(hi)
    return lo, hi


def inverse_map(lam: Any, theta: float) -> Any:
    """t = (lambda - 1)(lambda - theta) / theta, clipped into [0, 1] within 1e-12 slack."""
    _check_theta(theta)
    arr = np.asarray(lam, dtype=float)
    t = (arr - 1.0) * (arr - theta) / theta
    if np.any(np.isnan(t)) or np.any(t < -_T_SLACK) or np.any(t > 1.0 + _T_SLACK):
        raise ValueError(f"lambda is not in the image of the map for theta={theta}")
    t = np.clip(t, 0.0, 1.0)
    return float(t) if arr.ndim == 0 else t


def predicted_spectrum(jacobi_points: Any, params: EnsembleParams) -> Spectrum:
    """Both branches of every Jacobi point, plus q - p atoms at theta and N - p - q at 0."""
    points = np.asarray(jacobi_points, dtype=float).ravel()
    if points.size != params.p_rank:
        raise ValueError(f"expected {params.p_rank} Jacobi points, got {points.size}")
    if params.b < 0:
        raise ValueError("p + q > N: atoms at 0 would be negative")
    lo, hi = map_jacobi_to_sum(points, params.theta)
    return Spectrum(
        continuous_eigenvalues=np.concatenate([lo, hi]),
        atom_at_zero=params.b,
        atom_at_theta=params.a,
        theta=params.theta,
        total_dim=params.N,
    )


def count_in_interval(spec: Spectrum, iv: Interval, include_atoms: bool = True) -> int:
    count = int(np.count_nonzero(iv.contains(spec.continuous_eigenvalues)))
    if include_atoms:
        count += sum(k for loc, k in spec.atoms() if bool(iv.contains(loc)))
    return count


def spectrum_from_eigenvalues(
    values: Any, params: EnsembleParams, tol: float | None = None
) -> Spectrum:
    """
    Classify a direct eigensolve of P + theta Q. Each atom location claims exactly its expected
    multiplicity of nearest eigenvalues; a warning is logged when that disagrees with the tolerance count.
    """
    tol = config.ATOM_TOL if tol is None else tol
    values = np.sort(np.asarray(values, dtype=float).ravel())
    if values.size != params.N:
        raise ValueError(f"expected {params.N} eigenvalues, got {values.size}")
    theta = params.theta
    expected = (
        (0.0, max(params.b, 0)),
        (theta, params.a),
        (1.0 + theta, params.overfull),
    )
    free = np.ones(values.size, dtype=bool)
    for location, multiplicity in expected:
        dist = np.abs(values - location)
        observed = int(np.count_nonzero((dist <= tol) & free))
        if observed != multiplicity:
            logger.warning(
                "%d eigenvalues within %.1e of %g, expected %d; using nearest-multiplicity accounting",
                observed, tol, location, multiplicity,
            )
        if multiplicity:
            candidates = np.flatnonzero(free)
            nearest = candidates[np.argsort(dist[candidates], kind="stable")[:multiplicity]]
            free[nearest] = False
    return Spectrum(
        continuous_eigenvalues=values[free],
        atom_at_zero=max(params.b, 0),
        atom_at_theta=params.a,
        theta=theta,
        total_dim=params.N,
        atom_at_top=params.overfull,
    )
