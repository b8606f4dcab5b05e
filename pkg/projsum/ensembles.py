"""
Random matrix samplers: Haar-invariant projections over R (beta=1) and C (beta=2), the sum P + theta Q,
and the Jacobi matrix model M = (A'A + B'B)^-1 A'A via QR of a Gaussian block.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from projsum import config

logger = logging.getLogger(__name__)

# Diagonal of R below this fraction of its largest entry counts as rank deficient
_RANK_RTOL = 1e-12
# Residual bound of the debug eigensolver check, relative to the matrix norm
_RESIDUAL_RTOL = 1e-8


class DegenerateSampleError(RuntimeError):
    """Raised when a Gaussian draw is rank deficient twice in a row."""


@dataclass(frozen=True)
class EnsembleParams:
    """Dimension N, ranks p <= q, scalar theta and field index beta (1 real, 2 complex)."""

    N: int
    p_rank: int
    q_rank: int
    theta: float = 1.0
    beta: int = 2
    allow_overfull: bool = False
    swapped: bool = False

    def __post_init__(self) -> None:
        for name in ("N", "p_rank", "q_rank"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise ValueError(f"{name} must be an integer, got {value!r}")
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        if not (1 <= self.p_rank <= self.q_rank <= self.N):
            raise ValueError(
                f"ranks must satisfy 1 <= p <= q <= N, got p={self.p_rank}, q={self.q_rank}, N={self.N}"
            )
        if self.p_rank + self.q_rank > self.N and not self.allow_overfull:
            raise ValueError(
                f"p + q = {self.p_rank + self.q_rank} exceeds N = {self.N}; pass allow_overfull to sample anyway"
            )
        if not math.isfinite(self.theta) or self.theta == 0:
            raise ValueError(f"theta must be finite and nonzero, got {self.theta}")
        if self.beta not in (1, 2):
            raise ValueError(f"beta must be 1 or 2, got {self.beta}")

    @classmethod
    def from_ranks(
        cls,
        N: int,
        p: int,
        q: int,
        theta: float = 1.0,
        beta: int = 2,
        allow_overfull: bool = False,
    ) -> "EnsembleParams":
        """Build params, swapping p and q when p > q (recorded in `swapped`)."""
        swapped = p > q
        if swapped:
            logger.warning("p_rank=%s > q_rank=%s; swapping ranks", p, q)
            p, q = q, p
        return cls(N, p, q, theta, beta, allow_overfull, swapped)

    @property
    def a(self) -> int:
        """Multiplicity of the eigenvalue theta."""
        return self.q_rank - self.p_rank

    @property
    def b(self) -> int:
        """Multiplicity of the eigenvalue 0 (negative when overfull)."""
        return self.N - self.p_rank - self.q_rank

    @property
    def overfull(self) -> int:
        """Number of eigenvalues pinned at 1 + theta when p + q > N."""
        return max(0, -self.b)

    def jacobi_exponents(self) -> tuple[float, float]:
        """Weight exponents (a_exp, b_exp) of the Jacobi ensemble the p-point spectrum follows."""
        if self.beta == 2:
            return float(self.a), float(self.b)
        return (self.a - 1) / 2.0, (self.b - 1) / 2.0


@dataclass(frozen=True)
class SquareMatrix:
    """Dense self-adjoint matrix, real for beta=1 and complex for beta=2."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        if self.entries.ndim != 2 or self.entries.shape[0] != self.entries.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {self.entries.shape}")
        if self.entries.shape[0] < 1:
            raise ValueError("matrix dimension must be >= 1")

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    def trace(self) -> float:
        return float(np.real(np.trace(self.entries)))


@dataclass(frozen=True)
class SeedSpec:
    """(master_seed, stream_index) -> independent reproducible RNG streams."""

    master_seed: int
    stream_index: int = 0

    def __post_init__(self) -> None:
        if not (0 <= self.master_seed < 2**64):
            raise ValueError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")
        if self.stream_index < 0:
            raise ValueError(f"stream_index must be >= 0, got {self.stream_index}")

    def generator(self, *sub: int) -> np.random.Generator:
        """Generator for the substream `sub` (matrix slot, attempt) of this replicate."""
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_index, *sub))
        return np.random.Generator(np.random.PCG64(seq))


# Substream slots
_SLOT_P = 0
_SLOT_Q = 1
_SLOT_JACOBI = 2


def gaussian_matrix(rng: np.random.Generator, rows: int, cols: int, beta: int) -> np.ndarray:
    """Standard Gaussian matrix; complex entries have E|z|^2 = 1."""
    if beta == 1:
        return rng.standard_normal((rows, cols))
    re = rng.standard_normal((rows, cols))
    im = rng.standard_normal((rows, cols))
    return (re + 1j * im) / math.sqrt(2.0)


def _hermitian_part(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def _orthonormal_basis(g: np.ndarray) -> np.ndarray | None:
    """Q factor of g, or None when g is numerically rank deficient."""
    q, r = linalg.qr(g, mode="economic")
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag.min() <= _RANK_RTOL * max(diag.max(), 1.0):
        return None
    return q


def _span_basis(N: int, rank: int, beta: int, seed: SeedSpec, slot: int) -> np.ndarray:
    for attempt in range(2):
        rng = seed.generator(slot, attempt)
        basis = _orthonormal_basis(gaussian_matrix(rng, N, rank, beta))
        if basis is not None:
            return basis
        logger.warning(
            "rank-deficient Gaussian draw (N=%s, rank=%s, seed=%s); resampling", N, rank, seed
        )
    raise DegenerateSampleError(f"Gaussian draw rank deficient twice for N={N}, rank={rank}, {seed}")


def sample_gaussian_span_projection(
    N: int, rank: int, beta: int, seed: SeedSpec, slot: int = _SLOT_P
) -> SquareMatrix:
    """Projection Y Y' onto the span of `rank` independent Gaussian vectors in dimension N."""
    if not (1 <= rank <= N):
        raise ValueError(f"rank must lie in [1, N], got rank={rank}, N={N}")
    if beta not in (1, 2):
        raise ValueError(f"beta must be 1 or 2, got {beta}")
    y = _span_basis(N, rank, beta, seed, slot)
    return SquareMatrix(_hermitian_part(y @ y.conj().T))


def diagonal_projection(N: int, rank: int, beta: int) -> SquareMatrix:
    """Projection onto the first `rank` coordinates."""
    dtype = float if beta == 1 else complex
    d = np.zeros(N, dtype=dtype)
    d[:rank] = 1.0
    return SquareMatrix(np.diag(d))


def sample_projection_pair(
    params: EnsembleParams, seed: SeedSpec, random_q: bool = False
) -> tuple[SquareMatrix, SquareMatrix]:
    """(P, Q): P a Gaussian-span projection; Q diagonal, or a second independent span projection."""
    P = sample_gaussian_span_projection(params.N, params.p_rank, params.beta, seed, _SLOT_P)
    if random_q:
        Q = sample_gaussian_span_projection(params.N, params.q_rank, params.beta, seed, _SLOT_Q)
    else:
        Q = diagonal_projection(params.N, params.q_rank, params.beta)
    return P, Q


def sample_sum_matrix(params: EnsembleParams, seed: SeedSpec, random_q: bool = False) -> SquareMatrix:
    """P + theta Q. Q is the fixed diagonal projection unless random_q is set."""
    P, Q = sample_projection_pair(params, seed, random_q)
    return SquareMatrix(P.entries + params.theta * Q.entries)


def sample_jacobi_spectrum(params: EnsembleParams, seed: SeedSpec) -> np.ndarray:
    """
    The p eigenvalues of M = (A'A + B'B)^-1 A'A, ascending, in (0, 1).
    With X = [A; B] = Q R, M is similar to Q_A' Q_A, so the eigenvalues are the squared singular
    values of the top q x p block of Q.
    """
    if params.b < 0:
        raise ValueError(f"Jacobi path requires p + q <= N, got p + q = {params.p_rank + params.q_rank}")
    N, p, q = params.N, params.p_rank, params.q_rank
    for attempt in range(2):
        rng = seed.generator(_SLOT_JACOBI, attempt)
        basis = _orthonormal_basis(gaussian_matrix(rng, N, p, params.beta))
        if basis is not None:
            t = np.sort(linalg.svdvals(basis[:q]) ** 2)
            if t[0] > 0 and t[-1] < 1:
                return t
        logger.warning("singular A'A + B'B (N=%s, p=%s, seed=%s); resampling", N, p, seed)
    raise DegenerateSampleError(f"Jacobi draw degenerate twice for N={N}, p={p}, {seed}")


def self_adjoint_eigenvalues(m: SquareMatrix, check_residual: bool | None = None) -> np.ndarray:
    """All eigenvalues, ascending. The residual check runs when PROJSUM_DEBUG is on."""
    if not np.all(np.isfinite(m.entries)):
        raise ValueError("matrix has non-finite entries")
    if check_residual is None:
        check_residual = config.debug_enabled()
    if not check_residual:
        return linalg.eigvalsh(m.entries)
    values, vectors = linalg.eigh(m.entries)
    residual = np.max(np.linalg.norm(m.entries @ vectors - vectors * values, axis=0))
    bound = _RESIDUAL_RTOL * max(np.linalg.norm(m.entries, 2), 1.0)
    if residual > bound:
        logger.warning("eigensolver residual %.3e exceeds %.3e", residual, bound)
    else:
        logger.debug("eigensolver residual %.3e", residual)
    return values
