"""Eigenvalue engine for moment-constrained option price bounds.

Given a positive semi-definite matrix of pairwise moments Q and a diagonal of
signed portfolio quantities, the supremum price over exercise strategies is
the sum of the positive eigenvalues of P = S L S^T, where Q = S^T S is any
factorization of Q and L is the diagonal quantity matrix.  The result does
not depend on the factorization chosen: the nonzero spectrum of S L S^T
coincides with that of L Q up to similarity.

Everything here is pure and reentrant; inputs are copied and frozen, so
values can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    NotPositiveSemiDefinite,
    ParameterOutOfRange,
)

__all__ = [
    "Tolerances",
    "DEFAULT_TOLERANCES",
    "MomentMatrix",
    "QuantityVector",
    "PsdFactor",
    "BoundResult",
    "symmetric_eigenvalues",
    "factor_psd",
    "positive_eigenvalue_bound",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances for the bound engine.

    Attributes:
        psd: PSD acceptance threshold, relative to max(1, max diagonal).
            Eigenvalues in [-psd * scale, 0) are clipped to zero; anything
            below raises NotPositiveSemiDefinite.
        factor: max-norm reconstruction tolerance for Q = S^T S, relative to
            the largest diagonal entry of Q.
        eig: relative threshold below which an eigenvalue of P counts as
            zero and is excluded from the positive sum.
    """

    psd: float = 1e-10
    factor: float = 1e-10
    eig: float = 1e-12


DEFAULT_TOLERANCES = Tolerances()


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class MomentMatrix:
    """Symmetric PSD matrix of pairwise moments E[sqrt(a_m a_n)].

    Diagonal entries are the asset prices and must be strictly positive.
    Exact symmetry is required: builders in this package always construct
    both triangles from the same expression.
    """

    entries: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.entries)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionMismatch(f"moment matrix must be square, got shape {arr.shape}")
        if arr.shape[0] == 0:
            raise DimensionMismatch("moment matrix must be at least 1x1")
        if not np.array_equal(arr, arr.T):
            raise ParameterOutOfRange("moment matrix must be exactly symmetric")
        if not np.all(np.diag(arr) > 0.0):
            raise ParameterOutOfRange("moment matrix diagonal (asset prices) must be positive")
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def scale(self) -> float:
        """Scale used by relative PSD tests: max(1, largest diagonal entry)."""
        return max(1.0, float(np.max(np.diag(self.entries))))


@dataclass(frozen=True)
class QuantityVector:
    """Signed portfolio quantities (the diagonal of the quantity matrix)."""

    weights: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.weights)
        if arr.ndim != 1 or arr.size == 0:
            raise DimensionMismatch("quantities must form a non-empty vector")
        if not np.all(np.isfinite(arr)):
            raise ParameterOutOfRange("quantities must be finite")
        object.__setattr__(self, "weights", arr)

    @property
    def dim(self) -> int:
        return self.weights.size

    @property
    def is_mixed_sign(self) -> bool:
        """True when the portfolio holds both long and short positions.

        Otherwise the bound is trivial: zero, or the full portfolio value.
        """
        return bool(np.any(self.weights > 0.0) and np.any(self.weights < 0.0))


@dataclass(frozen=True)
class PsdFactor:
    """Rectangular factor S (rank x dim) with Q = S^T S.

    ``method`` records the factorization path taken: "pivoted_cholesky" for
    the triangular factor, "eigen" for the eigen-square-root fallback.
    ``clipped_negative_mass`` is the total negative eigenvalue mass of Q
    zeroed during factorization (nonzero only on the eigen path).
    """

    matrix: np.ndarray
    rank: int
    method: str
    clipped_negative_mass: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen_array(self.matrix))


@dataclass(frozen=True)
class BoundResult:
    """Outcome of the positive-eigenvalue bound.

    Attributes:
        bound: sum of the positive eigenvalues of P (price units, >= 0).
        eigenvalues: eigenvalues of P in descending order.
        rank_q: numerical rank of Q detected during factorization.
        clipped_negative_mass: negative eigenvalue mass of Q clipped to zero.
        factorization: which factorization path produced S.
        positive_count: number of eigenvalues above the zero threshold.
    """

    bound: float
    eigenvalues: np.ndarray
    rank_q: int
    clipped_negative_mass: float
    factorization: str
    positive_count: int

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _frozen_array(self.eigenvalues))


def symmetric_eigenvalues(matrix, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Eigenvalues of a symmetric matrix, in descending order.

    Raises ConvergenceFailure if the underlying QR iteration fails, which
    signals pathological scaling of the inputs.
    """
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {arr.shape}")
    scale = float(np.max(np.abs(arr))) if arr.size else 0.0
    if scale > 0.0 and float(np.max(np.abs(arr - arr.T))) > 16.0 * np.finfo(float).eps * scale:
        raise ParameterOutOfRange("matrix is not symmetric within representation")
    sym = 0.5 * (arr + arr.T)
    try:
        eigs = np.linalg.eigvalsh(sym)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"symmetric eigensolver failed: {exc}") from exc
    return eigs[::-1].copy()


def _pivoted_cholesky(q: np.ndarray, stop_tol: float):
    """Outer-product pivoted Cholesky with rank detection.

    Returns (L, rank, residual_diag) where Q ~= L L^T with L of shape
    (n, rank) in the original row order, and residual_diag is the residual
    diagonal left when the pivot search stopped.
    """
    a = np.array(q, dtype=float)
    n = a.shape[0]
    perm = np.arange(n)
    rank = n
    for j in range(n):
        d = np.diag(a)[j:]
        pivot = j + int(np.argmax(d))
        if a[pivot, pivot] <= stop_tol:
            rank = j
            break
        if pivot != j:
            a[:, [j, pivot]] = a[:, [pivot, j]]
            a[[j, pivot], :] = a[[pivot, j], :]
            perm[[j, pivot]] = perm[[pivot, j]]
        a[j, j] = math.sqrt(a[j, j])
        if j + 1 < n:
            a[j + 1 :, j] /= a[j, j]
            a[j + 1 :, j + 1 :] -= np.outer(a[j + 1 :, j], a[j + 1 :, j])
        a[j, j + 1 :] = 0.0
    lower = np.tril(a)[:, :rank]
    residual = np.diag(a)[rank:].copy()
    inverse = np.empty(n, dtype=int)
    inverse[perm] = np.arange(n)
    return lower[inverse, :], rank, residual


def _eigen_factor(q: MomentMatrix, tol: Tolerances):
    """Eigen-square-root factor with clipping of tolerably negative eigenvalues."""
    w, v = np.linalg.eigh(q.entries)
    floor = -tol.psd * q.scale
    if w[0] < floor:
        raise NotPositiveSemiDefinite(
            f"min eigenvalue {w[0]:.3e} below {floor:.3e}; input moments are inconsistent"
        )
    clipped = float(-np.sum(w[w < 0.0]))
    w = np.clip(w, 0.0, None)
    keep = w > tol.psd * q.scale
    rank = int(np.count_nonzero(keep))
    if rank == 0:
        # Positive diagonal makes a numerically zero matrix impossible in
        # practice, but keep the shape contract intact.
        return PsdFactor(np.zeros((0, q.dim)), 0, "eigen", clipped)
    s = np.sqrt(w[keep])[:, None] * v[:, keep].T
    return PsdFactor(s, rank, "eigen", clipped)


def factor_psd(q: MomentMatrix, tol: Tolerances = DEFAULT_TOLERANCES) -> PsdFactor:
    """Factor Q = S^T S with numerical rank detection.

    Uses pivoted triangular factorization; when the triangular path cannot
    reproduce Q within the factor tolerance (rank-deficient inputs right at
    the clipping edge, or mild indefiniteness), falls back to the
    eigen-square-root with negative eigenvalues in [-psd * scale, 0) clipped
    to zero.

    Raises:
        NotPositiveSemiDefinite: min eigenvalue below -psd * scale.
    """
    if not isinstance(q, MomentMatrix):
        q = MomentMatrix(q)
    stop = tol.psd * q.scale
    lower, rank, residual = _pivoted_cholesky(q.entries, stop)
    if residual.size and float(np.min(residual)) < -stop:
        return _eigen_factor(q, tol)
    s = lower.T
    max_diag = float(np.max(np.diag(q.entries)))
    if float(np.max(np.abs(s.T @ s - q.entries))) > tol.factor * max_diag:
        return _eigen_factor(q, tol)
    return PsdFactor(s, rank, "pivoted_cholesky", 0.0)


def positive_eigenvalue_bound(
    q: MomentMatrix,
    quantities: QuantityVector,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> BoundResult:
    """Supremum price of the portfolio option from moments and quantities.

    Computes P = S L S^T for a factor Q = S^T S and returns the sum of the
    positive eigenvalues of P.  Eigenvalues within ``tol.eig`` of zero
    (relative to the spectral radius) count as zero.
    """
    if not isinstance(q, MomentMatrix):
        q = MomentMatrix(q)
    if not isinstance(quantities, QuantityVector):
        quantities = QuantityVector(quantities)
    if quantities.dim != q.dim:
        raise DimensionMismatch(
            f"quantity vector has length {quantities.dim}, moment matrix is {q.dim}x{q.dim}"
        )
    factor = factor_psd(q, tol)
    if factor.rank == 0:
        return BoundResult(0.0, np.zeros(0), 0, factor.clipped_negative_mass, factor.method, 0)
    p = (factor.matrix * quantities.weights[None, :]) @ factor.matrix.T
    p = 0.5 * (p + p.T)
    eigs = symmetric_eigenvalues(p, tol)
    radius = float(np.max(np.abs(eigs)))
    threshold = tol.eig * radius
    positive = eigs[eigs > threshold]
    return BoundResult(
        bound=float(np.sum(positive)),
        eigenvalues=eigs,
        rank_q=factor.rank,
        clipped_negative_mass=factor.clipped_negative_mass,
        factorization=factor.method,
        positive_count=int(positive.size),
    )
