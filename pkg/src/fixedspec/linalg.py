"""Tolerance-aware dense complex linear algebra.

Everything downstream (generic-rank machinery, pencil tests, the CLI) sits on
the primitives in this module: SVD-based numeric rank, deterministic
eigenvalue ordering, rank factorization, and the bordered block-matrix rank
test together with its constructive rank-restoring gains.

All functions are pure; randomness, where needed, enters through an explicit
seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "CapacityError",
    "ConsistencyError",
    "RankTolerance",
    "DEFAULT_TOLERANCE",
    "as_complex_matrix",
    "numeric_rank",
    "eigenvalues",
    "RankFactorization",
    "rank_factorize",
    "assemble_bordered",
    "bordered_rank",
    "rank_restoring_gains",
    "gain_equivalence_check",
]


class CapacityError(ValueError):
    """Exhaustive subset enumeration was requested beyond the configured cap."""


class ConsistencyError(RuntimeError):
    """Two independent computation routes disagreed; indicates a bug or a
    tolerance failure, never a property of valid input."""


@dataclass(frozen=True)
class RankTolerance:
    """Relative singular-value cutoff for numeric rank decisions.

    A singular value counts toward the rank iff it exceeds
    ``relative * (largest singular value)``. The zero matrix has rank 0 under
    any tolerance.
    """

    relative: float = 1e-9

    def __post_init__(self) -> None:
        if not (0.0 < self.relative < 1.0):
            raise ValueError(f"relative tolerance must lie in (0, 1), got {self.relative}")

    @classmethod
    def coerce(cls, tol: "RankTolerance | float | None") -> "RankTolerance":
        if tol is None:
            return DEFAULT_TOLERANCE
        if isinstance(tol, RankTolerance):
            return tol
        return cls(float(tol))


DEFAULT_TOLERANCE = RankTolerance()


def as_complex_matrix(M, name: str = "matrix") -> np.ndarray:
    """Validate and convert to a 2-d complex128 array (finite entries only)."""
    arr = np.asarray(M, dtype=np.complex128)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr.real) & np.isfinite(arr.imag)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def _singular_values(M: np.ndarray) -> np.ndarray:
    if min(M.shape) == 0:
        return np.empty(0)
    return np.linalg.svd(M, compute_uv=False)


def numeric_rank(M, tol: RankTolerance | float | None = None) -> int:
    """Number of singular values above the relative cutoff."""
    tol = RankTolerance.coerce(tol)
    M = as_complex_matrix(M)
    s = _singular_values(M)
    if s.size == 0:
        return 0
    return int(np.count_nonzero(s > tol.relative * s[0]))


def eigenvalues(A) -> np.ndarray:
    """Eigenvalues of a square matrix, with multiplicity, sorted by
    (real part, imaginary part)."""
    A = as_complex_matrix(A, "A")
    n, m = A.shape
    if n != m:
        raise ValueError(f"eigenvalues requires a square matrix, got {A.shape}")
    vals = np.linalg.eigvals(A) if n else np.empty(0, dtype=np.complex128)
    order = np.lexsort((vals.imag, vals.real))
    return vals[order]


@dataclass(frozen=True)
class RankFactorization:
    """M = W @ R with W full column rank and R full row rank; the inner
    dimension equals the numeric rank of M."""

    rank: int
    W: np.ndarray
    R: np.ndarray

    @property
    def column_pairs(self):
        """The (column of W, row of R) pairs; both collections are linearly
        independent by construction."""
        return [(self.W[:, i], self.R[i, :]) for i in range(self.rank)]


def rank_factorize(M, tol: RankTolerance | float | None = None) -> RankFactorization:
    """Rank factorization via SVD, singular values split evenly between the
    two factors."""
    tol = RankTolerance.coerce(tol)
    M = as_complex_matrix(M)
    if min(M.shape) == 0:
        return RankFactorization(0, np.zeros((M.shape[0], 0), np.complex128),
                                 np.zeros((0, M.shape[1]), np.complex128))
    U, s, Vh = np.linalg.svd(M, full_matrices=False)
    t = int(np.count_nonzero(s > tol.relative * s[0])) if s[0] > 0 else 0
    root = np.sqrt(s[:t])
    return RankFactorization(t, U[:, :t] * root, root[:, None] * Vh[:t, :])


def _check_bordered_dims(A: np.ndarray, B: np.ndarray, C: np.ndarray) -> int:
    n, m = A.shape
    if n != m:
        raise ValueError(f"A must be square, got {A.shape}")
    if B.shape[0] != n:
        raise ValueError(f"B must have {n} rows, got {B.shape}")
    if C.shape[1] != n:
        raise ValueError(f"C must have {n} columns, got {C.shape}")
    return n


def assemble_bordered(A, B, C) -> np.ndarray:
    """The block matrix [[A, B], [C, 0]]; B with zero columns or C with zero
    rows simply contribute nothing."""
    A = as_complex_matrix(A, "A")
    B = as_complex_matrix(B, "B")
    C = as_complex_matrix(C, "C")
    n = _check_bordered_dims(A, B, C)
    out = np.zeros((n + C.shape[0], n + B.shape[1]), np.complex128)
    out[:n, :n] = A
    out[:n, n:] = B
    out[n:, :n] = C
    return out


def bordered_rank(A, B, C, tol: RankTolerance | float | None = None) -> int:
    """Numeric rank of [[A, B], [C, 0]]."""
    return numeric_rank(assemble_bordered(A, B, C), tol)


def _greedy_independent_columns(M: np.ndarray, want: int, tol: RankTolerance) -> list[int]:
    """First `want` column indices, scanned left to right, whose columns are
    linearly independent. Assumes rank(M) >= want."""
    chosen: list[int] = []
    basis = np.zeros((M.shape[0], 0), np.complex128)
    for j in range(M.shape[1]):
        if len(chosen) == want:
            break
        col = M[:, j]
        scale = np.linalg.norm(col)
        if scale == 0.0:
            continue
        resid = col - basis @ (basis.conj().T @ col)
        # re-orthogonalize once; plain MGS drifts for near-dependent columns
        resid -= basis @ (basis.conj().T @ resid)
        rnorm = np.linalg.norm(resid)
        if rnorm > tol.relative * scale:
            basis = np.hstack([basis, (resid / rnorm)[:, None]])
            chosen.append(j)
    if len(chosen) < want:
        raise ConsistencyError(
            f"expected {want} independent columns, found {len(chosen)}")
    return chosen


def _complete_column_rank(A: np.ndarray, B: np.ndarray, C: np.ndarray,
                          tol: RankTolerance) -> np.ndarray:
    """E such that [A + B@E; C] has full column rank n.

    Requires rank [[A, B], [C, 0]] >= n. Mirrors the elementary-column-
    operations argument: pick n independent columns among the stacked
    [A; C] and [B; 0] columns, then route each selected B-column onto a
    distinct unselected A-column with a scalar gain, escalating the scalar
    (finitely many values fail) and falling back to random gains.
    """
    n = A.shape[0]
    m = B.shape[1]
    stacked = np.zeros((n + C.shape[0], n + m), np.complex128)
    stacked[:n, :n] = A
    stacked[:n, n:] = B
    stacked[n:, :n] = C

    def full_column_rank(E: np.ndarray) -> bool:
        test = np.vstack([A + B @ E, C])
        return numeric_rank(test, tol) == n

    E = np.zeros((m, n), np.complex128)
    if full_column_rank(E):
        return E

    chosen = _greedy_independent_columns(stacked, n, tol)
    a_chosen = [j for j in chosen if j < n]
    b_chosen = [j - n for j in chosen if j >= n]
    unmatched = [j for j in range(n) if j not in set(a_chosen)]
    # injective by construction: len(unmatched) == n - |a_chosen| == |b_chosen|
    pairs = list(zip(unmatched, b_chosen))

    for gamma in [2.0 ** p for p in range(13)]:
        E = np.zeros((m, n), np.complex128)
        for col_j, b_i in pairs:
            E[b_i, col_j] = gamma
        if full_column_rank(E):
            return E

    rng = np.random.default_rng(0x5AFE)
    for _ in range(64):
        E = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
        if full_column_rank(E):
            return E
    raise ConsistencyError("failed to restore full column rank; tolerance too loose?")


def rank_restoring_gains(A, B, C, tol: RankTolerance | float | None = None):
    """Gains (E, K) with numeric_rank(A + B@E + K@C) == n, or None when the
    bordered matrix [[A, B], [C, 0]] has rank below n (no gains exist)."""
    tol = RankTolerance.coerce(tol)
    A = as_complex_matrix(A, "A")
    B = as_complex_matrix(B, "B")
    C = as_complex_matrix(C, "C")
    n = _check_bordered_dims(A, B, C)
    if bordered_rank(A, B, C, tol) < n:
        return None
    E = _complete_column_rank(A, B, C, tol)
    A2 = A + B @ E
    # transposed problem: [A2; C] has full column rank, so [A2^T, C^T] admits
    # a row-side completion; reuse the column routine on the transpose
    Kt = _complete_column_rank(A2.T, C.T, np.zeros((0, n), np.complex128), tol)
    K = Kt.T
    if numeric_rank(A2 + K @ C, tol) != n:
        raise ConsistencyError("rank-restoring gains failed verification")
    return E, K


def gain_equivalence_check(A, B, C, tol: RankTolerance | float | None = None,
                             trials: int = 5, rng_seed: int = 0) -> bool:
    """Self-test of the bordered-rank equivalence.

    Side 1: rank [[A, B], [C, 0]] < n. Side 2: A + B@E + K@C is rank
    deficient for `trials` random (E, K) draws, and additionally for the
    constructive gains when side 1 is false. Returns True iff the sides
    agree, which the underlying equivalence guarantees; floating point can
    only sample the universally quantified side, hence the trials.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    tol = RankTolerance.coerce(tol)
    A = as_complex_matrix(A, "A")
    B = as_complex_matrix(B, "B")
    C = as_complex_matrix(C, "C")
    n = _check_bordered_dims(A, B, C)
    deficient_side = bordered_rank(A, B, C, tol) < n

    rng = np.random.default_rng(np.random.SeedSequence(rng_seed))
    m, l = B.shape[1], C.shape[0]
    if deficient_side:
        for _ in range(trials):
            E = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
            K = rng.standard_normal((n, l)) + 1j * rng.standard_normal((n, l))
            if numeric_rank(A + B @ E + K @ C, tol) >= n:
                return False
        return True
    gains = rank_restoring_gains(A, B, C, tol)
    if gains is None:
        return False
    E, K = gains
    return numeric_rank(A + B @ E + K @ C, tol) == n
