"""Generic rank of parameter-weighted sums of rank-one and block terms.

Three independent routes compute the generic rank of sums like
``sum_i w_i p_i r_i`` (vector pairs with scalar parameters) and
``sum_i W_i P_i R_i`` (matrix members with fully parameterized middles):

* matroid intersection over the column/row linear matroids,
* the min-over-subsets formula rank(w_S) + rank(r_complement),
* randomized sampling of the parameters.

Equality of the three is a theorem; the routes are kept genuinely
independent so that disagreement is a usable bug signal.

A family plus a constant matrix is handled by rank-factorizing the constant
into jointly independent pairs and prepending them as parameterized terms.
That relaxation is exact for generic data but only an upper bound in
general (fixing the prepended parameters to one restricts the parameter
space, and aligned data can lose rank on that slice), so
grank_constant_plus_family cross-checks it by sampling.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .linalg import (
    CapacityError,
    ConsistencyError,
    RankTolerance,
    as_complex_matrix,
    numeric_rank,
    rank_factorize,
)

__all__ = [
    "ENUMERATION_CAP",
    "VectorPairFamily",
    "MatrixFamily",
    "JointIndependentSet",
    "SubsetCertificate",
    "grank_pairs_matroid",
    "grank_pairs_minformula",
    "grank_sampled",
    "expand_matrix_family",
    "grank_matrix_minformula",
    "refine_min_subset",
    "sampled_rank_with_constant",
    "grank_constant_plus_family",
]

# exhaustive enumeration stops at 2**20 subsets; the matroid route has no cap
ENUMERATION_CAP = 20

# below this many expanded pairs the min-formula scan beats matroid intersection
_AUTO_ROUTE_CAP = 12


@dataclass(frozen=True, eq=False)
class VectorPairFamily:
    """Ordered pairs (w_i, r_i) of a column vector in C^n1 and a row vector
    in C^(1 x n2), stored column-stacked / row-stacked."""

    n1: int
    n2: int
    cols: np.ndarray  # (n1, d), i-th column is w_i
    rows: np.ndarray  # (d, n2), i-th row is r_i

    def __post_init__(self):
        cols = as_complex_matrix(self.cols, "cols")
        rows = as_complex_matrix(self.rows, "rows")
        if cols.shape[0] != self.n1:
            raise ValueError(f"cols must have n1={self.n1} rows, got {cols.shape}")
        if rows.shape[1] != self.n2:
            raise ValueError(f"rows must have n2={self.n2} columns, got {rows.shape}")
        if cols.shape[1] != rows.shape[0]:
            raise ValueError(
                f"pair count mismatch: {cols.shape[1]} columns vs {rows.shape[0]} rows")
        object.__setattr__(self, "cols", np.ascontiguousarray(cols))
        object.__setattr__(self, "rows", np.ascontiguousarray(rows))

    @classmethod
    def from_pairs(cls, pairs, n1: int | None = None, n2: int | None = None):
        """Build from an iterable of (w, r) with w of length n1, r of length n2."""
        pairs = [(np.asarray(w, np.complex128).reshape(-1),
                  np.asarray(r, np.complex128).reshape(-1)) for w, r in pairs]
        if pairs:
            n1 = len(pairs[0][0]) if n1 is None else n1
            n2 = len(pairs[0][1]) if n2 is None else n2
        else:
            n1 = 0 if n1 is None else n1
            n2 = 0 if n2 is None else n2
        cols = np.zeros((n1, len(pairs)), np.complex128)
        rows = np.zeros((len(pairs), n2), np.complex128)
        for i, (w, r) in enumerate(pairs):
            if len(w) != n1 or len(r) != n2:
                raise ValueError(f"pair {i}: expected lengths ({n1}, {n2}), "
                                 f"got ({len(w)}, {len(r)})")
            cols[:, i] = w
            rows[i, :] = r
        return cls(n1, n2, cols, rows)

    @property
    def d(self) -> int:
        return self.cols.shape[1]

    @property
    def pairs(self):
        return [(self.cols[:, i], self.rows[i, :]) for i in range(self.d)]

    def subfamily(self, indices) -> "VectorPairFamily":
        idx = list(indices)
        return VectorPairFamily(self.n1, self.n2, self.cols[:, idx], self.rows[idx, :])

    def prepend(self, cols: np.ndarray, rows: np.ndarray) -> "VectorPairFamily":
        return VectorPairFamily(
            self.n1, self.n2,
            np.hstack([as_complex_matrix(cols), self.cols]),
            np.vstack([as_complex_matrix(rows), self.rows]))

    def to_matrix_family(self) -> "MatrixFamily":
        members = [(self.cols[:, i:i + 1], self.rows[i:i + 1, :]) for i in range(self.d)]
        return MatrixFamily(self.n1, self.n2, members)


@dataclass(frozen=True, eq=False)
class MatrixFamily:
    """Members (W_t, R_t): W_t is n1 x alpha_t, R_t is beta_t x n2, with the
    middle factors P_t (alpha_t x beta_t) understood as fully parameterized."""

    n1: int
    n2: int
    members: tuple

    def __post_init__(self):
        checked = []
        for t, (W, R) in enumerate(self.members):
            W = as_complex_matrix(W, f"W[{t}]")
            R = as_complex_matrix(R, f"R[{t}]")
            if W.shape[0] != self.n1:
                raise ValueError(f"W[{t}] must have n1={self.n1} rows, got {W.shape}")
            if R.shape[1] != self.n2:
                raise ValueError(f"R[{t}] must have n2={self.n2} columns, got {R.shape}")
            checked.append((W, R))
        object.__setattr__(self, "members", tuple(checked))

    @property
    def d(self) -> int:
        return len(self.members)

    @property
    def col_counts(self) -> np.ndarray:
        return np.array([W.shape[1] for W, _ in self.members], dtype=np.int64)

    @property
    def row_counts(self) -> np.ndarray:
        return np.array([R.shape[0] for _, R in self.members], dtype=np.int64)

    def stacked(self):
        """(all columns side by side, all rows stacked, column offsets, row offsets)."""
        cols = (np.hstack([W for W, _ in self.members])
                if self.d else np.zeros((self.n1, 0), np.complex128))
        rows = (np.vstack([R for _, R in self.members])
                if self.d else np.zeros((0, self.n2), np.complex128))
        coff = np.concatenate([[0], np.cumsum(self.col_counts)]).astype(np.int64)
        roff = np.concatenate([[0], np.cumsum(self.row_counts)]).astype(np.int64)
        return cols, rows, coff, roff

    def aggregate_cols(self, subset) -> np.ndarray:
        parts = [self.members[t][0] for t in sorted(subset)]
        return np.hstack(parts) if parts else np.zeros((self.n1, 0), np.complex128)

    def aggregate_rows(self, subset) -> np.ndarray:
        parts = [self.members[t][1] for t in sorted(subset)]
        return np.vstack(parts) if parts else np.zeros((0, self.n2), np.complex128)

    @property
    def expanded_size(self) -> int:
        return int(sum(W.shape[1] * R.shape[0] for W, R in self.members))

    def expanded_offsets(self) -> np.ndarray:
        sizes = [W.shape[1] * R.shape[0] for W, R in self.members]
        return np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)

    def expanded_triple(self, index: int):
        """Decode an expanded-family index into (member, column, row)."""
        offs = self.expanded_offsets()
        if not (0 <= index < offs[-1]):
            raise ValueError(f"expanded index {index} out of range [0, {offs[-1]})")
        t = int(np.searchsorted(offs, index, side="right")) - 1
        local = index - offs[t]
        beta = self.members[t][1].shape[0]
        return t, local // beta, local % beta


@dataclass(frozen=True)
class JointIndependentSet:
    """Pair indices whose column vectors and row vectors are each linearly
    independent (jointly independent)."""

    indices: tuple

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class SubsetCertificate:
    """A subset S with value rank(aggregated columns of S) + rank(aggregated
    rows of the complement); at the optimum this value is the generic rank."""

    subset: tuple
    value: int


def _annulus(rng: np.random.Generator, shape) -> np.ndarray:
    """Random complex entries with modulus uniform on [0.5, 1.5]; stays away
    from zero so draws do not sit near the degenerate algebraic set."""
    modulus = rng.uniform(0.5, 1.5, shape)
    phase = rng.uniform(0.0, 2.0 * np.pi, shape)
    return modulus * np.exp(1j * phase)


# ---------------------------------------------------------------------------
# matroid intersection


def _orthobasis(M: np.ndarray) -> np.ndarray:
    """Orthonormal basis for the column span of a full-column-rank matrix."""
    if M.shape[1] == 0:
        return M
    Q, _ = np.linalg.qr(M)
    return Q


def _extends(Q: np.ndarray, v: np.ndarray, rtol: float) -> bool:
    """True if v lies outside span(Q): residual after projection (with one
    re-orthogonalization pass) exceeds rtol * |v|."""
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return False
    resid = v - Q @ (Q.conj().T @ v)
    resid -= Q @ (Q.conj().T @ resid)
    return bool(np.linalg.norm(resid) > rtol * nv)


def grank_pairs_matroid(fam: VectorPairFamily,
                        tol: RankTolerance | float | None = None):
    """Maximum jointly independent subset via linear matroid intersection.

    Two matroids on the pair indices: independence of the column vectors and
    independence of the row vectors. Augments along shortest paths in the
    exchange graph (BFS), the standard scheme for matroid intersection.
    Returns (cardinality, witness).
    """
    tol = RankTolerance.coerce(tol)
    rtol = tol.relative
    d = fam.d
    W = fam.cols
    Rt = fam.rows.T  # (n2, d): row vectors as columns

    in_set = np.zeros(d, dtype=bool)

    while True:
        inside = np.flatnonzero(in_set)
        outside = np.flatnonzero(~in_set)
        Qw = _orthobasis(W[:, inside])
        Qr = _orthobasis(Rt[:, inside])

        sources = [y for y in outside if _extends(Qw, W[:, y], rtol)]
        sinks = {y for y in outside if _extends(Qr, Rt[:, y], rtol)}
        if not sources:
            break

        # bases of the current set with one element removed, for exchange tests
        Qw_minus = {x: _orthobasis(W[:, [i for i in inside if i != x]]) for x in inside}
        Qr_minus = {x: _orthobasis(Rt[:, [i for i in inside if i != x]]) for x in inside}

        parent = {y: None for y in sources}
        queue = deque(sources)
        path_end = None
        while queue:
            node = queue.popleft()
            if not in_set[node] and node in sinks:
                path_end = node
                break
            if in_set[node]:
                # exchange on the column matroid: node out, y in
                for y in outside:
                    if y not in parent and _extends(Qw_minus[node], W[:, y], rtol):
                        parent[y] = node
                        queue.append(y)
            else:
                # exchange on the row matroid: x out, node in
                for x in inside:
                    if x not in parent and _extends(Qr_minus[x], Rt[:, node], rtol):
                        parent[x] = node
                        queue.append(x)
        if path_end is None:
            break
        node = path_end
        while node is not None:
            in_set[node] = not in_set[node]
            node = parent[node]

    witness = tuple(int(i) for i in np.flatnonzero(in_set))
    return len(witness), JointIndependentSet(witness)


# ---------------------------------------------------------------------------
# min-over-subsets formula


def _minformula(cols, rows, coff, roff, tol: RankTolerance):
    value, mask = _kernels.minformula_scan(cols, rows, coff, roff, tol.relative)
    return value, mask


def grank_pairs_minformula(fam: VectorPairFamily,
                           tol: RankTolerance | float | None = None,
                           cap: int = ENUMERATION_CAP):
    """Exhaustive min of rank(w_S) + rank(r_complement) over all 2^d subsets.

    Returns (value, certificate) with the lexicographically smallest
    minimizing S. Families beyond the cap must use the matroid route.
    """
    tol = RankTolerance.coerce(tol)
    if fam.d > cap:
        raise CapacityError(
            f"min-formula enumerates 2^{fam.d} subsets (cap 2^{cap}); "
            "use grank_pairs_matroid for large families")
    unit = np.arange(fam.d + 1, dtype=np.int64)
    value, mask = _minformula(fam.cols, fam.rows, unit, unit, tol)
    subset = _kernels.mask_to_indices(mask, fam.d)
    return value, SubsetCertificate(subset, value)


def grank_matrix_minformula(fam: MatrixFamily,
                            tol: RankTolerance | float | None = None,
                            cap: int = ENUMERATION_CAP):
    """Min of rank(W_S) + rank(R_complement) over all 2^d member subsets,
    aggregating members by horizontal/vertical concatenation."""
    tol = RankTolerance.coerce(tol)
    if fam.d > cap:
        raise CapacityError(
            f"min-formula enumerates 2^{fam.d} subsets (cap 2^{cap}); "
            "expand the family and use grank_pairs_matroid instead")
    cols, rows, coff, roff = fam.stacked()
    value, mask = _minformula(cols, rows, coff, roff, tol)
    subset = _kernels.mask_to_indices(mask, fam.d)
    return value, SubsetCertificate(subset, value)


# ---------------------------------------------------------------------------
# sampling


def grank_sampled(fam, trials: int = 3, rng_seed: int = 0,
                  tol: RankTolerance | float | None = None) -> int:
    """Maximum numeric rank of the assembled sum over random parameter draws.

    A single generic draw attains the generic rank with probability one;
    extra trials guard against a near-degenerate draw slipping under the
    rank tolerance.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    tol = RankTolerance.coerce(tol)
    rng = np.random.default_rng(np.random.SeedSequence(rng_seed))
    best = 0
    for _ in range(trials):
        if isinstance(fam, VectorPairFamily):
            p = _annulus(rng, fam.d)
            M = (fam.cols * p) @ fam.rows
        elif isinstance(fam, MatrixFamily):
            M = np.zeros((fam.n1, fam.n2), np.complex128)
            for W, R in fam.members:
                P = _annulus(rng, (W.shape[1], R.shape[0]))
                M += W @ P @ R
        else:
            raise TypeError(f"unsupported family type {type(fam).__name__}")
        best = max(best, numeric_rank(M, tol))
    return best


# ---------------------------------------------------------------------------
# matrix families: expansion, refinement, constant term


def expand_matrix_family(fam: MatrixFamily) -> VectorPairFamily:
    """All (column of W_t, row of R_t) pairs, ordered by (member, column,
    row); a parameterized middle factor is equivalent to one scalar
    parameter per such pair."""
    col_blocks = []
    row_blocks = []
    for W, R in fam.members:
        beta = R.shape[0]
        if W.shape[1] == 0 or beta == 0:
            continue
        col_blocks.append(np.repeat(W, beta, axis=1))
        row_blocks.append(np.tile(R, (W.shape[1], 1)))
    cols = np.hstack(col_blocks) if col_blocks else np.zeros((fam.n1, 0), np.complex128)
    rows = np.vstack(row_blocks) if row_blocks else np.zeros((0, fam.n2), np.complex128)
    return VectorPairFamily(fam.n1, fam.n2, cols, rows)


def refine_min_subset(fam: MatrixFamily, vector_subset,
                      tol: RankTolerance | float | None = None) -> SubsetCertificate:
    """Collapse an expanded-family minimizer S0 to a member-level subset S1.

    For each member: when every column of W_t is present in the aggregated
    w_S0, drop R_t's rows from the complement side (t goes to S1); otherwise
    drop W_t's columns. The resulting member-level certificate value never
    exceeds the expanded one.
    """
    tol = RankTolerance.coerce(tol)
    dbar = fam.expanded_size
    idx = sorted(int(i) for i in vector_subset)
    if len(set(idx)) != len(idx):
        raise ValueError("vector_subset contains duplicate indices")
    if idx and not (0 <= idx[0] and idx[-1] < dbar):
        raise ValueError(f"vector_subset indices must lie in [0, {dbar})")

    present = [set() for _ in range(fam.d)]  # member -> columns appearing in w_S0
    for i in idx:
        t, col, _row = fam.expanded_triple(i)
        present[t].add(col)

    s1 = [t for t in range(fam.d)
          if len(present[t]) == fam.members[t][0].shape[1]]
    complement = [t for t in range(fam.d) if t not in set(s1)]
    value = (numeric_rank(fam.aggregate_cols(s1), tol)
             + numeric_rank(fam.aggregate_rows(complement), tol))
    return SubsetCertificate(tuple(s1), value)


def _grank_pairs_auto(fam: VectorPairFamily, tol: RankTolerance) -> int:
    if fam.d <= _AUTO_ROUTE_CAP:
        value, _ = grank_pairs_minformula(fam, tol)
        return value
    value, _ = grank_pairs_matroid(fam, tol)
    return value


def sampled_rank_with_constant(M, fam: MatrixFamily, trials: int = 3,
                               rng_seed: int = 0,
                               tol: RankTolerance | float | None = None) -> int:
    """Maximum numeric rank of M + sum_t W_t P_t R_t over random draws."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    tol = RankTolerance.coerce(tol)
    M = as_complex_matrix(M, "M")
    if M.shape != (fam.n1, fam.n2):
        raise ValueError(f"M must be {fam.n1} x {fam.n2}, got {M.shape}")
    rng = np.random.default_rng(np.random.SeedSequence(rng_seed))
    best = 0
    for _ in range(trials):
        total = M.copy()
        for W, R in fam.members:
            P = _annulus(rng, (W.shape[1], R.shape[0]))
            total += W @ P @ R
        best = max(best, numeric_rank(total, tol))
    return best


def grank_constant_plus_family(M, fam: MatrixFamily,
                               tol: RankTolerance | float | None = None,
                               trials: int = 3, rng_seed: int = 0) -> int:
    """Generic rank of M + sum_t W_t P_t R_t.

    The constant M is rank-factorized into jointly independent pairs, those
    pairs are prepended to the expanded family as if they carried parameters
    of their own, and the fully parameterized family is evaluated
    combinatorially. Fixing the prepended parameters back to one restricts
    the parameter space, so the combinatorial value is an upper bound on the
    target; for generic data it is exact, and direct sampling of
    M + sum_t W_t P_t R_t cross-checks it.

    The bound is not always tight: aligned data can place the all-ones slice
    inside the rank-drop locus of the parameterized family (systems built
    around a rank-deficient bordered pencil do this). When heavier sampling
    confirms a smaller value, the confirmed sampled value is returned, since
    every draw is a rank witness for the defined quantity. A sampled value
    above the combinatorial bound is impossible and raises ConsistencyError.
    """
    tol = RankTolerance.coerce(tol)
    M = as_complex_matrix(M, "M")
    if M.shape != (fam.n1, fam.n2):
        raise ValueError(f"M must be {fam.n1} x {fam.n2}, got {M.shape}")

    fact = rank_factorize(M, tol)
    prepended = expand_matrix_family(fam).prepend(fact.W, fact.R)
    combinatorial = _grank_pairs_auto(prepended, tol)
    sampled = sampled_rank_with_constant(M, fam, trials, rng_seed, tol)

    if sampled > combinatorial:
        raise ConsistencyError(
            f"sampled rank {sampled} exceeds the combinatorial bound "
            f"{combinatorial}; tolerance failure or bug")
    if sampled == combinatorial:
        return combinatorial
    confirm_seed = int(np.random.SeedSequence(
        rng_seed, spawn_key=(0xC0FFEE,)).generate_state(1)[0])
    confirm = sampled_rank_with_constant(M, fam, max(3 * trials, 9),
                                         confirm_seed, tol)
    if confirm > combinatorial:
        raise ConsistencyError(
            f"sampled rank {confirm} exceeds the combinatorial bound "
            f"{combinatorial}; tolerance failure or bug")
    return max(sampled, confirm)
