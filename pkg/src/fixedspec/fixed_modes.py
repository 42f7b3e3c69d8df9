"""Fixed spectrum of multi-channel LTI systems.

An eigenvalue of A is fixed when no choice of decentralized static output
feedback gains u_i = F_i y_i can move it. Membership is decided by the
bordered-pencil rank condition: lambda is fixed iff some channel subset S
makes [[lambda*I - A, B_S], [C_complement, 0]] rank deficient. Two further
routes cross-validate the verdict: randomized feedback sampling (straight
from the definition) and the generic rank of the parameterized closed-loop
pencil.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import combinations

import numpy as np

from .grank import MatrixFamily, grank_constant_plus_family, grank_matrix_minformula
from .linalg import (
    CapacityError,
    RankTolerance,
    as_complex_matrix,
    bordered_rank,
    eigenvalues,
    rank_factorize,
)

__all__ = [
    "SUBSET_CAP",
    "EIG_CLUSTER_TOL",
    "DEFAULT_MATCH_TOL",
    "MultiChannelSystem",
    "FixedModeCertificate",
    "FixedModeRecord",
    "FixedSpectrumReport",
    "pencil_rank_test",
    "find_blocking_subset",
    "find_blocking_subset_via_grank",
    "fixed_spectrum",
    "fixed_spectrum_sampled",
    "grank_closed_loop",
    "analyze_system",
]

SUBSET_CAP = 20
EIG_CLUSTER_TOL = 1e-7
DEFAULT_MATCH_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class MultiChannelSystem:
    """State matrix A (n x n) plus k channels (B_i, C_i); feedback of y_i is
    restricted to u_i. Channels with zero inputs or outputs are legal and
    contribute empty blocks."""

    A: np.ndarray
    channels: tuple

    def __post_init__(self):
        A = as_complex_matrix(self.A, "A")
        n, m = A.shape
        if n != m:
            raise ValueError(f"A must be square, got {A.shape}")
        if len(self.channels) < 1:
            raise ValueError("at least one channel is required")
        checked = []
        for i, (B, C) in enumerate(self.channels):
            B = as_complex_matrix(B, f"B[{i}]")
            C = as_complex_matrix(C, f"C[{i}]")
            if B.shape[0] != n:
                raise ValueError(f"B[{i}] must have {n} rows, got {B.shape}")
            if C.shape[1] != n:
                raise ValueError(f"C[{i}] must have {n} columns, got {C.shape}")
            checked.append((B, C))
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "channels", tuple(checked))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def k(self) -> int:
        return len(self.channels)

    @property
    def input_dims(self) -> tuple:
        return tuple(B.shape[1] for B, _ in self.channels)

    @property
    def output_dims(self) -> tuple:
        return tuple(C.shape[0] for _, C in self.channels)

    def input_aggregate(self, subset) -> np.ndarray:
        """B_S: the B_i for i in S, side by side in ascending index order."""
        parts = [self.channels[i][0] for i in sorted(subset)]
        return np.hstack(parts) if parts else np.zeros((self.n, 0), np.complex128)

    def output_aggregate_complement(self, subset) -> np.ndarray:
        """C over the complement of S, stacked in ascending index order."""
        chosen = set(subset)
        parts = [self.channels[j][1] for j in range(self.k) if j not in chosen]
        return np.vstack(parts) if parts else np.zeros((0, self.n), np.complex128)

    def feedback_family(self) -> MatrixFamily:
        """The channels as a matrix family: feedback terms B_j F_j C_j with
        every gain entry its own parameter."""
        return MatrixFamily(self.n, self.n, self.channels)

    def closed_loop(self, gains) -> np.ndarray:
        """A + sum_i B_i F_i C_i for the given per-channel gain list."""
        if len(gains) != self.k:
            raise ValueError(f"expected {self.k} gains, got {len(gains)}")
        out = self.A.copy()
        for (B, C), F in zip(self.channels, gains):
            F = np.asarray(F)
            if F.shape != (B.shape[1], C.shape[0]):
                raise ValueError(f"gain shape {F.shape} does not match "
                                 f"({B.shape[1]}, {C.shape[0]})")
            out += B @ F @ C
        return out


@dataclass(frozen=True)
class FixedModeCertificate:
    """Channel subset witnessing the rank deficiency of the bordered pencil
    at lambda; deficiency = n - rank > 0."""

    lam: complex
    subset: tuple
    deficiency: int


@dataclass(frozen=True)
class FixedModeRecord:
    lam: complex
    multiplicity: int
    is_fixed: bool
    certificate: FixedModeCertificate | None
    oracle_agrees: bool | None = None


@dataclass(frozen=True)
class FixedSpectrumReport:
    """Per-eigenvalue fixed-mode verdicts plus the tolerances (and, once the
    sampling oracle has run, the seed) that produced them."""

    records: tuple
    tolerance: float
    cluster_tol: float
    seed: int | None = None
    trials: int | None = None
    match_tol: float | None = None

    @property
    def fixed(self) -> tuple:
        return tuple(r.lam for r in self.records if r.is_fixed)

    @property
    def has_fixed_spectrum(self) -> bool:
        return any(r.is_fixed for r in self.records)

    @property
    def oracle_consistent(self) -> bool:
        return all(r.oracle_agrees is not False for r in self.records)


def _check_subset(subset, k: int) -> tuple:
    out = tuple(sorted(int(i) for i in subset))
    if len(set(out)) != len(out):
        raise ValueError("subset contains duplicate channel indices")
    if out and not (0 <= out[0] and out[-1] < k):
        raise ValueError(f"channel indices must lie in [0, {k})")
    return out


def pencil_rank_test(sys: MultiChannelSystem, lam: complex, subset,
                     tol: RankTolerance | float | None = None):
    """Rank of [[lam*I - A, B_S], [C_complement, 0]] and whether it is
    deficient (< n). S = all channels gives the controllability-style block,
    S = empty the observability-style block."""
    tol = RankTolerance.coerce(tol)
    lam = complex(lam)
    if not (np.isfinite(lam.real) and np.isfinite(lam.imag)):
        raise ValueError("lambda must be finite")
    subset = _check_subset(subset, sys.k)
    pencil = lam * np.eye(sys.n) - sys.A
    rank = bordered_rank(pencil, sys.input_aggregate(subset),
                         sys.output_aggregate_complement(subset), tol)
    return rank < sys.n, rank


def _subsets_smallest_first(k: int):
    for size in range(k + 1):
        yield from combinations(range(k), size)


def find_blocking_subset(sys: MultiChannelSystem, lam: complex,
                         tol: RankTolerance | float | None = None,
                         cap: int = SUBSET_CAP):
    """Smallest-cardinality (ties: lexicographically smallest) channel subset
    making the pencil deficient at lam, or None when no subset does."""
    if sys.k > cap:
        raise CapacityError(f"subset search enumerates 2^{sys.k} subsets (cap 2^{cap})")
    tol = RankTolerance.coerce(tol)
    for subset in _subsets_smallest_first(sys.k):
        deficient, _rank = pencil_rank_test(sys, lam, subset, tol)
        if deficient:
            return subset
    return None


def find_blocking_subset_via_grank(sys: MultiChannelSystem, lam: complex,
                                   tol: RankTolerance | float | None = None,
                                   cap: int = SUBSET_CAP):
    """Blocking subset through the generic-rank pipeline instead of pencil
    enumeration: factor lam*I - A into jointly independent rank-one pairs,
    adjoin the channels as parameterized members, and read the channel part
    out of a minimizing subset of the min-formula. Returns None when the
    minimum is >= n.

    Any subset this returns is a valid blocker (the rank-sum bound transfers
    to the pencil), but the parameterized relaxation it minimizes can sit
    strictly above the fixed-coefficient pencil on aligned data, so a None
    here does not certify the absence of a fixed mode; find_blocking_subset
    is authoritative."""
    tol = RankTolerance.coerce(tol)
    lam = complex(lam)
    fact = rank_factorize(lam * np.eye(sys.n) - sys.A, tol)
    pair_members = [(fact.W[:, i:i + 1], fact.R[i:i + 1, :]) for i in range(fact.rank)]
    combined = MatrixFamily(sys.n, sys.n, pair_members + list(sys.channels))
    if combined.d > cap:
        raise CapacityError(f"combined family has {combined.d} members (cap {cap})")
    value, cert = grank_matrix_minformula(combined, tol)
    if value >= sys.n:
        return None
    return tuple(i - fact.rank for i in cert.subset if i >= fact.rank)


def _cluster_eigenvalues(eigs: np.ndarray, cluster_tol: float):
    """Greedy clustering of the sorted eigenvalue list; representatives are
    running means, deterministic for a fixed input order."""
    reps: list[complex] = []
    counts: list[int] = []
    for lam in eigs:
        placed = False
        for idx, rep in enumerate(reps):
            if abs(lam - rep) <= cluster_tol:
                counts[idx] += 1
                reps[idx] = rep + (lam - rep) / counts[idx]
                placed = True
                break
        if not placed:
            reps.append(complex(lam))
            counts.append(1)
    order = sorted(range(len(reps)), key=lambda i: (reps[i].real, reps[i].imag))
    return [(reps[i], counts[i]) for i in order]


def fixed_spectrum(sys: MultiChannelSystem,
                   tol: RankTolerance | float | None = None,
                   cluster_tol: float = EIG_CLUSTER_TOL,
                   cap: int = SUBSET_CAP) -> FixedSpectrumReport:
    """Verdict for every (deduplicated) eigenvalue of A via the bordered
    pencil over all channel subsets."""
    tol = RankTolerance.coerce(tol)
    if sys.k > cap:
        raise CapacityError(f"subset search enumerates 2^{sys.k} subsets (cap 2^{cap})")
    records = []
    for lam, mult in _cluster_eigenvalues(eigenvalues(sys.A), cluster_tol):
        subset = find_blocking_subset(sys, lam, tol, cap)
        certificate = None
        if subset is not None:
            _deficient, rank = pencil_rank_test(sys, lam, subset, tol)
            certificate = FixedModeCertificate(lam, subset, sys.n - rank)
        records.append(FixedModeRecord(lam, mult, subset is not None, certificate))
    return FixedSpectrumReport(tuple(records), tol.relative, cluster_tol)


def fixed_spectrum_sampled(sys: MultiChannelSystem, trials: int = 8,
                           rng_seed: int = 0,
                           match_tol: float = DEFAULT_MATCH_TOL) -> np.ndarray:
    """Eigenvalues of A that survive every random feedback draw.

    Gains are real with entries uniform on [-1, 1], matching the fixed
    spectrum's definition over real gain matrices. Candidates are matched to
    each closed-loop spectrum by greedy nearest-neighbor within match_tol,
    consuming one closed-loop eigenvalue per candidate (multiplicity-aware).
    True fixed modes always survive; anything else survives all trials with
    probability zero.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(np.random.SeedSequence(rng_seed))
    survivors = list(eigenvalues(sys.A))
    for _ in range(trials):
        if not survivors:
            break
        gains = [rng.uniform(-1.0, 1.0, (B.shape[1], C.shape[0]))
                 for B, C in sys.channels]
        closed = list(eigenvalues(sys.closed_loop(gains)))
        kept = []
        for lam in survivors:
            if not closed:
                break
            dists = [abs(lam - mu) for mu in closed]
            j = int(np.argmin(dists))
            if dists[j] <= match_tol:
                kept.append(lam)
                closed.pop(j)
        survivors = kept
    out = np.array(survivors, dtype=np.complex128)
    order = np.lexsort((out.imag, out.real))
    return out[order]


def grank_closed_loop(sys: MultiChannelSystem, lam: complex,
                      tol: RankTolerance | float | None = None,
                      trials: int = 3, rng_seed: int = 0) -> int:
    """Generic rank of lam*I - A - sum_j B_j F_j C_j over all gains; equals
    n exactly when lam is not fixed."""
    lam = complex(lam)
    pencil = lam * np.eye(sys.n) - sys.A
    return grank_constant_plus_family(pencil, sys.feedback_family(), tol,
                                      trials=trials, rng_seed=rng_seed)


def analyze_system(sys: MultiChannelSystem,
                   tol: RankTolerance | float | None = None,
                   trials: int = 8, rng_seed: int = 0,
                   match_tol: float = DEFAULT_MATCH_TOL,
                   cluster_tol: float = EIG_CLUSTER_TOL,
                   cap: int = SUBSET_CAP) -> FixedSpectrumReport:
    """Pencil-based report with the sampling oracle's agreement attached."""
    report = fixed_spectrum(sys, tol, cluster_tol, cap)
    sampled = fixed_spectrum_sampled(sys, trials, rng_seed, match_tol)
    records = []
    for rec in report.records:
        in_sampled = bool(sampled.size) and bool(
            np.min(np.abs(sampled - rec.lam)) <= match_tol)
        records.append(replace(rec, oracle_agrees=(rec.is_fixed == in_sampled)))
    return FixedSpectrumReport(tuple(records), report.tolerance, cluster_tol,
                               seed=rng_seed, trials=trials, match_tol=match_tol)
