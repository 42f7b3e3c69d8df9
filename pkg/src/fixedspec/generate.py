"""Seeded random instance generators.

Shared by the CLI's gen command, the cross-validation campaigns, and the
test suite. All generators take an explicit numpy Generator; sub-seeds are
derived from a root seed with SeedSequence spawn keys so every instance is
reproducible from (seed, campaign, index).

Plain random instances are generically unstructured (full ranks, empty
fixed spectra), so most generators deliberately inject structure: shared
low-dimensional spans, duplicated or zero vectors, and reverse-engineered
rank-deficient bordered blocks.
"""

from __future__ import annotations

import numpy as np

from .fixed_modes import MultiChannelSystem
from .grank import MatrixFamily, VectorPairFamily

__all__ = [
    "spawn_rng",
    "crandn",
    "random_system",
    "embedded_fixed_mode_system",
    "modal_single_channel_system",
    "random_pair_family",
    "random_matrix_family",
    "random_low_rank",
    "random_bordered_triple",
    "deficient_bordered_triple",
]


def spawn_rng(seed: int, *key: int) -> np.random.Generator:
    """Child generator for (seed, key...); documented splitting scheme."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


def crandn(rng: np.random.Generator, shape=()) -> np.ndarray:
    """Standard complex normal entries."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_system(rng: np.random.Generator, n: int, k: int,
                  dims=None) -> MultiChannelSystem:
    """Random real system; dims is a list of (m_i, l_i), drawn from {0, 1, 2}
    when omitted."""
    if dims is None:
        dims = [(int(rng.integers(0, 3)), int(rng.integers(0, 3))) for _ in range(k)]
    A = rng.uniform(-1.0, 1.0, (n, n))
    channels = [(rng.uniform(-1.0, 1.0, (n, m)), rng.uniform(-1.0, 1.0, (l, n)))
                for m, l in dims]
    return MultiChannelSystem(A, channels)


def embedded_fixed_mode_system(rng: np.random.Generator, n: int, k: int,
                               dims=None, lam: complex = 1.0, subset=None):
    """System with lam guaranteed in its fixed spectrum.

    Reverse-engineers the pencil condition: builds a rank-(n-1) block matrix
    with a zero lower-right corner, reads lam*I - A, B_S and the complement
    C rows out of its blocks, and fills the unconstrained channel blocks
    randomly. Returns (system, subset).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if dims is None:
        dims = [(int(rng.integers(0, 3)), int(rng.integers(0, 3))) for _ in range(k)]
    if subset is None:
        subset = tuple(i for i in range(k) if rng.random() < 0.5)
    subset = tuple(sorted(subset))
    complement = [j for j in range(k) if j not in set(subset)]

    lam = complex(lam)
    real = lam.imag == 0.0
    m_s = sum(dims[i][0] for i in subset)
    l_c = sum(dims[j][1] for j in complement)
    r = n - 1

    def draw(shape):
        return rng.uniform(-1.0, 1.0, shape) if real else crandn(rng, shape)

    X = draw((n + l_c, r))
    Y = draw((r, n + m_s))
    if l_c > 0 and m_s > 0 and r > 0:
        q1 = max(1, r // 2)
        X[n:, q1:] = 0.0  # lower rows use only the first q1 inner coordinates
        Y[:q1, n:] = 0.0  # right columns only the rest, so the corner is zero
    Z = X @ Y

    A = lam * np.eye(n) - Z[:n, :n]
    channels = []
    col = n
    row = n
    for i in range(k):
        m, l = dims[i]
        if i in set(subset):
            B = Z[:n, col:col + m]
            col += m
            C = draw((l, n))
        else:
            B = draw((n, m))
            C = Z[n:, :n][row - n:row - n + l, :]
            row += l
        channels.append((B, C))
    return MultiChannelSystem(A, channels), subset


def modal_single_channel_system(rng: np.random.Generator, n: int,
                                m: int, l: int):
    """Single-channel system with known PBH structure.

    Built in modal coordinates with well-separated real eigenvalues, zeroing
    B rows (uncontrollable) and C columns (unobservable) for random mode
    subsets, then hidden behind a random orthogonal change of basis. Returns
    (system, eigenvalues, fixed_mask) where fixed_mask marks the modes that
    are uncontrollable or unobservable.
    """
    eigs = np.linspace(-2.0, 2.0, n) if n > 1 else np.array([0.5])
    eigs = eigs + rng.uniform(-0.05, 0.05, n)
    Bm = rng.uniform(-1.0, 1.0, (n, m)) + np.sign(rng.uniform(-1, 1, (n, m))) * 0.2
    Cm = rng.uniform(-1.0, 1.0, (l, n)) + np.sign(rng.uniform(-1, 1, (l, n))) * 0.2
    uncontrollable = rng.random(n) < 0.3
    unobservable = rng.random(n) < 0.3
    Bm[uncontrollable, :] = 0.0
    Cm[:, unobservable] = 0.0
    if m == 0:
        uncontrollable = np.ones(n, dtype=bool)
    if l == 0:
        unobservable = np.ones(n, dtype=bool)
    T, _ = np.linalg.qr(rng.standard_normal((n, n)))
    A = T @ np.diag(eigs) @ T.T
    sys = MultiChannelSystem(A, [(T @ Bm, Cm @ T.T)])
    return sys, eigs, uncontrollable | unobservable


def _structured_vectors(rng: np.random.Generator, ambient: int, count: int,
                        as_rows: bool) -> np.ndarray:
    """Vectors drawn from a random low-dimensional span, with occasional
    exact duplicates and zero vectors."""
    span_dim = int(rng.integers(1, ambient + 1)) if ambient else 0
    basis = crandn(rng, (ambient, span_dim))
    out = np.zeros((ambient, count), np.complex128)
    for i in range(count):
        roll = rng.random()
        if i > 0 and roll < 0.15:
            out[:, i] = out[:, int(rng.integers(0, i))]
        elif roll < 0.20:
            pass  # zero vector
        else:
            out[:, i] = basis @ crandn(rng, span_dim)
    return out.T.copy() if as_rows else out


def random_pair_family(rng: np.random.Generator, n1: int, n2: int,
                       d: int) -> VectorPairFamily:
    cols = _structured_vectors(rng, n1, d, as_rows=False)
    rows = _structured_vectors(rng, n2, d, as_rows=True)
    return VectorPairFamily(n1, n2, cols, rows)


def random_matrix_family(rng: np.random.Generator, n1: int, n2: int, d: int,
                         max_cols: int = 3, max_rows: int = 3) -> MatrixFamily:
    members = []
    for _ in range(d):
        alpha = int(rng.integers(0, max_cols + 1))
        beta = int(rng.integers(0, max_rows + 1))
        W = _structured_vectors(rng, n1, alpha, as_rows=False)
        R = _structured_vectors(rng, n2, beta, as_rows=True)
        members.append((W, R))
    return MatrixFamily(n1, n2, members)


def random_low_rank(rng: np.random.Generator, n1: int, n2: int,
                    t: int) -> np.ndarray:
    """Dense matrix of exact rank t (generic factors)."""
    if t > min(n1, n2):
        raise ValueError(f"rank {t} exceeds min dimension {min(n1, n2)}")
    return crandn(rng, (n1, t)) @ crandn(rng, (t, n2))


def random_bordered_triple(rng: np.random.Generator, n: int,
                           m: int | None = None, l: int | None = None):
    """Generic (A, B, C); the bordered block matrix has full rank n almost
    surely."""
    m = int(rng.integers(0, 4)) if m is None else m
    l = int(rng.integers(0, 4)) if l is None else l
    return crandn(rng, (n, n)), crandn(rng, (n, m)), crandn(rng, (l, n))


def deficient_bordered_triple(rng: np.random.Generator, n: int,
                              m: int | None = None, l: int | None = None,
                              rank: int | None = None):
    """(A, B, C) whose bordered block matrix [[A, B], [C, 0]] has the given
    rank < n by construction (zero-corner factor trick)."""
    m = int(rng.integers(0, 4)) if m is None else m
    l = int(rng.integers(0, 4)) if l is None else l
    r = int(rng.integers(0, n)) if rank is None else rank
    if not 0 <= r < n:
        raise ValueError(f"rank must lie in [0, {n})")
    X = crandn(rng, (n + l, r))
    Y = crandn(rng, (r, n + m))
    if l > 0 and m > 0 and r > 0:
        q1 = max(1, r // 2)
        X[n:, q1:] = 0.0
        Y[:q1, n:] = 0.0
    Z = X @ Y
    return Z[:n, :n], Z[:n, n:], Z[n:, :n]
