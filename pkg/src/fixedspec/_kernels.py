"""Subset-scan kernels for the min-over-subsets rank formula.

The scan enumerates every subset S of the d member groups, computing
rank(columns of members in S) + rank(rows of members outside S), and keeps
the minimum. With 2^d subsets and two small SVDs per subset this loop
dominates runtime, so it is compiled with numba when available; a pure-numpy
twin implements the identical iteration order and comparisons.

Backend selection: numba by default; set FIXEDSPEC_DISABLE_NUMBA=1 to force
the numpy path (also used automatically when numba or its LAPACK bindings
are missing).

Subsets are visited in ascending lexicographic order of their sorted index
tuples (∅, {0}, {0,1}, ..., {0,d-1}, {0,1,..}, ..., {d-1}), and only strict
improvements replace the incumbent, so the reported minimizer is always the
lexicographically smallest one. Both paths share this order.
"""

from __future__ import annotations

import importlib.util
import os

import numpy as np

__all__ = [
    "active_backend",
    "minformula_scan",
    "minformula_scan_numpy",
    "minformula_scan_numba",
    "mask_to_indices",
]


def _numba_disabled_by_env() -> bool:
    return os.environ.get("FIXEDSPEC_DISABLE_NUMBA", "").strip() not in ("", "0")


def _numba_usable() -> bool:
    if importlib.util.find_spec("numba") is None:
        return False
    # numba lowers np.linalg through scipy's cython LAPACK bindings
    if importlib.util.find_spec("scipy") is None:
        return False
    return True


_HAVE_NUMBA = _numba_usable()
_USE_NUMBA = _HAVE_NUMBA and not _numba_disabled_by_env()


def active_backend() -> str:
    """Name of the scan backend the dispatcher will use: 'numba' or 'numpy'."""
    return "numba" if _USE_NUMBA else "numpy"


def _next_subset(mask: int, d: int) -> int:
    """Successor of `mask` in tuple-lexicographic subset order, -1 at the end.

    Rule: append the element after the current maximum when possible;
    otherwise drop the maximum and bump the new maximum by one.
    """
    if mask == 0:
        return 1 if d > 0 else -1
    hi = d - 1
    while (mask >> hi) & 1 == 0:
        hi -= 1
    if hi < d - 1:
        return mask | (1 << (hi + 1))
    m2 = mask & ~(1 << hi)
    if m2 == 0:
        return -1
    hi2 = hi - 1
    while (m2 >> hi2) & 1 == 0:
        hi2 -= 1
    return (m2 & ~(1 << hi2)) | (1 << (hi2 + 1))


def mask_to_indices(mask: int, d: int) -> tuple[int, ...]:
    return tuple(t for t in range(d) if (mask >> t) & 1)


def minformula_scan_numpy(cols: np.ndarray, rows: np.ndarray,
                          col_offsets: np.ndarray, row_offsets: np.ndarray,
                          rtol: float) -> tuple[int, int]:
    """Pure-numpy subset scan. Returns (min value, minimizing subset mask)."""
    d = len(col_offsets) - 1
    col_member = np.repeat(np.arange(d), np.diff(col_offsets))
    row_member = np.repeat(np.arange(d), np.diff(row_offsets))

    def rank_of(M: np.ndarray) -> int:
        if min(M.shape) == 0:
            return 0
        s = np.linalg.svd(M, compute_uv=False)
        return int(np.count_nonzero(s > rtol * s[0]))

    best_val = 1 << 62
    best_mask = 0
    mask = 0
    while True:
        wsub = cols[:, (mask >> col_member) & 1 == 1]
        rsub = rows[(mask >> row_member) & 1 == 0, :]
        v = rank_of(wsub) + rank_of(rsub)
        if v < best_val:
            best_val = v
            best_mask = mask
        mask = _next_subset(mask, d)
        if mask < 0:
            break
    return best_val, best_mask


def _scan_loop(cols, rows, col_offsets, row_offsets, rtol):  # pragma: no cover
    # numba source; the numpy twin above is the tested reference of record
    d = col_offsets.shape[0] - 1
    n1 = cols.shape[0]
    n2 = rows.shape[1]
    best_val = 1 << 62
    best_mask = 0
    mask = 0
    while True:
        ncols = 0
        nrows = 0
        for t in range(d):
            if (mask >> t) & 1:
                ncols += col_offsets[t + 1] - col_offsets[t]
            else:
                nrows += row_offsets[t + 1] - row_offsets[t]
        rank_w = 0
        if ncols > 0 and n1 > 0:
            sub = np.empty((n1, ncols), np.complex128)
            c = 0
            for t in range(d):
                if (mask >> t) & 1:
                    for j in range(col_offsets[t], col_offsets[t + 1]):
                        for i in range(n1):
                            sub[i, c] = cols[i, j]
                        c += 1
            u, s, vh = np.linalg.svd(sub, full_matrices=False)
            smax = s[0]
            for i in range(s.shape[0]):
                if s[i] > rtol * smax:
                    rank_w += 1
        rank_r = 0
        if nrows > 0 and n2 > 0:
            sub2 = np.empty((nrows, n2), np.complex128)
            r = 0
            for t in range(d):
                if not ((mask >> t) & 1):
                    for j in range(row_offsets[t], row_offsets[t + 1]):
                        for i in range(n2):
                            sub2[r, i] = rows[j, i]
                        r += 1
            u2, s2, vh2 = np.linalg.svd(sub2, full_matrices=False)
            smax2 = s2[0]
            for i in range(s2.shape[0]):
                if s2[i] > rtol * smax2:
                    rank_r += 1
        v = rank_w + rank_r
        if v < best_val:
            best_val = v
            best_mask = mask
        # successor in tuple-lexicographic order
        if mask == 0:
            if d == 0:
                break
            mask = 1
            continue
        hi = d - 1
        while (mask >> hi) & 1 == 0:
            hi -= 1
        if hi < d - 1:
            mask = mask | (1 << (hi + 1))
            continue
        m2 = mask & ~(1 << hi)
        if m2 == 0:
            break
        hi2 = hi - 1
        while (m2 >> hi2) & 1 == 0:
            hi2 -= 1
        mask = (m2 & ~(1 << hi2)) | (1 << (hi2 + 1))
    return best_val, best_mask


_scan_jit = None


def _get_jit():
    global _scan_jit
    if _scan_jit is None:
        from numba import njit

        _scan_jit = njit(cache=True)(_scan_loop)
    return _scan_jit


def minformula_scan_numba(cols: np.ndarray, rows: np.ndarray,
                          col_offsets: np.ndarray, row_offsets: np.ndarray,
                          rtol: float) -> tuple[int, int]:
    """Numba-compiled subset scan; same contract as the numpy twin."""
    if not _HAVE_NUMBA:
        raise RuntimeError("numba backend unavailable (numba/scipy not importable)")
    val, mask = _get_jit()(
        np.ascontiguousarray(cols, dtype=np.complex128),
        np.ascontiguousarray(rows, dtype=np.complex128),
        np.asarray(col_offsets, dtype=np.int64),
        np.asarray(row_offsets, dtype=np.int64),
        float(rtol),
    )
    return int(val), int(mask)


def minformula_scan(cols: np.ndarray, rows: np.ndarray,
                    col_offsets: np.ndarray, row_offsets: np.ndarray,
                    rtol: float) -> tuple[int, int]:
    """Dispatch to the active backend."""
    if _USE_NUMBA:
        return minformula_scan_numba(cols, rows, col_offsets, row_offsets, rtol)
    return minformula_scan_numpy(cols, rows, col_offsets, row_offsets, rtol)
