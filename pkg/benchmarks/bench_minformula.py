"""Benchmark the subset-scan kernel: numba @njit vs the pure-numpy twin.

The scan evaluates rank(w_S) + rank(r_complement) over all 2^d subsets, the
hot loop behind the min-formula generic-rank route. Run as

    python benchmarks/bench_minformula.py [--max-d 16] [--dim 6] [--seed 0]

The first numba call includes JIT compilation; a warmup scan is timed
separately so the steady-state comparison is fair.
"""

import argparse
import time

import numpy as np

from fixedspec import _kernels
from fixedspec.generate import crandn, random_matrix_family, spawn_rng


def time_scan(fn, args, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def bench_case(name, cols, rows, coff, roff, rtol=1e-9):
    args = (cols, rows, coff, roff, rtol)
    t_np, r_np = time_scan(_kernels.minformula_scan_numpy, args)
    if _kernels._HAVE_NUMBA:
        warm_start = time.perf_counter()
        _kernels.minformula_scan_numba(*args)
        warmup = time.perf_counter() - warm_start
        t_nb, r_nb = time_scan(_kernels.minformula_scan_numba, args)
        assert r_np == r_nb, f"backend mismatch on {name}: {r_np} vs {r_nb}"
        print(f"{name:<28} numpy {t_np * 1e3:9.2f} ms   numba {t_nb * 1e3:9.2f} ms"
              f"   speedup {t_np / t_nb:6.1f}x   (first call {warmup * 1e3:.0f} ms)")
    else:
        print(f"{name:<28} numpy {t_np * 1e3:9.2f} ms   numba unavailable")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-d", type=int, default=16)
    parser.add_argument("--dim", type=int, default=6)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = spawn_rng(args.seed, 0)
    print(f"scan backend default: {_kernels.active_backend()}")

    for d in range(8, args.max_d + 1, 4):
        cols = crandn(rng, (args.dim, d))
        rows = crandn(rng, (d, args.dim))
        unit = np.arange(d + 1, dtype=np.int64)
        bench_case(f"pair family d={d} ({2 ** d} subsets)",
                   cols, rows, unit, unit)

    fam = random_matrix_family(rng, args.dim, args.dim, 12, 2, 2)
    cols, rows, coff, roff = fam.stacked()
    bench_case("matrix family d=12 grouped", cols, rows, coff, roff)


if __name__ == "__main__":
    main()
