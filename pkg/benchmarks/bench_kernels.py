"""Timing harness for the dense geometric-product kernels.

Compares the compiled double-loop kernel against the pure-numpy
bincount formulation on random dense coefficient vectors, one row per
signature. Both paths share the same exact sign tables, so the last
column doubles as a correctness check. The library itself picks the
path via KASPIN_DISABLE_NUMBA; here both are timed explicitly.

    python3 benchmarks/bench_kernels.py --pairs 300 --seed 0
"""

import argparse
import time

import numpy as np

from kaspin._kernels import HAS_NUMBA, get_tables, gp_numpy

if HAS_NUMBA:
    from kaspin._kernels import gp_numba

SIGNATURES = [(2, 0), (3, 1), (4, 2), (3, 3), (4, 4)]


def time_path(fn, pairs):
    start = time.perf_counter()
    for a, b in pairs:
        fn(a, b)
    return (time.perf_counter() - start) / len(pairs) * 1e6


def main():
    parser = argparse.ArgumentParser(description="geometric product kernel timings")
    parser.add_argument("--pairs", type=int, default=300)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    header = f"{'signature':>9}  {'blades':>6}  {'numpy us/op':>11}"
    if HAS_NUMBA:
        header += f"  {'numba us/op':>11}  {'speedup':>7}  {'max|diff|':>9}"
    print(header)
    for p, q in SIGNATURES:
        tables = get_tables(p, q)
        n = 1 << (p + q)
        pairs = [(rng.standard_normal(n), rng.standard_normal(n)) for _ in range(args.pairs)]
        t_numpy = time_path(lambda a, b: gp_numpy(a, b, tables), pairs)
        row = f"({p},{q})".rjust(9) + f"  {n:>6}  {t_numpy:>11.2f}"
        if HAS_NUMBA:
            gp_numba(pairs[0][0], pairs[0][1], tables.sign, tables.xor)  # JIT warmup
            t_numba = time_path(lambda a, b: gp_numba(a, b, tables.sign, tables.xor), pairs)
            diff = max(
                float(np.max(np.abs(
                    gp_numba(a, b, tables.sign, tables.xor) - gp_numpy(a, b, tables)
                )))
                for a, b in pairs[:20]
            )
            row += f"  {t_numba:>11.2f}  {t_numpy / t_numba:>6.1f}x  {diff:>9.1e}"
        print(row)
    if not HAS_NUMBA:
        print("numba unavailable: compiled path skipped")


if __name__ == "__main__":
    main()
