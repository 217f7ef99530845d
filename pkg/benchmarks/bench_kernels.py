"""Time the Jacobi eigensolver on both backends.

Usage: python benchmarks/bench_kernels.py [N ...]
"""

import sys
import time

import numpy as np

from freelab import kernels
from freelab.rmt import RngStream, hermitian_eigen, sample_gue


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(sizes):
    backends = ["numpy"] + (["numba"] if kernels.numba is not None else [])
    if "numba" in backends:
        # compile outside the timed region
        hermitian_eigen(sample_gue(4, 1.0, RngStream(0)), backend="numba")
    print(f"{'N':>6} " + " ".join(f"{b:>12}" for b in backends) + "   speedup   max|dlambda|")
    for N in sizes:
        a = sample_gue(N, 1.0, RngStream(1, 0, (N,)))
        repeats = 3 if N <= 128 else 1
        row = {}
        vals = {}
        for b in backends:
            row[b] = best_of(lambda b=b: vals.__setitem__(b, hermitian_eigen(a, backend=b).values), repeats)
        line = f"{N:>6} " + " ".join(f"{row[b]:>11.4f}s" for b in backends)
        if len(backends) == 2:
            diff = float(np.max(np.abs(vals["numpy"] - vals["numba"])))
            line += f"   {row['numpy'] / row['numba']:>7.2f}x   {diff:.2e}"
        print(line)


if __name__ == "__main__":
    main([int(x) for x in sys.argv[1:]] or [16, 32, 64, 128, 256])
