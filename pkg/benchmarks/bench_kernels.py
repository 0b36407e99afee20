"""Compare the compiled and the NumPy assembly of the first-order system.

    python benchmarks/bench_kernels.py [--repeat 3]

Prints one row per structure: size of the system, best-of-``repeat`` wall
time for each backend, speed-up, and the max difference between the two
matrices.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from symdefect import kernels
from symdefect.constructions import etf_fourier_unitary, hoggar_lines, mub_vectors, sic_vectors
from symdefect.core import unitary_from_vectors
from symdefect.defect import _index_maps, support_and_counts

CASES = {
    "sic d=4": lambda: unitary_from_vectors(sic_vectors(4)),
    "mub d=5": lambda: unitary_from_vectors(mub_vectors(5)),
    "etf k=6": lambda: etf_fourier_unitary(6),
    "mub d=8": lambda: unitary_from_vectors(mub_vectors(8)),
    "hoggar": lambda: unitary_from_vectors(hoggar_lines()),
}


def _best(fn, repeat: int) -> tuple[float, np.ndarray]:
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, np.asarray(out)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    print(f"compiled backend available: {kernels.BACKEND == 'cython'}")
    print(f"{'structure':<10} {'rows x cols':>14} {'numpy [s]':>10} {'compiled [s]':>12} {'speed-up':>9} {'max diff':>9}")
    for name, make in CASES.items():
        U = make()
        N = U.N
        j, k = (np.ascontiguousarray(a, dtype=np.int64) for a in np.triu_indices(N, 1))
        cols = support_and_counts(U, 0).columns
        col, sgn = _index_maps(N, cols)
        u = np.ascontiguousarray(U.entries, dtype=np.complex128)
        args_ = (u, j, k, col, sgn, len(cols))
        tp, a = _best(lambda: kernels.python_assemble_system(*args_), args.repeat)
        if kernels.BACKEND == "cython":
            tc, b = _best(lambda: kernels.assemble_system(*args_), args.repeat)
            diff = float(np.abs(a - b).max())
            print(f"{name:<10} {f'{a.shape[0]}x{a.shape[1]}':>14} {tp:10.4f} {tc:12.4f} {tp / tc:9.1f} {diff:9.1e}")
        else:
            print(f"{name:<10} {f'{a.shape[0]}x{a.shape[1]}':>14} {tp:10.4f} {'-':>12} {'-':>9} {'-':>9}")


if __name__ == "__main__":
    main()
