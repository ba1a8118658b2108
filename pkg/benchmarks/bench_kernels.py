"""Benchmark the hot tridiagonal eigensolver: numba kernels vs numpy fallback.

Run:  python benchmarks/bench_kernels.py

The same physical problems (circle-operator matrices across potential
strengths) are solved by both backends; the table reports per-call times
and the speedup.  Select the backend used by the library itself with
SUBSPEC_BACKEND=numpy|numba.
"""

from __future__ import annotations

import time

from subspec import _kernels_numpy
from subspec.mathieu import ParityClass, assemble_operator

try:
    from subspec import _kernels_numba
except ImportError:
    _kernels_numba = None


def bench_one(kernels, diag, off, nev, repeats):
    vals = kernels.eigvals_ascending(diag, off, nev)
    t0 = time.perf_counter()
    for _ in range(repeats):
        vals = kernels.eigvals_ascending(diag, off, nev)
    t_vals = (time.perf_counter() - t0) / repeats
    t0 = time.perf_counter()
    for _ in range(repeats):
        kernels.eigvec_inverse_iteration(diag, off, float(vals[0]))
    t_vec = (time.perf_counter() - t0) / repeats
    return t_vals, t_vec


def main():
    pc = ParityClass(0, 0)
    cases = [(5.0, 64), (100.0, 128), (1e4, 256), (1e6, 2088)]
    print(f"{'q':>10} {'n':>6} {'numpy eig':>12} {'numba eig':>12} {'speedup':>8}"
          f" {'numpy vec':>12} {'numba vec':>12}")
    for q, n in cases:
        diag, off = assemble_operator(q, pc, n)
        repeats = max(1, int(20000 / n))
        t_np, v_np = bench_one(_kernels_numpy, diag, off, 4, repeats)
        if _kernels_numba is not None:
            t_nb, v_nb = bench_one(_kernels_numba, diag, off, 4, repeats)
            print(f"{q:10.0f} {n:6d} {t_np*1e3:10.2f}ms {t_nb*1e3:10.2f}ms "
                  f"{t_np/t_nb:7.1f}x {v_np*1e3:10.3f}ms {v_nb*1e3:10.3f}ms")
        else:
            print(f"{q:10.0f} {n:6d} {t_np*1e3:10.2f}ms {'n/a':>12} {'n/a':>8}"
                  f" {v_np*1e3:10.3f}ms {'n/a':>12}")


if __name__ == "__main__":
    main()
