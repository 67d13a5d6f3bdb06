"""Benchmark the compiled cyclic-Jacobi kernel against the numpy fallback.

Run as:  python benchmarks/bench_jacobi.py [--sizes 16 32 64 128 256]

The eigensolver is the hot kernel of the whole package: every norm
computation (singular values, matrix powers, least squares) funnels
through it.
"""

import argparse
import time

import numpy as np

from groupoidal.numkit import _jacobi_py

try:
    from groupoidal.numkit import _jacobi
except ImportError:
    _jacobi = None


def rand_hermitian(rng, n):
    b = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return np.ascontiguousarray(b + b.conj().T)


def time_kernel(kernel, a, repeats):
    best = np.inf
    out = None
    for _ in range(repeats):
        work = a.copy()
        t0 = time.perf_counter()
        out = kernel.cyclic_jacobi(work)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[16, 32, 64, 128, 256])
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    if _jacobi is None:
        print("compiled kernel not built; benchmarking the fallback only")
    rng = np.random.default_rng(0)
    header = "%6s %12s %12s %9s %12s" % (
        "n", "cython (s)", "python (s)", "speedup", "max |dλ|"
    )
    print(header)
    print("-" * len(header))
    for n in args.sizes:
        a = rand_hermitian(rng, n)
        t_py, (w_py, _, s_py) = time_kernel(_jacobi_py, a, args.repeats)
        if _jacobi is not None:
            t_cy, (w_cy, _, s_cy) = time_kernel(_jacobi, a, args.repeats)
            dev = np.abs(np.sort(w_cy) - np.sort(w_py)).max()
            print(
                "%6d %12.5f %12.5f %8.1fx %12.3e"
                % (n, t_cy, t_py, t_py / t_cy, dev)
            )
        else:
            print("%6d %12s %12.5f %9s %12s" % (n, "-", t_py, "-", "-"))


if __name__ == "__main__":
    main()
