"""Benchmark the GF(2^m) kernels: numba njit vs pure numpy.

Usage: python benchmarks/bench_kernels.py [--repeats N]

Shapes mirror real workloads: encoding multiplies a (nu+s, nu) generator
transpose against (nu, L*d) stacked message blocks; aggregation XOR-folds
group columns.
"""

import argparse
import time

import numpy as np

from layeragg import _kernels
from layeragg.gf import GF


def timeit(fn, repeats):
    fn()  # warm up (and trigger JIT compilation)
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    numba_impls = None
    if _kernels._numba is not None:
        numba_impls = (_kernels._gf_matmul_impl, _kernels._xor_rows_impl)
        if _kernels.BACKEND != "numba":  # forced numpy: jit on the side
            numba_impls = (
                _kernels._numba.njit(cache=True)(_kernels._gf_matmul_loops),
                _kernels._numba.njit(cache=True)(_kernels._xor_rows_loops),
            )
    fld = GF(8)
    rng = np.random.default_rng(0)

    print(f"selected backend: {_kernels.BACKEND}")
    print(f"{'kernel':<28} {'shape':<24} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for nu, s, length in [(1, 1, 1 << 14), (2, 2, 1 << 16), (4, 2, 1 << 18), (8, 2, 1 << 20)]:
        a = rng.integers(0, 256, size=(nu + s, nu), dtype=np.uint8)
        b = rng.integers(0, 256, size=(nu, length), dtype=np.uint8)

        def run_numpy():
            return _kernels._gf_matmul_numpy(
                a, b, fld.log, fld.exp, np.zeros((nu + s, length), dtype=np.uint8)
            )

        t_np = timeit(run_numpy, args.repeats)
        row = f"{'gf_matmul':<28} {f'({nu + s},{nu})x({nu},{length})':<24} {t_np * 1e3:>8.2f}ms"
        if numba_impls:
            jit_matmul = numba_impls[0]

            def run_numba():
                return jit_matmul(
                    a, b, fld.log, fld.exp, np.zeros((nu + s, length), dtype=np.uint8)
                )

            t_nb = timeit(run_numba, args.repeats)
            row += f" {t_nb * 1e3:>8.2f}ms {t_np / t_nb:>7.1f}x"
            assert np.array_equal(run_numpy(), run_numba())
        print(row)

    for rows, length in [(8, 1 << 16), (32, 1 << 18)]:
        x = rng.integers(0, 256, size=(rows, length), dtype=np.uint8)

        def run_numpy_xor():
            return _kernels._xor_rows_numpy(x, np.zeros(length, dtype=np.uint8))

        t_np = timeit(run_numpy_xor, args.repeats)
        row = f"{'xor_reduce':<28} {f'({rows},{length})':<24} {t_np * 1e3:>8.2f}ms"
        if numba_impls:
            jit_xor = numba_impls[1]

            def run_numba_xor():
                return jit_xor(x, np.zeros(length, dtype=np.uint8))

            t_nb = timeit(run_numba_xor, args.repeats)
            row += f" {t_nb * 1e3:>8.2f}ms {t_np / t_nb:>7.1f}x"
        print(row)


if __name__ == "__main__":
    main()
