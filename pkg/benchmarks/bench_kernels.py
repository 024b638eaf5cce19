#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallbacks.

Run:  python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import random
import time

import numpy as np

from tripoly._kernels import _purepy

try:
    from tripoly._kernels import _ext
except ImportError:
    _ext = None

P = 1000003


def timeit(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_orbit(impl, n):
    consts = np.array([11, 22, 33, 44], np.uint64)
    w0 = np.arange(5, dtype=np.uint64)
    dt, _ = timeit(impl.fast_orbit, P, consts, 55, 66, w0, n)
    return 5 * n / dt, "components/s"


def bench_stream_sum(impl, n):
    rng = np.random.default_rng(1)
    u = rng.integers(0, P, size=(n, 2)).astype(np.uint64)
    coeffs = np.array([12345, 678], np.uint64)
    dt, _ = timeit(impl.exp_sum_stream, u, coeffs, P)
    return n / dt, "terms/s"


def bench_hist(impl, n):
    rng = np.random.default_rng(2)
    u = rng.integers(0, P, size=(n, 2)).astype(np.uint64)
    coeffs = np.array([901, 2345], np.uint64)
    dt, _ = timeit(impl.residue_hist, u, coeffs, P)
    return n / dt, "terms/s"


def _packed_operands(rng, count, emax):
    keys = set()
    while len(keys) < count:
        keys.add(
            (rng.randint(0, emax) << 40)
            | (rng.randint(0, emax) << 20)
            | rng.randint(0, emax)
        )
    k = np.fromiter(keys, dtype=np.uint64, count=count)
    v = np.asarray([rng.randint(1, 100) for _ in range(count)], np.uint64)
    return k, v


def bench_mul_dense(impl, n):
    # exponents small enough that the pure path can use a dense accumulator
    rng = random.Random(3)
    k1, v1 = _packed_operands(rng, n, 60)
    k2, v2 = _packed_operands(rng, max(4, n // 40), 20)
    pairs = len(k1) * len(k2)
    dt, _ = timeit(impl.mul_packed, k1, v1, k2, v2, 101,
                   (40, 20, 0), (1 << 20) - 1)
    return pairs / dt, "term pairs/s"


def bench_mul_sparse(impl, n):
    # huge exponent box: the pure path must sort, the extension hashes
    rng = random.Random(4)
    k1, v1 = _packed_operands(rng, n, 5000)
    k2, v2 = _packed_operands(rng, max(4, n // 40), 5000)
    pairs = len(k1) * len(k2)
    dt, _ = timeit(impl.mul_packed, k1, v1, k2, v2, 101,
                   (40, 20, 0), (1 << 20) - 1)
    return pairs / dt, "term pairs/s"


def bench_cycle(impl, budget):
    consts = np.array([3, 7], np.uint64)
    w0 = np.array([1, 2, 3], np.uint64)
    dt, out = timeit(impl.fast_cycle, P, consts, 5, 11, w0, budget)
    steps = out[0] + 3 * out[1] if out[1] > 0 else budget
    return steps / dt, "steps/s"


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="smaller sizes")
    args = parser.parse_args()
    scale = 10 if args.quick else 1

    cases = [
        ("fast_orbit", bench_orbit, 10**6 // scale),
        ("exp_sum_stream", bench_stream_sum, 10**6 // scale),
        ("residue_hist", bench_hist, 10**6 // scale),
        ("mul dense box", bench_mul_dense, 20000 // scale),
        ("mul sparse box", bench_mul_sparse, 20000 // scale),
        ("fast_cycle", bench_cycle, 10**7 // scale),
    ]
    print(f"{'kernel':<16}{'pure':>14}{'ext':>14}{'speedup':>9}  unit")
    for name, fn, size in cases:
        pure_rate, unit = fn(_purepy, size)
        if _ext is not None:
            ext_rate, _ = fn(_ext, size)
            ratio = f"{ext_rate / pure_rate:8.1f}x"
            ext_txt = f"{ext_rate:14.3e}"
        else:
            ext_txt = f"{'(absent)':>14}"
            ratio = f"{'-':>9}"
        print(f"{name:<16}{pure_rate:14.3e}{ext_txt}{ratio}  {unit}")


if __name__ == "__main__":
    main()
