"""Throughput comparison of the kernel backends.

Times one full per-trial workload (covariance pair plus all five detector
statistics) on a fixed synthetic block for every available backend.

Usage: python3 benchmarks/bench_kernels.py [--m 4] [--k 100] [--repeats 2000]
"""

import argparse
import time

import numpy as np

from nccsense._kernels import available_backends, load_backend


def trial_workload(backend, y):
    r, c = backend.sample_covariances(y)
    return (
        backend.ncc_statistic(r, c)
        + backend.cav_statistic(r)
        + backend.hdm_statistic(r)
        + backend.lmpit_statistic(r)
        + backend.nchdm_statistic(r, c)
    )


def bench(backend, y, repeats):
    trial_workload(backend, y)  # warm up
    started = time.perf_counter()
    acc = 0.0
    for _ in range(repeats):
        acc += trial_workload(backend, y)
    elapsed = time.perf_counter() - started
    return elapsed / repeats, acc


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--m", type=int, default=4, help="antenna count")
    parser.add_argument("--k", type=int, default=100, help="snapshots per antenna")
    parser.add_argument("--repeats", type=int, default=2000)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    y = np.ascontiguousarray(
        rng.standard_normal((args.m, args.k)) + 1j * rng.standard_normal((args.m, args.k))
    )

    print(f"M={args.m} K={args.k} repeats={args.repeats}")
    results = {}
    for name in available_backends():
        per_trial, acc = bench(load_backend(name), y, args.repeats)
        results[name] = per_trial
        print(f"{name:>9}: {per_trial * 1e6:9.2f} us/trial  (checksum {acc:.6g})")
    if "compiled" in results and "python" in results:
        print(f"  speedup: {results['python'] / results['compiled']:.2f}x")


if __name__ == "__main__":
    main()
