"""Time the coordinate kernels and one dual objective under both backends.

    python benchmarks/bench_kernels.py [--size N] [--repeat R]
"""

import argparse
import timeit

import numpy as np

from lqthr import _kernels
from lqthr.width_bound import make_objective


def bench(label, fn, repeat):
    fn()  # warm up (triggers JIT compilation on the numba backend)
    best = min(timeit.repeat(fn, number=1, repeat=repeat))
    print(f"  {label:<28s} {best * 1e3:9.3f} ms")
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=7)
    args = ap.parse_args()

    h = np.abs(np.random.default_rng(0).standard_normal(args.size)) * 3.0
    small = h[:16].copy()
    nu, gamma, q, x = 1.3, 0.35, 0.3, 1.2
    results = {}
    backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])
    for name in backends:
        _kernels.set_backend(name)
        print(f"backend={name}  (n={args.size})")
        results[name] = [
            bench("plus_values", lambda: _kernels.plus_values(h, nu, gamma, q), args.repeat),
            bench("minus_values", lambda: _kernels.minus_values(h, nu, gamma, q), args.repeat),
            bench("shifted_values", lambda: _kernels.shifted_values(h, nu, gamma, q, x), args.repeat),
            bench("plus_values x1000 (n=16)",
                  lambda: [_kernels.plus_values(small, nu, gamma, q) for _ in range(1000)], args.repeat),
            bench("sectional objective (1024)", lambda: make_objective("sectional", 0.1, q)(nu, gamma), args.repeat),
            bench("weak objective (1024)", lambda: make_objective("weak", 0.1, q, x_mag=x)(nu, gamma), args.repeat),
        ]
    if len(results) == 2:
        ratios = np.array(results["numpy"]) / np.array(results["numba"])
        print("speedup numba/numpy: " + ", ".join(f"{r:.2f}x" for r in ratios))


if __name__ == "__main__":
    main()
