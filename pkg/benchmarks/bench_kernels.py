"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--sizes 128,256,512] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from potkernels import _kernels_py
from potkernels.geometry import build_grid
from potkernels.reference import fixture

try:
    from potkernels import _kernels
except ImportError:
    _kernels = None


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", default="128,256,512")
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--targets", type=int, default=2000)
    args = p.parse_args()

    backends = [("numpy", _kernels_py)] + ([("cython", _kernels)] if _kernels else [])
    if _kernels is None:
        print("compiled extension not built; timing the numpy fallback only")
    rng = np.random.default_rng(0)
    dom = fixture("3conn").domain
    print(f"{'kernel':<12}{'nodes':>7}" + "".join(f"{n:>12}" for n, _ in backends) + f"{'speedup':>10}")
    for N in (int(s) for s in args.sizes.split(",")):
        g = build_grid(dom, N)
        x = 0.9 * np.sqrt(rng.uniform(size=args.targets)) * np.exp(2j * np.pi * rng.uniform(size=args.targets))
        F = np.exp(1j * g.t)[None, :] * np.ones((3, 1))
        zw = g.T * g.w
        jobs = {
            "ks_matrix": lambda m: m.ks_matrix(g.z, g.T, g.w),
            "cauchy_sum": lambda m: m.cauchy_sum(F, g.z, zw, x, 0),
        }
        for name, job in jobs.items():
            t = [best(lambda m=m: job(m), args.repeat) for _, m in backends]
            ratio = f"{t[0] / t[-1]:>9.1f}x" if len(t) > 1 else ""
            print(f"{name:<12}{g.size:>7}" + "".join(f"{v * 1e3:>10.2f}ms" for v in t) + ratio)


if __name__ == "__main__":
    main()
