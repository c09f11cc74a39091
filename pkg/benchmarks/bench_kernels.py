"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat 2000]
"""

import argparse
import timeit

import numpy as np

from purity_witness import kernels
from purity_witness.states import random_density, random_hermitian

DIMS = [(2, 2), (3, 3), (4, 4), (6, 6), (8, 8)]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=2000)
    args = parser.parse_args()
    try:
        from purity_witness import _ckernels  # noqa: F401
    except ImportError:
        print("compiled extension not built; only the numpy backend is available")
        return

    print(f"{'dims':>6} {'kernel':>18} {'python us':>10} {'cython us':>10} {'speedup':>8}")
    for ds, de in DIMS:
        rho = random_density(ds * de, seed=0).data
        h = random_hermitian(ds * de, seed=1).data
        cases = {
            "partial_trace": lambda b: kernels.partial_trace(rho, ds, de, "E", backend=b),
            "purity_rate_trace": lambda b: kernels.purity_rate_trace(rho, h, ds, de, backend=b),
        }
        for name, fn in cases.items():
            a, b = fn("python"), fn("cython")
            assert np.allclose(a, b, atol=1e-12), name
            t_py = min(timeit.repeat(lambda: fn("python"), number=args.repeat, repeat=3)) / args.repeat
            t_cy = min(timeit.repeat(lambda: fn("cython"), number=args.repeat, repeat=3)) / args.repeat
            print(f"{ds}x{de:<4} {name:>18} {t_py * 1e6:10.2f} {t_cy * 1e6:10.2f} {t_py / t_cy:8.1f}x")


if __name__ == "__main__":
    main()
