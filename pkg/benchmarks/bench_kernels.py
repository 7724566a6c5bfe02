"""Compare the compiled and NumPy bit-basis Heisenberg matvec.

    python3 benchmarks/bench_kernels.py [--sizes 12 14 16 18 20] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from pwfrg import kernels
from pwfrg.model import ModelSpec, couplings


def bench(n_sites, backend, repeat):
    c = couplings(ModelSpec(1.0, 0.1), n_sites)
    x = np.random.default_rng(0).standard_normal(2**n_sites)
    out = np.empty_like(x)
    timer = timeit.Timer(
        lambda: kernels.heisenberg_apply(x, c, out, backend=backend))
    number, _ = timer.autorange()
    return min(timer.repeat(repeat, number)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+",
                    default=[12, 14, 16, 18, 20])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = ["python"]
    if kernels.BACKEND == "cython":
        backends.append("cython")
    else:
        print("compiled extension not built; timing the NumPy path only")
    print(f"{'sites':>5} " + " ".join(f"{b + ' [ms]':>14}" for b in backends)
          + (f" {'speedup':>8}" if len(backends) == 2 else ""))
    for n in args.sizes:
        t = [bench(n, b, args.repeat) for b in backends]
        row = f"{n:>5} " + " ".join(f"{1e3 * v:>14.3f}" for v in t)
        if len(t) == 2:
            row += f" {t[0] / t[1]:>8.1f}"
        print(row)


if __name__ == "__main__":
    main()
