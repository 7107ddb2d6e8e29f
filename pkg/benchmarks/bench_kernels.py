"""Compare the compiled kernels with the NumPy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]

Part 1 times the raw kernels on batches of points. Part 2 times a full
solve of a cubic problem in a subprocess per backend, so that backend
selection happens at import as it does in normal use.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from polyvi import _kernels_py
from polyvi.polymap import MonomialBasis

try:
    from polyvi import _kernels as compiled
except ImportError:
    compiled = None

SOLVE_SNIPPET = """
import time, numpy as np
from polyvi import PolyhedralSet, PolynomialMap, VIProblem, solve, BACKEND
P = PolynomialMap.from_terms(2, 3, {(0, (3, 0)): 1.0, (1, (0, 3)): 1.0, (0, (1, 1)): 0.5})
K = PolyhedralSet.orthant(2)
solve(VIProblem(K, P, (1.0, 1.0)))  # warm-up
t0 = time.perf_counter()
for p in [(-8.0, -27.0), (-1.0, 2.0), (3.0, -5.0), (-2.0, -2.0)]:
    solve(VIProblem(K, P, p))
print(BACKEND, time.perf_counter() - t0)
"""


def kernel_table(repeat):
    rng = np.random.default_rng(0)
    rows = []
    for n, d, batch in [(2, 2, 64), (2, 3, 1024), (3, 3, 1024), (4, 4, 4096)]:
        exps = MonomialBasis(n, d).exponents
        A = rng.normal(size=(n, len(exps)))
        X = rng.normal(size=(batch, n))
        for name in ("poly_eval", "poly_jac"):
            t_py = min(timeit.repeat(lambda: getattr(_kernels_py, name)(exps, A, X), number=20, repeat=repeat)) / 20
            t_c = np.nan
            if compiled is not None:
                t_c = min(timeit.repeat(lambda: getattr(compiled, name)(exps, A, X), number=20, repeat=repeat)) / 20
            rows.append((name, n, d, batch, t_py, t_c))
    return rows


def solve_timing(pure):
    env = {**os.environ}
    if pure:
        env["POLYVI_PURE_PYTHON"] = "1"
    else:
        env.pop("POLYVI_PURE_PYTHON", None)
    out = subprocess.run([sys.executable, "-c", SOLVE_SNIPPET], env=env, capture_output=True,
                         text=True, check=True).stdout.split()
    return out[0], float(out[1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if compiled is None:
        print("compiled extension not built; only the NumPy path is timed")
    print(f"{'kernel':<10} {'n':>2} {'d':>2} {'batch':>6} {'numpy [us]':>12} {'cython [us]':>12} {'speedup':>8}")
    for name, n, d, batch, t_py, t_c in kernel_table(args.repeat):
        print(f"{name:<10} {n:>2} {d:>2} {batch:>6} {t_py * 1e6:>12.1f} {t_c * 1e6:>12.1f} {t_py / t_c:>8.2f}")
    print()
    for pure in (False, True):
        backend, t = solve_timing(pure)
        print(f"solve x4 with backend={backend:<7} {t:.3f} s")


if __name__ == "__main__":
    main()
