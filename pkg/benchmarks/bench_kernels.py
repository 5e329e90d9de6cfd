"""Compare the numba and numpy variants of the hot kernels.

Both variants are called directly (the env flag only picks the default), so
one run times everything.  Compilation time is excluded by a warm-up call.

    python benchmarks/bench_kernels.py [--sizes 5,10,20,30] [--repeat 5]
"""
import argparse
import time

import numpy as np

from gsp import kernels
from gsp._accel import HAVE_NUMBA, USE_NUMBA
from gsp.matrixkit import sl_table


def _best(fn, args, repeat):
    fn(*args)  # warm-up / compile
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def _problem(n, rng):
    T = np.triu(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    R = np.triu(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    W = 1e-6 * np.abs(rng.standard_normal((n, n)))
    K = 1e-6 * np.abs(rng.standard_normal((n, n)))
    return T, R, W, K


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="5,10,20,30")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not HAVE_NUMBA:
        print("numba is not installed; only the numpy variants exist")
    print(f"default backend: {'numba' if USE_NUMBA else 'numpy'}")
    rng = np.random.default_rng(0)
    kinds = [
        ("assemble_L", kernels._assemble_L_loops, kernels._assemble_L_numpy, lambda T, R, W, K, tab: (T, R, tab)),
        ("assemble_E", kernels._assemble_E_loops, kernels._assemble_E_numpy, lambda T, R, W, K, tab: (T, R, tab)),
        ("second_order_xy", kernels._second_order_xy_loops, kernels._second_order_xy_numpy,
         lambda T, R, W, K, tab: (np.abs(T), np.abs(R), np.abs(T), np.abs(R), W, K)),
        ("diag_second_order", kernels._diag_second_order_loops, kernels._diag_second_order_numpy,
         lambda T, R, W, K, tab: (np.abs(T), np.abs(R), np.abs(T), np.abs(R), W, K)),
        ("propagate_columns", kernels._propagate_columns_loops, kernels._propagate_columns_numpy,
         lambda T, R, W, K, tab: (W, np.diag(np.diag(K)))),
    ]
    print(f"{'kernel':<18} {'n':>4} {'numba [ms]':>11} {'numpy [ms]':>11} {'speedup':>8} {'max diff':>10}")
    for n in (int(s) for s in args.sizes.split(",")):
        T, R, W, K = _problem(n, rng)
        tab = sl_table(n)
        for name, fast, ref, mk in kinds:
            a = mk(T, R, W, K, tab)
            out_f, out_r = fast(*a), ref(*a)
            if isinstance(out_f, tuple):
                diff = max(float(np.max(np.abs(np.asarray(x) - np.asarray(y)), initial=0.0)) for x, y in zip(out_f, out_r))
            else:
                diff = float(np.max(np.abs(out_f - out_r), initial=0.0))
            tf = _best(fast, a, args.repeat) if HAVE_NUMBA else float("nan")
            tr = _best(ref, a, args.repeat)
            print(f"{name:<18} {n:>4} {1e3 * tf:>11.3f} {1e3 * tr:>11.3f} {tr / tf:>8.2f} {diff:>10.2e}")


if __name__ == "__main__":
    main()
