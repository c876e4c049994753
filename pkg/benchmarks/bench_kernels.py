#!/usr/bin/env python3
"""Compare the numba and numpy paths of the hot kernels.

Usage::

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --levels 18 20 22 --repeat 5
    python3 benchmarks/bench_kernels.py --output bench.json

Both paths are imported from the same module, so the comparison does not
depend on ``SADIC_DISABLE_NUMBA``.  Each timing is the best of ``--repeat``
runs after one warm-up call, and results are checked for equality.
"""
import argparse
import json
import sys
import time

import numpy as np

from sadic import _kernels as K
from sadic.io import load_fixture
from sadic.words import iterate_array


def best_of(fn, repeat):
    fn()  # warm-up, includes JIT compilation
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return a.shape == b.shape and np.allclose(a, b, rtol=0, atol=1e-12)
    return abs(a - b) <= 1e-12 * max(1.0, abs(a))


def cases(levels):
    tm = load_fixture("thue_morse")
    flat, starts, lengths = tm._flat, tm._starts, tm.lengths
    for n in levels:
        text = iterate_array(tm, [0], n - 1)
        yield f"expand TM level {n}", "expand", (text, starts, lengths, flat)
        big = iterate_array(tm, [0], n)
        pattern = K.as_letters([1, 0, 0, 1, 0, 1])
        yield f"count baabab in 2^{n}", "count_pattern", (big, pattern)
        yield f"factor histogram L=4 in 2^{n}", "factor_histogram", (big, 4, 2)
    rng = np.random.default_rng(0)
    for size in (6, 30, 120):
        B = rng.random((size, size)) + 0.1
        yield f"power iteration {size}x{size}", "power_iteration", (B, 1e-12, 100_000)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    p.add_argument("--levels", type=int, nargs="+", default=[16, 20, 22])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--output", help="write results as JSON")
    args = p.parse_args(argv)

    if not K.NUMBA_AVAILABLE:
        print("numba is not installed; nothing to compare", file=sys.stderr)
        return 1
    rows = []
    print(f"{'case':36s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speedup':>8s}  equal")
    for label, name, fargs in cases(args.levels):
        t_np, r_np = best_of(lambda: getattr(K, name + "_numpy")(*fargs), args.repeat)
        t_nb, r_nb = best_of(lambda: getattr(K, name + "_numba")(*fargs), args.repeat)
        eq = same(r_np[:2] if name == "power_iteration" else r_np,
                  r_nb[:2] if name == "power_iteration" else r_nb)
        rows.append({"case": label, "numpy_s": t_np, "numba_s": t_nb,
                     "speedup": t_np / t_nb if t_nb > 0 else float("inf"), "equal": bool(eq)})
        print(f"{label:36s} {1e3 * t_np:11.3f} {1e3 * t_nb:11.3f} {rows[-1]['speedup']:8.2f}  {eq}")
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=2)
    return 0 if all(r["equal"] for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
