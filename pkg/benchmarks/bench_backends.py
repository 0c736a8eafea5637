#!/usr/bin/env python3
"""Benchmark the numba and numpy kernel backends against each other.

Times the two hot kernels (objective evaluation and fluctuation
quadrature) at a representative optimum and reports per-call time plus
speedup. JIT compilation happens during warmup and is excluded.
"""

import argparse
import time

import numpy as np

from eberhard._kernels import get_backend
from eberhard.fluctuation import average_rule

# a realistic operating point: the equal-efficiency optimum at eta = 0.9
ARGS = (0.741202, np.deg2rad(20.9153), np.deg2rad(43.6381), 0.9, 0.9, 0.0)


def time_calls(fn, args, calls: int, repeats: int) -> float:
    """Best-of-repeats per-call time in seconds."""
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        for _ in range(calls):
            fn(*args)
        best = min(best, (time.perf_counter() - start) / calls)
    return best


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--calls", type=int, default=2000,
                        help="objective calls per timing loop")
    parser.add_argument("--quad-calls", type=int, default=20,
                        help="quadrature calls per timing loop")
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing loops per kernel (best is reported)")
    parser.add_argument("--delta-deg", type=float, default=0.25,
                        help="fluctuation half-width for the quadrature kernel")
    parser.add_argument("--quad-order", type=int, default=8,
                        help="nodes per angle in the quadrature kernel")
    args = parser.parse_args(argv)

    nodes, weights = average_rule(np.deg2rad(args.delta_deg), args.quad_order)
    quad_args = ARGS + (nodes, weights)

    backends = {"numpy": get_backend("numpy")}
    try:
        backends["numba"] = get_backend("numba")
    except ImportError:
        print("numba backend unavailable; timing numpy only")

    results = {}
    for name, impl in backends.items():
        impl.j_per_n(*ARGS)  # warmup (JIT compile on the numba path)
        impl.quad_stats(*quad_args)
        results[name] = {
            "j_per_n": time_calls(impl.j_per_n, ARGS, args.calls, args.repeats),
            f"quad_stats[{len(nodes)}^4 nodes]": time_calls(
                impl.quad_stats, quad_args, args.quad_calls, args.repeats
            ),
        }

    kernels = list(results["numpy"])
    width = max(len(k) for k in kernels)
    header = f"{'kernel':<{width}}  {'numpy':>12}"
    if "numba" in results:
        header += f"  {'numba':>12}  {'speedup':>8}"
    print(header)
    for kernel in kernels:
        t_np = results["numpy"][kernel]
        line = f"{kernel:<{width}}  {t_np * 1e6:>10.1f}us"
        if "numba" in results:
            t_nb = results["numba"][kernel]
            line += f"  {t_nb * 1e6:>10.1f}us  {t_np / t_nb:>7.1f}x"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
