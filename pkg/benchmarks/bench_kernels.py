"""Benchmark the compiled simulation kernels against the pure-Python fallback.

The kernels dominate the Monte Carlo estimators (millions of slots per
replication), which is why they are shipped as a compiled extension.

Usage:  python3 benchmarks/bench_kernels.py [--horizon 1000000] [--users 2 8 32]
"""

import argparse
import time

import numpy as np

from aoisim._kernels import BACKEND, _pure
from aoisim.adversaries import yao_good_sequence

try:
    from aoisim._kernels import _core
except ImportError:
    _core = None


def time_call(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--horizon", type=int, default=1_000_000)
    ap.add_argument("--users", type=int, nargs="+", default=[2, 8, 32])
    args = ap.parse_args()

    backends = [("pure", _pure)] + ([("compiled", _core)] if _core else [])
    print(f"active backend: {BACKEND}; horizon T={args.horizon}")
    print(f"{'kernel':<14}{'N':>4}" + "".join(f"{name:>12}" for name, _ in backends) + f"{'speedup':>10}")

    rng = np.random.default_rng(0)
    for n in args.users:
        good = yao_good_sequence(n, args.horizon, rng)
        tie = np.arange(n, dtype=np.int64)
        for label, calls in (
            ("offline-stats", [(mod.yao_opt_stats, (good, n, 64 * n)) for _, mod in backends]),
            ("max-age-cost", [(mod.yao_cma_stats, (good, n, tie)) for _, mod in backends]),
        ):
            times = [time_call(fn, *a) for fn, a in calls]
            speedup = f"{times[0] / times[-1]:.1f}x" if len(times) > 1 else "n/a"
            print(f"{label:<14}{n:>4}" + "".join(f"{t * 1e3:>10.1f}ms" for t in times) + f"{speedup:>10}")

        # agreement sanity check while we are here
        if _core:
            assert _pure.yao_cma_stats(good, n, tie) == _core.yao_cma_stats(good, n, tie)
            ca, ha = _pure.yao_opt_stats(good, n, 64 * n)
            cb, hb = _core.yao_opt_stats(good, n, 64 * n)
            assert ca == cb and np.array_equal(ha, hb)


if __name__ == "__main__":
    main()
