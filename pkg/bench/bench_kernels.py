"""Time the compiled and pure-Python batch kernels on the same workload.

    python3 bench/bench_kernels.py [--reps N] [--horizon H] [--workers W]

Both backends must return identical arrays; the script checks this before
reporting timings.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from cascadelab import kernel
from cascadelab.costs import UniformCost
from cascadelab.dynamics import SimConfig
from cascadelab.welfare import MyopicSubsidy


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=2000)
    ap.add_argument("--horizon", type=int, default=50)
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    if kernel.BACKEND != "compiled":
        raise SystemExit("compiled kernel not built; run `pip install -e . --no-build-isolation` first")
    cfg = SimConfig(cost_model=UniformCost(1.0), horizon=args.horizon, n_reps=args.reps,
                    subsidy_rule=MyopicSubsidy(), seed=7)

    py = kernel.simulate_batch(cfg, backend="python")
    c = kernel.simulate_batch(cfg, backend="compiled", workers=args.workers)
    for k in py:
        if not np.array_equal(py[k], c[k]):
            raise SystemExit(f"backends disagree on {k}")

    t_py = _time(lambda: kernel.simulate_batch(cfg, backend="python"), 1)
    t_c1 = _time(lambda: kernel.simulate_batch(cfg, backend="compiled", workers=1), args.repeat)
    t_cw = _time(lambda: kernel.simulate_batch(cfg, backend="compiled", workers=args.workers), args.repeat)
    periods = args.reps * args.horizon
    w = args.workers or kernel.worker_count()
    print(f"workload: {args.reps} paths x {args.horizon} periods, outputs identical")
    for label, t in (("python", t_py), ("compiled, 1 thread", t_c1), (f"compiled, {w} threads", t_cw)):
        print(f"{label:<22}{t:9.4f} s {periods / t:13.0f} periods/s  x{t_py / t:.0f}")


if __name__ == "__main__":
    main()
