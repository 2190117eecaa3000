"""Time the compiled core against the NumPy fallback.

Runs hyperparameter training (50 Adam steps) at several training-set
sizes and a posterior-kernel scan over a 4-d grid, for each available
backend, and prints median wall times and the speedup.

    python3 benchmarks/bench_backends.py [--repeats 7] [--scan-points 200000]
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from boostbo import _backend
from boostbo.gp import ADAM_BETAS, ADAM_EPS, LEARNING_RATE, MAX_TRAIN_ITERS, hyperparameter_bounds


def _median_time(fn, repeats: int) -> float:
    fn()  # warm-up
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def bench_train(mod, n: int, dim: int, family: int, repeats: int) -> float:
    rng = np.random.default_rng(n)
    x = rng.uniform(size=(n, dim))
    y = np.sin(3 * x).sum(axis=1)
    y = (y - y.mean()) / y.std(ddof=1)
    b = hyperparameter_bounds(dim)
    return _median_time(
        lambda: mod.train(x, y, family, 2.0, b, np.zeros(3), LEARNING_RATE, MAX_TRAIN_ITERS,
                          ADAM_BETAS[0], ADAM_BETAS[1], ADAM_EPS),
        repeats,
    )


def bench_scan(mod, m: int, n: int, dim: int, family: int, repeats: int) -> float:
    rng = np.random.default_rng(1)
    xs = rng.uniform(size=(m, dim))
    x = rng.uniform(size=(n, dim))
    return _median_time(lambda: mod.cross_kernel(xs, x, family, 0.5, 1.3, 2.0), repeats)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=7)
    ap.add_argument("--scan-points", type=int, default=200_000)
    ap.add_argument("--dim", type=int, default=4)
    args = ap.parse_args(argv)

    backends = _backend.available()
    if "compiled" not in backends:
        print("compiled extension not built; timing the python fallback only")
    scan_mods = {"python": backends["python"]}
    if "compiled" in backends:
        scan_mods["compiled"] = _backend.scan_impl

    names = sorted(backends)
    print(f"{'benchmark':<34}" + "".join(f"{n:>12}" for n in names) + f"{'speedup':>10}")
    for family, label in ((0, "Matern32"), (3, "RQ")):
        for n in (10, 30, 50):
            t = {k: bench_train(backends[k], n, args.dim, family, args.repeats) for k in names}
            _row(f"train {label} n={n}", t)
        t = {k: bench_scan(scan_mods[k], args.scan_points, 50, args.dim, family, args.repeats)
             for k in names}
        _row(f"scan {label} {args.scan_points}x50", t)


def _row(label: str, t: dict[str, float]) -> None:
    cells = "".join(f"{t[k] * 1e3:>10.3f}ms" for k in sorted(t))
    speed = f"{t['python'] / t['compiled']:>9.1f}x" if "compiled" in t else ""
    print(f"{label:<34}{cells}{speed}")


if __name__ == "__main__":
    main()
