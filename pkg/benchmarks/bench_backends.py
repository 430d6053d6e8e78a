#!/usr/bin/env python3
"""Time the numba kernels against the pure-numpy fallback.

Micro-benchmarks the three hot kernels on city-scale data (1,527 sites x
427 demands) and then times a full greedy and greedy+local-search solve
under each backend. Run from the repository root:

    python benchmarks/bench_backends.py
    python benchmarks/bench_backends.py --small   # quick sanity pass

The active backend of the installed package does not matter here: both
implementations are imported directly.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from teamcover import kernels  # noqa: E402
from teamcover.coverage import build_cover_matrix  # noqa: E402
from teamcover.solver import SolveOptions, _Ctx, _State, _greedy_b1, _local_search  # noqa: E402
from teamcover.synthetic import benchmark_instance  # noqa: E402


def timeit(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_kernels(backend, cover_words, covered, weights, counts, rows, repeat) -> dict[str, float]:
    return {
        "gains": timeit(lambda: backend.gains(cover_words, covered, weights), repeat),
        "union_rows": timeit(lambda: backend.union_rows(cover_words, rows), repeat),
        "b_gains": timeit(lambda: backend.b_gains(cover_words, counts, weights, 2), repeat),
    }


def bench_solves(backend_name: str, instance, cover, repeat: int) -> dict[str, float]:
    saved = {}
    names = ("mask_value", "gains", "union_rows", "cover_counts",
             "counts_value", "b_gains", "update_counts")
    backend = kernels.NUMPY_BACKEND if backend_name == "numpy" else kernels.NUMBA_BACKEND
    for name in names:
        saved[name] = getattr(kernels, name)
        setattr(kernels, name, getattr(backend, name))
    try:
        def greedy():
            ctx = _Ctx(instance, cover, SolveOptions())
            state = _State(ctx)
            _greedy_b1(ctx, state, 1.0, 0.0)
            return state

        def greedy_ls():
            ctx = _Ctx(instance, cover, SolveOptions())
            state = _State(ctx)
            _greedy_b1(ctx, state, 1.0, 0.0)
            _local_search(ctx, state, 1.0, 0.0)
            return state

        return {
            "greedy": timeit(greedy, repeat),
            "greedy+ls": timeit(greedy_ls, max(1, repeat // 2)),
        }
    finally:
        for name, fn in saved.items():
            setattr(kernels, name, fn)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--small", action="store_true", help="64 demands x 200 sites")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    if args.small:
        instance = benchmark_instance(seed=args.seed, n_demands=64, n_sites=200,
                                      days=10, target_calls=2000)
    else:
        instance = benchmark_instance(seed=args.seed)
    cover = build_cover_matrix(instance)
    print(f"instance: {instance.n_demands} demands x {instance.n_sites} sites, "
          f"{sum(t.fleet_size for t in instance.team_types)} teams, "
          f"budget {instance.max_bases}")

    rng = np.random.default_rng(args.seed)
    cover_words = np.ascontiguousarray(cover.words[0])
    weights = instance.demand_matrix[0].copy()
    covered = kernels.union_rows(cover_words, np.array([0, 1, 2], dtype=np.int64))
    counts = kernels.cover_counts(cover_words, np.array([0, 1, 2], dtype=np.int64),
                                  instance.n_demands)
    rows = rng.choice(instance.n_sites, 20, replace=False).astype(np.int64)

    backends = [("numpy", kernels.NUMPY_BACKEND)]
    if kernels.NUMBA_BACKEND is not None:
        kernels.warmup()
        backends.append(("numba", kernels.NUMBA_BACKEND))
    else:
        print("numba not importable; benchmarking the numpy fallback only")

    print(f"\nkernel micro-benchmarks (best of {args.repeat}, seconds):")
    results = {}
    for name, backend in backends:
        results[name] = bench_kernels(backend, cover_words, covered, weights,
                                      counts, rows, args.repeat)
    header = f"{'kernel':<12}" + "".join(f"{name:>12}" for name, _ in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for kernel_name in ("gains", "union_rows", "b_gains"):
        row = f"{kernel_name:<12}"
        for name, _ in backends:
            row += f"{results[name][kernel_name]:>12.6f}"
        if len(backends) == 2:
            ratio = results["numpy"][kernel_name] / max(results["numba"][kernel_name], 1e-12)
            row += f"{ratio:>9.1f}x"
        print(row)

    print(f"\nfull solves (best of {args.repeat}, seconds):")
    solve_results = {name: bench_solves(name, instance, cover, args.repeat)
                     for name, _ in backends}
    header = f"{'solve':<12}" + "".join(f"{name:>12}" for name, _ in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for solve_name in ("greedy", "greedy+ls"):
        row = f"{solve_name:<12}"
        for name, _ in backends:
            row += f"{solve_results[name][solve_name]:>12.4f}"
        if len(backends) == 2:
            ratio = solve_results["numpy"][solve_name] / max(solve_results["numba"][solve_name], 1e-12)
            row += f"{ratio:>9.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    sys.exit(main())
