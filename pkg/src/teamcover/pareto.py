"""Weighted-sum bi-objective sweep.

The two objectives are the coverage rate (covered calls over total calls)
and the base-reduction rate ((budget - open bases) / budget), both in
[0, 1] and both maximized. A uniform grid of weights collapses them to
``lam * coverage_rate + (1 - lam) * base_reduction_rate``; each weight is
solved as a single-objective problem in which opening a base carries a
score cost of ``(1 - lam) / budget``. Filtering the grid results down to
the non-dominated set yields the convex part of the Pareto front. Points
inside non-convex dents are unreachable by weighted sums; that is a
property of the method, not a bug.

Solves for different weights are independent and fan out over a fork
worker pool; results are merged in grid order, so parallel and serial
runs are identical.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import multiprocessing

from . import kernels
from .coverage import CoverMatrix, CoverageReport, evaluate_deployment
from .errors import ValidationError
from .instance import Deployment, Instance, total_demand
from .solver import SolveOptions, _Ctx, _resolve_mode, _run


@dataclass(frozen=True)
class ParetoPoint:
    lam: float
    f1_tx_cob: float
    f2_tx_red_bases: float
    scalar_score: float
    deployment: Deployment
    proof: str = "heuristic"


def scalarized_objective(report: CoverageReport, lam: float) -> float:
    """lam * coverage rate + (1 - lam) * base-reduction rate."""
    if not 0.0 <= lam <= 1.0:
        raise ValidationError(f"weight must lie in [0, 1], got {lam}")
    if report.total_demand <= 0:
        raise ValidationError("scalarized objective undefined for zero total demand")
    return lam * report.tx_cob + (1.0 - lam) * report.tx_red_bases


def _solve_one(instance: Instance, cover: CoverMatrix, options: SolveOptions,
               lam: float, total: int) -> tuple[Deployment, str]:
    cov_weight = lam / total
    base_cost = (1.0 - lam) / instance.max_bases if instance.max_bases > 0 else 0.0
    state, proof, _nodes, _wall = _run(
        instance, cover, options, cov_weight=cov_weight, base_open_cost=base_cost
    )
    return state.to_deployment(), proof


_POOL_CTX: tuple | None = None


def _pool_worker(item: tuple[int, float]) -> tuple[int, Deployment, str]:
    idx, lam = item
    instance, cover, options, total = _POOL_CTX
    deployment, proof = _solve_one(instance, cover, options, lam, total)
    return idx, deployment, proof


def sweep_lambda(instance: Instance, cover: CoverMatrix, grid_size: int = 101,
                 options: SolveOptions | None = None, jobs: int | None = None) -> list[ParetoPoint]:
    """Solve the scalarized problem on a uniform weight grid over [0, 1].

    Uses the exact solver when the searchable site count permits, otherwise
    greedy plus local search adapted to the weighted score. ``jobs=None``
    uses the available parallelism; pass 1 to force a serial sweep.
    """
    if grid_size < 2:
        raise ValidationError(f"grid_size must be >= 2, got {grid_size}")
    options = options or SolveOptions()
    total = total_demand(instance)
    if total <= 0:
        raise ValidationError("weighted sweep undefined for zero total demand")
    # pin the per-weight mode once so every weight is solved the same way
    mode = _resolve_mode(_Ctx(instance, cover, options), options)
    options = SolveOptions(
        mode=mode,
        exact_site_limit=options.exact_site_limit,
        fixed_bases=options.fixed_bases,
        fixed_placements=options.fixed_placements,
        time_limit_s=options.time_limit_s,
    )

    lams = [k / (grid_size - 1) for k in range(grid_size)]
    if jobs is None:
        jobs = os.cpu_count() or 1
    results: dict[int, tuple[Deployment, str]] = {}

    can_fork = jobs > 1 and "fork" in multiprocessing.get_all_start_methods()
    if can_fork:
        kernels.warmup()  # compile before forking so children inherit the kernels
        global _POOL_CTX
        _POOL_CTX = (instance, cover, options, total)
        try:
            with ProcessPoolExecutor(
                max_workers=jobs, mp_context=multiprocessing.get_context("fork")
            ) as pool:
                for idx, deployment, proof in pool.map(
                    _pool_worker, list(enumerate(lams)), chunksize=max(1, grid_size // (4 * jobs))
                ):
                    results[idx] = (deployment, proof)
        finally:
            _POOL_CTX = None
    else:
        for idx, lam in enumerate(lams):
            results[idx] = _solve_one(instance, cover, options, lam, total)

    points = []
    for idx, lam in enumerate(lams):
        deployment, proof = results[idx]
        report = evaluate_deployment(instance, cover, deployment)
        points.append(
            ParetoPoint(lam, report.tx_cob, report.tx_red_bases,
                        scalarized_objective(report, lam), deployment, proof)
        )
    return points


def _dominates(a: ParetoPoint, b: ParetoPoint) -> bool:
    return (
        a.f1_tx_cob >= b.f1_tx_cob
        and a.f2_tx_red_bases >= b.f2_tx_red_bases
        and (a.f1_tx_cob > b.f1_tx_cob or a.f2_tx_red_bases > b.f2_tx_red_bases)
    )


def pareto_filter(points: list[ParetoPoint]) -> list[ParetoPoint]:
    """Maximal non-dominated subset, deduplicated on equal objective pairs
    (lowest-weight representative kept), sorted by ascending coverage rate."""
    by_pair: dict[tuple[float, float], ParetoPoint] = {}
    for point in sorted(points, key=lambda p: p.lam):
        key = (point.f1_tx_cob, point.f2_tx_red_bases)
        by_pair.setdefault(key, point)
    candidates = list(by_pair.values())
    kept = [
        p for p in candidates
        if not any(_dominates(other, p) for other in candidates if other is not p)
    ]
    return sorted(kept, key=lambda p: (p.f1_tx_cob, p.f2_tx_red_bases))
