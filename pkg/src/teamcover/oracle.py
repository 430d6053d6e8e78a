"""Exhaustive reference solver.

Used to verify the real solvers, so it deliberately shares nothing with
them: coverage is recomputed with plain Python loops straight from the
travel-time matrix, never from the packed bit rows. Guarded to tiny
inputs.

Only placements are enumerated; bases are opened exactly at teamed sites.
Opening an extra empty base never increases covered demand and never
increases the base-reduction rate, so every optimum is attained on that
subspace.
"""

from __future__ import annotations

import itertools
import time
from typing import Mapping

from .coverage import CoverageReport, base_reduction_rate
from .errors import GuardError
from .instance import Deployment, Instance, total_demand

ORACLE_MAX_SITES = 8
ORACLE_MAX_TEAMS = 6


def _coverage_counts(instance: Instance, placed: list[tuple[int, ...]]) -> list[list[int]]:
    """For each type u and demand i, the number of placed teams of type u
    reaching i in time. Plain loops over travel_min by design."""
    counts = [[0] * instance.n_demands for _ in instance.team_types]
    for u, type_sites in enumerate(placed):
        limit = instance.team_types[u].response_limit_min
        for j in type_sites:
            row = instance.travel_min[j]
            for i in range(instance.n_demands):
                if row[i] <= limit:
                    counts[u][i] += 1
    return counts


def _covered_value(instance: Instance, counts: list[list[int]], need: list[int]) -> int:
    value = 0
    q = instance.demand_matrix
    for u in range(len(instance.team_types)):
        for i in range(instance.n_demands):
            if counts[u][i] >= need[u]:
                value += int(q[u, i])
    return value


def _check_guard(instance: Instance) -> None:
    fleet = sum(t.fleet_size for t in instance.team_types)
    if instance.n_sites > ORACLE_MAX_SITES or fleet > ORACLE_MAX_TEAMS:
        raise GuardError(
            f"brute-force oracle limited to {ORACLE_MAX_SITES} sites and "
            f"{ORACLE_MAX_TEAMS} teams; got {instance.n_sites} sites, {fleet} teams"
        )


def _enumerate(instance: Instance, need: list[int]):
    """Yield (placements-per-type, open-site-set, covered value) for every
    feasible placement assignment."""
    site_range = range(instance.n_sites)
    per_type_choices = []
    for team_type in instance.team_types:
        choices = []
        for k in range(min(team_type.fleet_size, instance.n_sites) + 1):
            choices.extend(itertools.combinations(site_range, k))
        per_type_choices.append(choices)
    capacities = [s.capacity for s in instance.sites]
    for assignment in itertools.product(*per_type_choices):
        load = [0] * instance.n_sites
        for type_sites in assignment:
            for j in type_sites:
                load[j] += 1
        if any(load[j] > capacities[j] for j in site_range):
            continue
        open_sites = {j for j in site_range if load[j] > 0}
        if len(open_sites) > instance.max_bases:
            continue
        counts = _coverage_counts(instance, list(assignment))
        yield assignment, open_sites, _covered_value(instance, counts, need), counts


def _deployment(instance: Instance, assignment, open_sites) -> Deployment:
    placements = [
        (instance.site_ids[j], instance.type_ids[u])
        for u, type_sites in enumerate(assignment)
        for j in type_sites
    ]
    return Deployment.build({instance.site_ids[j] for j in open_sites}, placements)


def _report(instance: Instance, deployment: Deployment, counts, need) -> CoverageReport:
    total = total_demand(instance)
    flags = {}
    covering = {}
    covered = 0
    for u, type_id in enumerate(instance.type_ids):
        limit = instance.team_types[u].response_limit_min
        placed = sorted(instance.site_index[s] for s, t in deployment.placements if t == type_id)
        for i, demand_id in enumerate(instance.demand_ids):
            sites = tuple(
                instance.site_ids[j] for j in placed if instance.travel_min[j, i] <= limit
            )
            covering[(demand_id, type_id)] = sites
            hit = counts[u][i] >= need[u]
            flags[(demand_id, type_id)] = hit
            if hit:
                covered += int(instance.demand_matrix[u, i])
    return CoverageReport(
        cover_flags=flags,
        covering_sites=covering,
        covered_demand=covered,
        total_demand=total,
        tx_cob=covered / total if total > 0 else 0.0,
        open_base_count=len(deployment.open_bases),
        tx_red_bases=base_reduction_rate(instance.max_bases, len(deployment.open_bases)),
    )


def brute_force_oracle(instance: Instance, min_available: Mapping[str, int] | None = None):
    """Enumerate every feasible placement assignment and return the best.

    ``min_available`` optionally raises the per-type covering-team count a
    demand needs before it counts as covered (default 1 for every type).
    Returns a SolveResult with proof='optimal'.
    """
    from .solver import SolveResult  # local import; solver never imports back

    _check_guard(instance)
    need = [1] * len(instance.team_types)
    if min_available:
        for type_id, b in min_available.items():
            need[instance.type_index[type_id]] = int(b)
    start = time.perf_counter()
    best = None
    explored = 0
    for assignment, open_sites, value, counts in _enumerate(instance, need):
        explored += 1
        if best is None or value > best[0]:
            best = (value, assignment, open_sites, counts)
    value, assignment, open_sites, counts = best
    deployment = _deployment(instance, assignment, open_sites)
    return SolveResult(
        deployment=deployment,
        report=_report(instance, deployment, counts, need),
        proof="optimal",
        explored_nodes=explored,
        wall_time_s=time.perf_counter() - start,
    )


def brute_force_scalarized(instance: Instance, lam: float):
    """Best weighted score lam*coverage_rate + (1-lam)*base_reduction_rate
    over the same exhaustive enumeration. Returns (score, f1, f2, deployment)."""
    _check_guard(instance)
    total = total_demand(instance)
    need = [1] * len(instance.team_types)
    best = None
    for assignment, open_sites, value, _counts in _enumerate(instance, need):
        f1 = value / total if total > 0 else 0.0
        f2 = base_reduction_rate(instance.max_bases, len(open_sites))
        score = lam * f1 + (1.0 - lam) * f2
        if best is None or score > best[0] + 1e-12:
            best = (score, f1, f2, assignment, open_sites)
    score, f1, f2, assignment, open_sites = best
    return score, f1, f2, _deployment(instance, assignment, open_sites)
