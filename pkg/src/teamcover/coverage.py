"""Coverage feasibility matrix and deployment evaluation.

For every team type the reachable demand nodes of each candidate site are
precomputed once as packed bit rows (``travel_min[j, i] <= response limit``,
inclusive). Evaluating a deployment is then a union of the placed rows per
type followed by a weighted popcount, which is what makes marginal-gain
scans in the solvers cheap at full problem scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ValidationError
from .instance import Deployment, Instance, total_demand


@dataclass(frozen=True)
class CoverMatrix:
    """Per team type, packed bit rows: bit i of row j set iff site j reaches
    demand i within the type's response limit."""

    type_ids: tuple[str, ...]
    words: np.ndarray  # (n_types, n_sites, n_words) uint64, read-only
    n_demands: int

    def row(self, type_idx: int, site_idx: int) -> np.ndarray:
        return self.words[type_idx, site_idx]

    def covers(self, type_idx: int, site_idx: int, demand_idx: int) -> bool:
        word = self.words[type_idx, site_idx, demand_idx >> 6]
        return bool((word >> np.uint64(demand_idx & 63)) & np.uint64(1))


@dataclass(frozen=True)
class CoverageReport:
    """Evaluation of one deployment against one instance."""

    cover_flags: dict[tuple[str, str], bool]  # (demand id, type id) -> covered
    covering_sites: dict[tuple[str, str], tuple[str, ...]]
    covered_demand: int
    total_demand: int
    tx_cob: float
    open_base_count: int
    tx_red_bases: float


def build_cover_matrix(instance: Instance) -> CoverMatrix:
    """Precompute coverage feasibility bit rows for every team type."""
    n_types = len(instance.team_types)
    n_sites = instance.n_sites
    words = np.zeros((n_types, n_sites, kernels.n_words(instance.n_demands)), dtype=np.uint64)
    for u, team_type in enumerate(instance.team_types):
        reachable = instance.travel_min <= team_type.response_limit_min
        words[u] = kernels.pack_rows(reachable)
    words.setflags(write=False)
    return CoverMatrix(instance.type_ids, words, instance.n_demands)


def base_reduction_rate(max_bases: int, open_count: int) -> float:
    """(Q - open) / Q; defined as 1.0 for the degenerate Q = 0 budget."""
    if max_bases <= 0:
        return 1.0
    return (max_bases - open_count) / max_bases


def placed_site_indices(instance: Instance, cover: CoverMatrix, deployment: Deployment) -> dict[int, np.ndarray]:
    """Map each type index to the sorted site indices holding that type."""
    per_type: dict[int, list[int]] = {u: [] for u in range(len(instance.team_types))}
    for site, type_id in deployment.placements:
        if site not in instance.site_index:
            raise ValidationError(f"deployment references unknown site {site!r}")
        if type_id not in instance.type_index:
            raise ValidationError(f"deployment references unknown team type {type_id!r}")
        per_type[instance.type_index[type_id]].append(instance.site_index[site])
    return {u: np.array(sorted(rows), dtype=np.int64) for u, rows in per_type.items()}


def assemble_report(
    instance: Instance,
    deployment: Deployment,
    flags: np.ndarray,
    covering: dict[tuple[str, str], tuple[str, ...]],
) -> CoverageReport:
    """Build a CoverageReport from a per-(type, demand) boolean flag matrix."""
    q = instance.demand_matrix
    covered = int(q[flags].sum())
    total = total_demand(instance)
    cover_flags = {
        (instance.demand_ids[i], instance.type_ids[u]): bool(flags[u, i])
        for u in range(q.shape[0])
        for i in range(q.shape[1])
    }
    open_count = len(deployment.open_bases)
    return CoverageReport(
        cover_flags=cover_flags,
        covering_sites=covering,
        covered_demand=covered,
        total_demand=total,
        tx_cob=covered / total if total > 0 else 0.0,
        open_base_count=open_count,
        tx_red_bases=base_reduction_rate(instance.max_bases, open_count),
    )


def evaluate_deployment(instance: Instance, cover: CoverMatrix, deployment: Deployment) -> CoverageReport:
    """Coverage of a deployment: (demand, type) is covered when at least one
    placed team of that type reaches it in time."""
    per_type = placed_site_indices(instance, cover, deployment)
    n_types, n_demands = instance.demand_matrix.shape
    flags = np.zeros((n_types, n_demands), dtype=bool)
    covering: dict[tuple[str, str], tuple[str, ...]] = {}
    for u in range(n_types):
        rows = per_type[u]
        sites = [instance.site_ids[j] for j in rows]
        for i in range(n_demands):
            here = tuple(s for s, j in zip(sites, rows) if cover.covers(u, j, i))
            covering[(instance.demand_ids[i], instance.type_ids[u])] = here
            flags[u, i] = bool(here)
    return assemble_report(instance, deployment, flags, covering)
