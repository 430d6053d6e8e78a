"""Team availability analytics and reliability-constrained coverage.

A team's busy fraction is the expected share of the day it is occupied,
estimated from the mean service duration, the daily call volume, and the
fleet size. From it follows the minimum number of teams that must be
within range of a demand point so that, with probability at least a
chosen confidence level, one of them is free when a call arrives: the
smallest b with busy_fraction**b <= 1 - confidence.

``evaluate_b_coverage``/``solve_b_coverage`` apply that requirement to
the placement model: a (demand, type) pair only counts as covered when at
least b teams of the type are in range. Since a base holds at most one
team per type, the b covering teams are automatically at distinct bases.
With every requirement at 1 this reduces exactly to the standard
evaluation and solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .coverage import CoverMatrix, CoverageReport, assemble_report, placed_site_indices
from .errors import ValidationError
from .instance import Deployment, Instance
from .solver import SolveOptions, SolveResult, _run


@dataclass(frozen=True)
class BusyFractionInput:
    """Inputs for the busy-fraction estimate of one team type.

    ``mean_service_hours`` is the full commitment per call: travel, time on
    site, hospital drop-off, and the return to base.
    """

    mean_service_hours: float
    daily_calls: float
    fleet: int

    def __post_init__(self) -> None:
        if self.mean_service_hours <= 0:
            raise ValidationError("mean_service_hours must be > 0")
        if self.daily_calls < 0:
            raise ValidationError("daily_calls must be >= 0")
        if self.fleet < 1:
            raise ValidationError("fleet must be >= 1")


@dataclass(frozen=True)
class ReliabilityRequirement:
    """Per-type covering-team counts, optionally derived from a confidence
    level and per-type busy fractions."""

    min_available: Mapping[str, int]
    theta: float | None = None

    def __post_init__(self) -> None:
        for type_id, b in self.min_available.items():
            if int(b) < 1:
                raise ValidationError(f"required count for {type_id} must be >= 1, got {b}")
        if self.theta is not None and not 0.0 < self.theta < 1.0:
            raise ValidationError(f"confidence level must lie in (0, 1), got {self.theta}")

    @classmethod
    def from_theta(cls, theta: float, busy_fractions: Mapping[str, float]) -> "ReliabilityRequirement":
        counts = {type_id: min_teams(q, theta) for type_id, q in busy_fractions.items()}
        return cls(min_available=counts, theta=theta)


def busy_fraction(inp: BusyFractionInput) -> float:
    """Expected busy share: mean service hours times daily calls, spread
    over the fleet's 24-hour capacity."""
    return inp.mean_service_hours * inp.daily_calls / (24.0 * inp.fleet)


def min_teams(q: float, theta: float) -> int:
    """Smallest team count b with q**b <= 1 - theta, i.e.
    ceil(log(1 - theta) / log(q))."""
    if not 0.0 < theta < 1.0:
        raise ValidationError(f"confidence level must lie in (0, 1), got {theta}")
    if q <= 0.0:
        raise ValidationError(f"busy fraction must be > 0, got {q}")
    if q >= 1.0:
        raise ValidationError(f"busy fraction {q} >= 1: saturated system, no team count suffices")
    b = max(1, math.ceil(math.log(1.0 - theta) / math.log(q)))
    # settle float round-off on the ceiling exactly against the defining inequality
    while b > 1 and q ** (b - 1) <= 1.0 - theta:
        b -= 1
    while q ** b > 1.0 - theta:
        b += 1
    return b


def _need_vector(instance: Instance, req: ReliabilityRequirement) -> np.ndarray:
    need = np.ones(len(instance.team_types), dtype=np.int64)
    for type_id, b in req.min_available.items():
        if type_id not in instance.type_index:
            raise ValidationError(f"requirement references unknown team type {type_id!r}")
        need[instance.type_index[type_id]] = int(b)
    return need


def evaluate_b_coverage(instance: Instance, cover: CoverMatrix, deployment: Deployment,
                        req: ReliabilityRequirement) -> CoverageReport:
    """Coverage where (demand, type) counts only with at least the required
    number of covering teams of that type in range."""
    need = _need_vector(instance, req)
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
            flags[u, i] = len(here) >= need[u]
    return assemble_report(instance, deployment, flags, covering)


def solve_b_coverage(instance: Instance, cover: CoverMatrix, req: ReliabilityRequirement,
                     options: SolveOptions | None = None) -> SolveResult:
    """Maximize demand covered under the reliability requirement. Exact via
    the count-based enumeration when the site count permits, otherwise
    greedy (newly covered demand first, progress toward the requirement as
    tie-break) plus local search."""
    options = options or SolveOptions()
    need = _need_vector(instance, req)
    state, proof, nodes, wall = _run(instance, cover, options, need=need)
    deployment = state.to_deployment()
    report = evaluate_b_coverage(instance, cover, deployment, req)
    return SolveResult(deployment, report, proof, nodes, wall)


def busy_fraction_periods(occurrences, fleets: Mapping[str, int],
                          thetas: tuple[float, ...] = (0.85, 0.90, 0.95)) -> list[dict]:
    """Per calendar month and team type: mean service hours, daily call
    volume, busy fraction, and the minimum team counts at each confidence
    level. An 'overall' row per type closes the table. Months without any
    recorded duration fall back to the type's overall mean.
    """
    from .demand import mean_service_hours  # demand never imports back

    if not occurrences:
        raise ValidationError("cannot build a busy-fraction report from an empty log")
    by_type: dict[str, list] = {}
    for rec in occurrences:
        by_type.setdefault(rec.team_type_id, []).append(rec)
    unknown = [t for t in by_type if t not in fleets]
    if unknown:
        raise ValidationError(f"no fleet size given for team type {unknown[0]!r}")

    rows: list[dict] = []
    for type_id in sorted(by_type):
        records = by_type[type_id]
        overall_hours = mean_service_hours(records)
        by_month: dict[str, list] = {}
        for rec in records:
            by_month.setdefault(rec.timestamp.strftime("%Y-%m"), []).append(rec)
        for period in sorted(by_month) + ["overall"]:
            subset = records if period == "overall" else by_month[period]
            days = len({rec.timestamp.date() for rec in subset})
            try:
                hours = mean_service_hours(subset)
            except ValidationError:
                hours = overall_hours
            inp = BusyFractionInput(hours, len(subset) / days, int(fleets[type_id]))
            q = busy_fraction(inp)
            row = {
                "period": period,
                "team_type": type_id,
                "mean_service_hours": hours,
                "daily_calls": inp.daily_calls,
                "fleet": inp.fleet,
                "q": q,
            }
            for theta in thetas:
                key = f"b_theta_{round(theta * 100):02d}"
                row[key] = min_teams(q, theta) if 0.0 < q < 1.0 else ""
            rows.append(row)
    return rows
