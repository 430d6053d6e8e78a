"""Six planning scenarios over one instance.

1. Evaluate the current deployment as-is.
2. Re-optimize team placement while keeping the open base set frozen.
3. Optimize bases and teams over every candidate site.
4. Optimize under the reliability requirement (a demand needs enough
   covering teams of a type that one is free with the requested
   confidence, given the busy fractions).
5. Add extra teams; only the new teams' placement is optimized, existing
   placements stay put.
6. Add extra teams and re-optimize everything.

Reports carry covered calls, the coverage rate, a per-type breakdown, and
the delta against the baseline when one is given.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Mapping

from .availability import ReliabilityRequirement, evaluate_b_coverage, solve_b_coverage
from .coverage import CoverageReport, build_cover_matrix, evaluate_deployment
from .errors import ValidationError
from .instance import Deployment, Instance, check_deployment, validate_instance
from .solver import SolveOptions, SolveResult, solve

MAX_EXTRA_TEAMS = 3


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: int
    instance: Instance
    baseline: Deployment | None = None
    extra_teams: Mapping[str, int] | None = None
    theta: float | None = None
    busy_fractions: Mapping[str, float] | None = None
    min_available: Mapping[str, int] | None = None
    options: SolveOptions = field(default_factory=SolveOptions)


@dataclass
class ScenarioReport:
    scenario: int
    deployment: Deployment
    report: CoverageReport
    proof: str
    per_type: dict[str, dict[str, float]]
    requirement: dict[str, int] | None = None
    baseline_report: CoverageReport | None = None
    delta_tx_cob: float | None = None
    explored_nodes: int = 0
    wall_time_s: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        out = {
            "scenario": self.scenario,
            "covered_demand": self.report.covered_demand,
            "total_demand": self.report.total_demand,
            "tx_cob": self.report.tx_cob,
            "tx_red_bases": self.report.tx_red_bases,
            "open_base_count": self.report.open_base_count,
            "proof": self.proof,
            "per_type": self.per_type,
            "deployment": self.deployment.to_dict(),
            "explored_nodes": self.explored_nodes,
            "wall_time_s": self.wall_time_s,
        }
        if self.requirement is not None:
            out["required_covering_teams"] = dict(sorted(self.requirement.items()))
        if self.baseline_report is not None:
            out["baseline_tx_cob"] = self.baseline_report.tx_cob
            out["baseline_covered_demand"] = self.baseline_report.covered_demand
            out["delta_tx_cob"] = self.delta_tx_cob
        return out


def per_type_breakdown(instance: Instance, report: CoverageReport) -> dict[str, dict[str, float]]:
    out: dict[str, dict[str, float]] = {}
    for u, type_id in enumerate(instance.type_ids):
        type_total = int(instance.demand_matrix[u].sum())
        covered = sum(
            int(instance.demand_matrix[u, i])
            for i, demand_id in enumerate(instance.demand_ids)
            if report.cover_flags[(demand_id, type_id)]
        )
        out[type_id] = {
            "covered": covered,
            "total": type_total,
            "rate": covered / type_total if type_total > 0 else 0.0,
        }
    return out


def with_extra_teams(instance: Instance, extra: Mapping[str, int]) -> Instance:
    for type_id, count in extra.items():
        if type_id not in instance.type_index:
            raise ValidationError(f"extra teams reference unknown team type {type_id!r}")
        if not 0 <= int(count) <= MAX_EXTRA_TEAMS:
            raise ValidationError(
                f"extra team count for {type_id} must lie in 0..{MAX_EXTRA_TEAMS}, got {count}"
            )
    raw = instance.to_dict()
    for entry in raw["team_types"]:
        entry["fleet_size"] += int(extra.get(entry["id"], 0))
    return validate_instance(raw)


def _requirement(config: ScenarioConfig) -> ReliabilityRequirement:
    if config.min_available:
        return ReliabilityRequirement(dict(config.min_available), theta=config.theta)
    if config.theta is None or not config.busy_fractions:
        raise ValidationError(
            "scenario 4 needs either explicit per-type covering-team counts "
            "or a confidence level plus per-type busy fractions"
        )
    return ReliabilityRequirement.from_theta(config.theta, config.busy_fractions)


def run_scenario(config: ScenarioConfig) -> ScenarioReport:
    instance = config.instance
    if config.scenario not in range(1, 7):
        raise ValidationError(f"scenario must be 1..6, got {config.scenario}")
    if config.scenario in (1, 2, 5) and config.baseline is None:
        raise ValidationError(f"scenario {config.scenario} requires a baseline deployment")

    baseline_report: CoverageReport | None = None
    requirement: dict[str, int] | None = None
    cover = build_cover_matrix(instance)

    if config.baseline is not None and config.scenario != 5:
        check_deployment(instance, config.baseline)
        baseline_report = evaluate_deployment(instance, cover, config.baseline)

    if config.scenario == 1:
        result = SolveResult(config.baseline, baseline_report, "heuristic")
    elif config.scenario == 2:
        options = replace(config.options, fixed_bases=frozenset(config.baseline.open_bases))
        result = solve(instance, cover, options)
    elif config.scenario == 3:
        result = solve(instance, cover, config.options)
    elif config.scenario == 4:
        req = _requirement(config)
        requirement = dict(req.min_available)
        result = solve_b_coverage(instance, cover, req, config.options)
        if config.baseline is not None:
            baseline_report = evaluate_b_coverage(instance, cover, config.baseline, req)
    elif config.scenario == 5:
        instance = with_extra_teams(instance, config.extra_teams or {})
        cover = build_cover_matrix(instance)
        check_deployment(instance, config.baseline)
        baseline_report = evaluate_deployment(instance, cover, config.baseline)
        options = replace(
            config.options, fixed_placements=frozenset(config.baseline.placements)
        )
        result = solve(instance, cover, options)
    else:  # scenario 6
        instance = with_extra_teams(instance, config.extra_teams or {})
        cover = build_cover_matrix(instance)
        if config.baseline is not None:
            check_deployment(instance, config.baseline)
            baseline_report = evaluate_deployment(instance, cover, config.baseline)
        result = solve(instance, cover, config.options)

    delta = (
        result.report.tx_cob - baseline_report.tx_cob if baseline_report is not None else None
    )
    return ScenarioReport(
        scenario=config.scenario,
        deployment=result.deployment,
        report=result.report,
        proof=result.proof,
        per_type=per_type_breakdown(instance, result.report),
        requirement=requirement,
        baseline_report=baseline_report,
        delta_tx_cob=delta,
        explored_nodes=result.explored_nodes,
        wall_time_s=result.wall_time_s,
    )
