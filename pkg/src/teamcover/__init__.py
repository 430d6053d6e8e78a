"""Emergency-service base siting and rescue-team allocation toolkit."""

__version__ = "0.1.0"

from .availability import (
    BusyFractionInput,
    ReliabilityRequirement,
    busy_fraction,
    busy_fraction_periods,
    evaluate_b_coverage,
    min_teams,
    solve_b_coverage,
)
from .coverage import CoverMatrix, CoverageReport, build_cover_matrix, evaluate_deployment
from .demand import OccurrenceRecord, RateTable, fit_rates, generate_calls, mean_service_hours
from .errors import DeploymentError, GuardError, TeamCoverError, ValidationError
from .instance import (
    CandidateSite,
    DemandNode,
    Deployment,
    Instance,
    TeamType,
    check_deployment,
    total_demand,
    validate_instance,
)
from .oracle import brute_force_oracle
from .pareto import ParetoPoint, pareto_filter, scalarized_objective, sweep_lambda
from .scenarios import ScenarioConfig, ScenarioReport, run_scenario
from .solver import (
    SolveOptions,
    SolveResult,
    improve_local_search,
    solve,
    solve_exact,
    solve_greedy,
)

__all__ = [
    "BusyFractionInput",
    "CandidateSite",
    "CoverMatrix",
    "CoverageReport",
    "DemandNode",
    "Deployment",
    "DeploymentError",
    "GuardError",
    "Instance",
    "OccurrenceRecord",
    "ParetoPoint",
    "RateTable",
    "ReliabilityRequirement",
    "ScenarioConfig",
    "ScenarioReport",
    "SolveOptions",
    "SolveResult",
    "TeamCoverError",
    "TeamType",
    "ValidationError",
    "brute_force_oracle",
    "build_cover_matrix",
    "busy_fraction",
    "busy_fraction_periods",
    "check_deployment",
    "evaluate_b_coverage",
    "evaluate_deployment",
    "fit_rates",
    "generate_calls",
    "improve_local_search",
    "mean_service_hours",
    "min_teams",
    "pareto_filter",
    "run_scenario",
    "scalarized_objective",
    "solve",
    "solve_b_coverage",
    "solve_exact",
    "solve_greedy",
    "sweep_lambda",
    "total_demand",
    "validate_instance",
]
