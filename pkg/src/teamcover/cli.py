"""Command-line surface.

Exit codes: 0 success, 2 validation/configuration error, 3 solver size
guard, 4 I/O failure. Every run prints its resolved configuration as one
JSON line on stderr for reproducibility.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import date
from pathlib import Path

from . import __version__, kernels
from .availability import busy_fraction_periods, min_teams
from .coverage import build_cover_matrix
from .demand import fit_rates, generate_calls
from .errors import GuardError, TeamCoverError, ValidationError
from .files import (
    check_instance_hash,
    load_deployment,
    load_instance,
    load_solution,
    read_occurrences,
    read_rate_table,
    write_busy_report,
    write_instance,
    write_occurrences,
    write_pareto_front,
    write_rate_table,
    write_solution,
)
from .geojson import export_geojson
from .instance import total_demand
from .pareto import pareto_filter, sweep_lambda
from .scenarios import ScenarioConfig, run_scenario
from .solver import MODES, SolveOptions, solve

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_GUARD = 3
EXIT_IO = 4


def _parse_map(text: str | None, cast, flag: str) -> dict:
    if not text:
        return {}
    out = {}
    for part in text.split(","):
        if "=" not in part:
            raise ValidationError(f"{flag}: expected KEY=VALUE pairs, got {part!r}")
        key, value = part.split("=", 1)
        try:
            out[key.strip()] = cast(value)
        except ValueError:
            raise ValidationError(f"{flag}: bad value {value!r} for {key.strip()!r}") from None
    return out


def _parse_list(text: str | None) -> list[str]:
    return [p.strip() for p in text.split(",") if p.strip()] if text else []


def _parse_pairs(text: str | None, flag: str) -> list[tuple[str, str]]:
    pairs = []
    for part in _parse_list(text):
        if ":" not in part:
            raise ValidationError(f"{flag}: expected SITE:TYPE pairs, got {part!r}")
        site, type_id = part.split(":", 1)
        pairs.append((site.strip(), type_id.strip()))
    return pairs


def _solve_options(args) -> SolveOptions:
    fixed_bases = _parse_list(getattr(args, "fixed_bases", None))
    fixed_placements = _parse_pairs(getattr(args, "fixed_placements", None), "--fixed-placements")
    return SolveOptions(
        mode=args.mode,
        exact_site_limit=args.exact_site_limit,
        fixed_bases=frozenset(fixed_bases) if fixed_bases else None,
        fixed_placements=frozenset(fixed_placements) if fixed_placements else None,
        time_limit_s=args.time_limit,
    )


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mode", choices=MODES, default="auto",
                        help="solver mode (auto picks exact when the site count permits)")
    parser.add_argument("--exact-site-limit", type=int, default=25,
                        help="largest searchable site count exact mode accepts")
    parser.add_argument("--time-limit", type=float, default=None,
                        help="exact-search time limit in seconds (best incumbent on expiry)")
    parser.add_argument("--fixed-bases", default=None,
                        help="comma-separated site ids; freezes the open base set")
    parser.add_argument("--fixed-placements", default=None,
                        help="comma-separated SITE:TYPE pairs pinned in place")


def _print_config(args: argparse.Namespace) -> None:
    config = {k: v for k, v in vars(args).items() if k != "func" and not callable(v)}
    line = {"tool": f"teamcover {__version__}", "backend": kernels.active_backend(),
            "config": config}
    print(json.dumps(line, default=str), file=sys.stderr)


def _summary(report) -> str:
    return (
        f"covered={report.covered_demand}/{report.total_demand}"
        f" tx_cob={report.tx_cob:.4f} tx_red_bases={report.tx_red_bases:.4f}"
        f" bases={report.open_base_count}"
    )


# --- subcommand handlers -----------------------------------------------------


def _cmd_validate(args) -> int:
    instance = load_instance(args.instance)
    print(
        f"ok: {len(instance.demands)} demand nodes, {len(instance.sites)} sites, "
        f"{len(instance.team_types)} team types, max_bases={instance.max_bases}, "
        f"total_demand={total_demand(instance)}, hash={instance.content_hash()}"
    )
    return EXIT_OK


def _cmd_solve(args) -> int:
    instance = load_instance(args.instance)
    cover = build_cover_matrix(instance)
    options = _solve_options(args)
    result = solve(instance, cover, options)
    print(f"proof={result.proof} {_summary(result.report)}")
    if args.out:
        write_solution(args.out, instance, result, options)
        print(f"solution written to {args.out}")
    return EXIT_OK


def _cmd_pareto(args) -> int:
    instance = load_instance(args.instance)
    cover = build_cover_matrix(instance)
    options = _solve_options(args)
    points = sweep_lambda(instance, cover, grid_size=args.grid, options=options, jobs=args.jobs)
    front = points if args.keep_dominated else pareto_filter(points)
    solutions_dir = args.solutions_dir
    if solutions_dir is None and args.out:
        solutions_dir = str(Path(args.out).with_suffix("")) + "_solutions"
    write_pareto_front(args.out, solutions_dir, instance, cover, front, options)
    print(f"{len(points)} weights solved, {len(front)} rows written to {args.out}")
    if solutions_dir:
        print(f"per-point solutions in {solutions_dir}")
    return EXIT_OK


def _cmd_busy_fraction(args) -> int:
    occurrences = read_occurrences(args.log)
    fleets = _parse_map(args.fleet, int, "--fleet")
    rows = busy_fraction_periods(occurrences, fleets)
    write_busy_report(args.out, rows)
    print(f"{len(rows)} rows written to {args.out}")
    return EXIT_OK


def _cmd_min_teams(args) -> int:
    print(min_teams(args.busy_fraction, args.theta))
    return EXIT_OK


def _cmd_fit_rates(args) -> int:
    occurrences = read_occurrences(args.log)
    fractions = _parse_map(args.sampling_fraction, float, "--sampling-fraction")
    table = fit_rates(occurrences, band_count=args.band_count, sampling_fraction=fractions)
    write_rate_table(args.out, table)
    print(f"{len(table.rates)} rate cells written to {args.out}")
    return EXIT_OK


def _cmd_generate(args) -> int:
    table = read_rate_table(args.rates, band_count=args.band_count)
    start = date.fromisoformat(args.start_date)
    records, totals = generate_calls(table, days=args.days, seed=args.seed, start_date=start)
    write_occurrences(args.out, records)
    print(f"{len(records)} calls over {args.days} days written to {args.out}")
    if args.demand_out:
        demand = {}
        for (neighborhood, type_id), count in sorted(totals.items()):
            demand.setdefault(neighborhood, {})[type_id] = count
        with open(args.demand_out, "w", encoding="utf-8") as fh:
            json.dump({"demand_per_type": demand}, fh, indent=1)
            fh.write("\n")
        print(f"aggregated demand written to {args.demand_out}")
    return EXIT_OK


def _load_baseline(path: str, instance):
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if "deployment" in raw:
        check_instance_hash(raw, instance)
    return load_deployment(path)


def _cmd_scenario(args) -> int:
    instance = load_instance(args.instance)
    baseline = _load_baseline(args.baseline, instance) if args.baseline else None
    config = ScenarioConfig(
        scenario=args.number,
        instance=instance,
        baseline=baseline,
        extra_teams=_parse_map(args.extra_teams, int, "--extra-teams") or None,
        theta=args.theta,
        busy_fractions=_parse_map(args.busy_fraction, float, "--busy-fraction") or None,
        min_available=_parse_map(args.required_teams, int, "--required-teams") or None,
        options=_solve_options(args),
    )
    report = run_scenario(config)
    print(f"scenario {args.number}: proof={report.proof} {_summary(report.report)}")
    if report.delta_tx_cob is not None:
        print(f"delta vs baseline: {report.delta_tx_cob:+.4f}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=1)
            fh.write("\n")
        print(f"report written to {args.out}")
    return EXIT_OK


def _cmd_export_geojson(args) -> int:
    instance = load_instance(args.instance)
    if args.solution:
        solution = load_solution(args.solution)
        check_instance_hash(solution, instance)
        deployment = load_deployment(args.solution)
    else:
        deployment = load_deployment(args.deployment)
    doc = export_geojson(instance, deployment)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    print(f"{len(doc['features'])} features written to {args.out}")
    return EXIT_OK


def _cmd_make_benchmark(args) -> int:
    from .synthetic import benchmark_instance

    instance = benchmark_instance(seed=args.seed, n_demands=args.demands, n_sites=args.sites)
    write_instance(instance, args.out)
    print(
        f"synthetic instance ({args.demands} demands x {args.sites} sites, "
        f"total_demand={total_demand(instance)}) written to {args.out}"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="teamcover",
        description="Emergency-service base siting and rescue-team allocation toolkit",
    )
    parser.add_argument("--version", action="version", version=f"teamcover {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate an instance file")
    p.add_argument("instance")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("solve", help="maximize covered demand")
    p.add_argument("instance")
    p.add_argument("-o", "--out", default=None, help="solution JSON path")
    _add_solver_flags(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("pareto", help="weighted-sum sweep over coverage vs base reduction")
    p.add_argument("instance")
    p.add_argument("-o", "--out", required=True, help="front CSV path")
    p.add_argument("--grid", type=int, default=101, help="number of weights on [0, 1]")
    p.add_argument("--jobs", type=int, default=None, help="parallel solves (default: all cores)")
    p.add_argument("--solutions-dir", default=None,
                   help="directory for per-point solution files (default: <out>_solutions)")
    p.add_argument("--keep-dominated", action="store_true",
                   help="write every grid point instead of the filtered front")
    _add_solver_flags(p)
    p.set_defaults(func=_cmd_pareto)

    p = sub.add_parser("busy-fraction", help="per-period busy fractions from an occurrence log")
    p.add_argument("log", help="occurrence CSV")
    p.add_argument("--fleet", required=True, help="per-type fleet sizes, e.g. advanced=6,basic=21")
    p.add_argument("-o", "--out", required=True, help="report CSV path")
    p.set_defaults(func=_cmd_busy_fraction)

    p = sub.add_parser("min-teams", help="minimum covering teams for a confidence level")
    p.add_argument("--busy-fraction", dest="busy_fraction", type=float, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.set_defaults(func=_cmd_min_teams)

    p = sub.add_parser("fit-rates", help="fit per-stratum call rates from an occurrence log")
    p.add_argument("log", help="occurrence CSV")
    p.add_argument("-o", "--out", required=True, help="rate CSV path")
    p.add_argument("--band-count", type=int, default=6, help="time bands per day (divides 24)")
    p.add_argument("--sampling-fraction", default=None,
                   help="per-type sampled share of days, e.g. basic=0.333")
    p.set_defaults(func=_cmd_fit_rates)

    p = sub.add_parser("generate", help="generate synthetic calls from a rate table")
    p.add_argument("rates", help="rate CSV")
    p.add_argument("--days", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--start-date", default="2024-01-01")
    p.add_argument("--band-count", type=int, default=None,
                   help="override the band count inferred from the rate file")
    p.add_argument("-o", "--out", required=True, help="occurrence CSV path")
    p.add_argument("--demand-out", default=None,
                   help="JSON path for aggregated per-neighborhood totals")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("scenario", help="run one of the six planning scenarios")
    p.add_argument("number", type=int, choices=range(1, 7))
    p.add_argument("--instance", required=True)
    p.add_argument("--baseline", default=None, help="deployment or solution JSON")
    p.add_argument("--extra-teams", default=None, help="e.g. advanced=1,basic=1 (scenarios 5-6)")
    p.add_argument("--theta", type=float, default=None, help="confidence level (scenario 4)")
    p.add_argument("--busy-fraction", default=None,
                   help="per-type busy fractions, e.g. advanced=0.4,basic=0.6 (scenario 4)")
    p.add_argument("--required-teams", default=None,
                   help="explicit per-type covering-team counts, e.g. advanced=2 (scenario 4)")
    p.add_argument("-o", "--out", default=None, help="scenario report JSON path")
    _add_solver_flags(p)
    p.set_defaults(func=_cmd_scenario)

    p = sub.add_parser("export-geojson", help="export an instance plus deployment as GeoJSON")
    p.add_argument("--instance", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--solution", default=None, help="solution JSON (hash-checked)")
    group.add_argument("--deployment", default=None, help="bare deployment JSON")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=_cmd_export_geojson)

    p = sub.add_parser("make-benchmark", help="write the bundled synthetic city-scale instance")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--demands", type=int, default=427)
    p.add_argument("--sites", type=int, default=1527)
    p.set_defaults(func=_cmd_make_benchmark)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _print_config(args)
    try:
        return args.func(args)
    except GuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ValidationError, TeamCoverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
