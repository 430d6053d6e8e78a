"""Flat-file interfaces: instance JSON, solution JSON, CSV exports.

All CSVs are comma-delimited UTF-8 with a mandatory header row and dot
decimal separators. Solution files embed a hash of the instance they were
solved against so a solution is never silently evaluated on a mutated
instance.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict
from datetime import datetime
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .coverage import CoverageReport, CoverMatrix, evaluate_deployment
from .demand import OccurrenceRecord, RateTable
from .errors import ValidationError
from .instance import Deployment, Instance, validate_instance
from .pareto import ParetoPoint
from .solver import SolveOptions, SolveResult


# --- instance files ---------------------------------------------------------


def load_instance(path: str | Path) -> Instance:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: not valid JSON ({exc})") from None
    return validate_instance(raw, base_dir=path.parent)


def write_instance(instance: Instance, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance.to_dict(), fh, indent=1)
        fh.write("\n")


# --- deployments and solutions ----------------------------------------------


def deployment_from_dict(raw: Mapping[str, Any]) -> Deployment:
    try:
        return Deployment.build(
            raw["open_bases"], [(s, t) for s, t in raw["placements"]]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed deployment description: {exc}") from None


def load_deployment(path: str | Path) -> Deployment:
    """Read a deployment from either a bare deployment JSON or a solution file."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if "deployment" in raw:
        raw = raw["deployment"]
    return deployment_from_dict(raw)


def report_to_dict(report: CoverageReport) -> dict[str, Any]:
    flags: dict[str, dict[str, bool]] = {}
    covering: dict[str, dict[str, list[str]]] = {}
    for (demand_id, type_id), value in sorted(report.cover_flags.items()):
        flags.setdefault(type_id, {})[demand_id] = value
    for (demand_id, type_id), sites in sorted(report.covering_sites.items()):
        covering.setdefault(type_id, {})[demand_id] = list(sites)
    return {
        "covered_demand": report.covered_demand,
        "total_demand": report.total_demand,
        "tx_cob": report.tx_cob,
        "open_base_count": report.open_base_count,
        "tx_red_bases": report.tx_red_bases,
        "cover_flags": flags,
        "covering_sites": covering,
    }


def options_to_dict(options: SolveOptions) -> dict[str, Any]:
    raw = asdict(options)
    raw["fixed_bases"] = sorted(options.fixed_bases) if options.fixed_bases is not None else None
    raw["fixed_placements"] = (
        [list(p) for p in sorted(options.fixed_placements)]
        if options.fixed_placements is not None else None
    )
    return raw


def solution_to_dict(instance: Instance, result: SolveResult,
                     options: SolveOptions | None = None) -> dict[str, Any]:
    return {
        "instance_hash": instance.content_hash(),
        "options": options_to_dict(options) if options is not None else None,
        "deployment": result.deployment.to_dict(),
        "report": report_to_dict(result.report),
        "proof": result.proof,
        "explored_nodes": result.explored_nodes,
        "wall_time_s": result.wall_time_s,
    }


def write_solution(path: str | Path, instance: Instance, result: SolveResult,
                   options: SolveOptions | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(solution_to_dict(instance, result, options), fh, indent=1)
        fh.write("\n")


def load_solution(path: str | Path) -> dict[str, Any]:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if "deployment" not in raw:
        raise ValidationError(f"{path}: not a solution file (no deployment)")
    return raw


def check_instance_hash(solution: Mapping[str, Any], instance: Instance) -> None:
    stored = solution.get("instance_hash")
    if stored is not None and stored != instance.content_hash():
        raise ValidationError(
            "solution was produced for a different instance "
            f"(hash {stored} != {instance.content_hash()})"
        )


# --- Pareto front ------------------------------------------------------------


def write_pareto_front(csv_path: str | Path, solutions_dir: str | Path | None,
                       instance: Instance, cover: CoverMatrix,
                       points: Sequence[ParetoPoint],
                       options: SolveOptions | None = None) -> None:
    """Front CSV (lambda, tx_cob, tx_red_bases, bases_open, covered_calls)
    plus, when a directory is given, one solution file per grid point."""
    if solutions_dir is not None:
        solutions_dir = Path(solutions_dir)
        solutions_dir.mkdir(parents=True, exist_ok=True)
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda", "tx_cob", "tx_red_bases", "bases_open", "covered_calls"])
        for point in points:
            report = evaluate_deployment(instance, cover, point.deployment)
            writer.writerow([
                f"{point.lam:.6g}", repr(report.tx_cob), repr(report.tx_red_bases),
                report.open_base_count, report.covered_demand,
            ])
            if solutions_dir is not None:
                result = SolveResult(point.deployment, report, point.proof)
                name = f"lambda_{point.lam:.4f}".replace(".", "_") + ".json"
                write_solution(solutions_dir / name, instance, result, options)


# --- occurrence logs ----------------------------------------------------------


def _parse_timestamp(raw: str, where: str) -> datetime:
    text = raw.strip().replace("Z", "+00:00")
    try:
        return datetime.fromisoformat(text)
    except ValueError:
        raise ValidationError(f"{where}: unparseable timestamp {raw!r}") from None


def read_occurrences(path: str | Path) -> list[OccurrenceRecord]:
    path = Path(path)
    records: list[OccurrenceRecord] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"id", "neighborhood_id", "team_type", "timestamp"}
        missing = required - set(reader.fieldnames or ())
        if missing:
            raise ValidationError(f"{path}: occurrence log missing columns {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            raw_minutes = (row.get("service_minutes") or "").strip()
            records.append(OccurrenceRecord(
                id=row["id"],
                neighborhood_id=row["neighborhood_id"],
                team_type_id=row["team_type"],
                timestamp=_parse_timestamp(row["timestamp"], f"{path}:{lineno}"),
                service_minutes=float(raw_minutes) if raw_minutes else None,
            ))
    return records


def write_occurrences(path: str | Path, records: Iterable[OccurrenceRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "neighborhood_id", "team_type", "timestamp", "service_minutes"])
        for rec in records:
            writer.writerow([
                rec.id, rec.neighborhood_id, rec.team_type_id,
                rec.timestamp.isoformat(),
                "" if rec.service_minutes is None else repr(float(rec.service_minutes)),
            ])


# --- rate tables ---------------------------------------------------------------


def write_rate_table(path: str | Path, table: RateTable) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["weekday", "band", "team_type", "neighborhood", "rate"])
        for key in sorted(table.rates):
            weekday, band, type_id, neighborhood = key
            writer.writerow([weekday, band, type_id, neighborhood, repr(float(table.rates[key]))])


def _infer_band_count(max_band: int) -> int:
    for candidate in (1, 2, 3, 4, 6, 8, 12, 24):
        if candidate > max_band:
            return candidate
    raise ValidationError(f"band index {max_band} does not fit any divisor of 24")


def read_rate_table(path: str | Path, band_count: int | None = None) -> RateTable:
    """Load a rate CSV. When ``band_count`` is not given it is inferred as
    the smallest divisor of 24 that exceeds the largest band index present."""
    path = Path(path)
    rates: dict[tuple[int, int, str, str], float] = {}
    max_band = 0
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"weekday", "band", "team_type", "neighborhood", "rate"}
        missing = required - set(reader.fieldnames or ())
        if missing:
            raise ValidationError(f"{path}: rate table missing columns {sorted(missing)}")
        for row in reader:
            key = (int(row["weekday"]), int(row["band"]), row["team_type"], row["neighborhood"])
            rates[key] = float(row["rate"])
            max_band = max(max_band, key[1])
    if not rates:
        raise ValidationError(f"{path}: rate table is empty")
    return RateTable(rates=rates, band_count=band_count or _infer_band_count(max_band))


# --- busy-fraction report --------------------------------------------------------


def write_busy_report(path: str | Path, rows: Sequence[Mapping[str, Any]]) -> None:
    """Rows as produced by availability.busy_fraction_periods."""
    columns = ["period", "team_type", "mean_service_hours", "daily_calls", "fleet", "q"]
    columns += sorted({k for row in rows for k in row if k.startswith("b_theta_")})
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([row[c] for c in columns])
