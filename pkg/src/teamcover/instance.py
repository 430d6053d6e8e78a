"""Problem instance model.

An :class:`Instance` bundles everything a solver needs: rescue-team types
with their response-time limits and fleet sizes, demand nodes with per-type
call counts, candidate base sites with capacities, the base budget, and the
site-to-demand travel-time matrix. Instances are built through
:func:`validate_instance`, are immutable afterwards, and may be shared
freely across workers.

The public API is identifier-based; integer indices are an internal
compilation detail, so reordering entries in an input file never changes
results.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np

from .errors import DeploymentError, ValidationError

Coordinates = tuple[float, float]  # (lat, lon), degrees


@dataclass(frozen=True)
class TeamType:
    id: str
    response_limit_min: float
    fleet_size: int


@dataclass(frozen=True)
class DemandNode:
    id: str
    demand_per_type: Mapping[str, int]
    coordinates: Coordinates | None = None


@dataclass(frozen=True)
class CandidateSite:
    id: str
    capacity: int
    coordinates: Coordinates | None = None


@dataclass(frozen=True, eq=False)
class Instance:
    """Validated problem instance. Build via :func:`validate_instance`."""

    team_types: tuple[TeamType, ...]
    demands: tuple[DemandNode, ...]
    sites: tuple[CandidateSite, ...]
    max_bases: int
    travel_min: np.ndarray  # (n_sites, n_demands), minutes, read-only

    # derived index structures, filled in __post_init__
    type_ids: tuple[str, ...] = field(init=False)
    demand_ids: tuple[str, ...] = field(init=False)
    site_ids: tuple[str, ...] = field(init=False)
    type_index: dict[str, int] = field(init=False)
    demand_index: dict[str, int] = field(init=False)
    site_index: dict[str, int] = field(init=False)
    demand_matrix: np.ndarray = field(init=False)  # (n_types, n_demands) int64

    def __post_init__(self) -> None:
        set_ = object.__setattr__
        set_(self, "type_ids", tuple(t.id for t in self.team_types))
        set_(self, "demand_ids", tuple(d.id for d in self.demands))
        set_(self, "site_ids", tuple(s.id for s in self.sites))
        set_(self, "type_index", {t: i for i, t in enumerate(self.type_ids)})
        set_(self, "demand_index", {d: i for i, d in enumerate(self.demand_ids)})
        set_(self, "site_index", {s: i for i, s in enumerate(self.site_ids)})
        q = np.zeros((len(self.team_types), len(self.demands)), dtype=np.int64)
        for i, node in enumerate(self.demands):
            for type_id, count in node.demand_per_type.items():
                q[self.type_index[type_id], i] = count
        q.setflags(write=False)
        set_(self, "demand_matrix", q)
        self.travel_min.setflags(write=False)

    @property
    def n_demands(self) -> int:
        return len(self.demands)

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.team_types == other.team_types
            and self.demands == other.demands
            and self.sites == other.sites
            and self.max_bases == other.max_bases
            and np.array_equal(self.travel_min, other.travel_min)
        )

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready description (travel matrix inline, row-major by site)."""
        def coords(c):
            return None if c is None else [float(c[0]), float(c[1])]

        return {
            "team_types": [
                {
                    "id": t.id,
                    "response_limit_min": float(t.response_limit_min),
                    "fleet_size": int(t.fleet_size),
                }
                for t in self.team_types
            ],
            "demands": [
                {
                    "id": d.id,
                    "coordinates": coords(d.coordinates),
                    "demand_per_type": {k: int(v) for k, v in sorted(d.demand_per_type.items())},
                }
                for d in self.demands
            ],
            "sites": [
                {"id": s.id, "coordinates": coords(s.coordinates), "capacity": int(s.capacity)}
                for s in self.sites
            ],
            "max_bases": int(self.max_bases),
            "travel_min": [[float(v) for v in row] for row in self.travel_min],
        }

    def content_hash(self) -> str:
        """Hash of the solve-relevant content (coordinates excluded)."""
        header = {
            "team_types": [[t.id, float(t.response_limit_min), int(t.fleet_size)] for t in self.team_types],
            "demands": [[d.id, sorted((k, int(v)) for k, v in d.demand_per_type.items())] for d in self.demands],
            "sites": [[s.id, int(s.capacity)] for s in self.sites],
            "max_bases": int(self.max_bases),
            "shape": list(self.travel_min.shape),
        }
        digest = hashlib.sha256()
        digest.update(json.dumps(header, sort_keys=True).encode())
        digest.update(np.ascontiguousarray(self.travel_min, dtype=np.float64).tobytes())
        return digest.hexdigest()[:16]


@dataclass(frozen=True)
class Deployment:
    """Open bases plus (site, team-type) placements; the decision object."""

    open_bases: frozenset[str]
    placements: frozenset[tuple[str, str]]

    @classmethod
    def build(cls, open_bases: Iterable[str], placements: Iterable[tuple[str, str]]) -> "Deployment":
        return cls(frozenset(open_bases), frozenset((s, t) for s, t in placements))

    @classmethod
    def empty(cls) -> "Deployment":
        return cls(frozenset(), frozenset())

    def to_dict(self) -> dict[str, Any]:
        return {
            "open_bases": sorted(self.open_bases),
            "placements": [list(p) for p in sorted(self.placements)],
        }


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValidationError(message)


def _as_coords(raw, owner: str) -> Coordinates | None:
    if raw is None:
        return None
    if not isinstance(raw, (list, tuple)) or len(raw) != 2:
        raise ValidationError(f"{owner}: coordinates must be [lat, lon]")
    return (float(raw[0]), float(raw[1]))


def _as_count(raw, owner: str) -> int:
    try:
        value = int(raw)
    except (TypeError, ValueError):
        raise ValidationError(f"{owner}: expected an integer, got {raw!r}") from None
    if value != raw or value < 0:
        raise ValidationError(f"{owner}: expected a non-negative integer, got {raw!r}")
    return value


def _load_travel_csv(path: Path, site_ids: list[str], demand_ids: list[str]) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"travel matrix {path}: empty file") from None
        file_demands = [c.strip() for c in header[1:]]
        rows: dict[str, list[str]] = {}
        for line in reader:
            if not line:
                continue
            rows[line[0].strip()] = line[1:]
    missing = [d for d in demand_ids if d not in file_demands]
    _require(not missing, f"travel matrix {path}: missing demand columns {missing[:5]}")
    missing_sites = [s for s in site_ids if s not in rows]
    _require(not missing_sites, f"travel matrix {path}: missing site rows {missing_sites[:5]}")
    col = {d: k for k, d in enumerate(file_demands)}
    out = np.empty((len(site_ids), len(demand_ids)), dtype=np.float64)
    for j, site in enumerate(site_ids):
        values = rows[site]
        _require(
            len(values) == len(file_demands),
            f"travel matrix {path}: row {site} has {len(values)} values, header has {len(file_demands)}",
        )
        for i, demand in enumerate(demand_ids):
            out[j, i] = float(values[col[demand]])
    return out


def validate_instance(raw: Mapping[str, Any] | Instance, base_dir: str | Path | None = None) -> Instance:
    """Validate a raw description (parsed JSON dict or an Instance) and return
    a normalized Instance.

    Demand maps are densified with explicit zeros for every team type.
    ``travel_min`` may be an inline row-major matrix (rows = sites) or a path
    to a CSV matrix, resolved against ``base_dir``. Idempotent: validating an
    already-valid Instance returns an equal one.
    """
    if isinstance(raw, Instance):
        raw = raw.to_dict()

    for key in ("team_types", "demands", "sites", "max_bases", "travel_min"):
        _require(key in raw, f"instance description missing required key {key!r}")

    team_types: list[TeamType] = []
    seen_types: set[str] = set()
    for entry in raw["team_types"]:
        tid = str(entry["id"])
        _require(tid not in seen_types, f"team type {tid}: duplicate id")
        seen_types.add(tid)
        limit = float(entry["response_limit_min"])
        _require(limit > 0, f"team type {tid}: response_limit_min must be > 0")
        fleet = _as_count(entry["fleet_size"], f"team type {tid}: fleet_size")
        team_types.append(TeamType(tid, limit, fleet))
    n_types = len(team_types)
    _require(n_types > 0, "instance must define at least one team type")

    demands: list[DemandNode] = []
    seen_demands: set[str] = set()
    for entry in raw["demands"]:
        did = str(entry["id"])
        _require(did not in seen_demands, f"demand node {did}: duplicate id")
        seen_demands.add(did)
        per_type = entry.get("demand_per_type", {})
        unknown = [k for k in per_type if k not in seen_types]
        if unknown:
            raise ValidationError(f"demand node {did}: unknown team type key {unknown[0]!r}")
        dense = {
            t.id: _as_count(per_type.get(t.id, 0), f"demand node {did}: demand for {t.id}")
            for t in team_types
        }
        demands.append(DemandNode(did, dense, _as_coords(entry.get("coordinates"), f"demand node {did}")))

    sites: list[CandidateSite] = []
    seen_sites: set[str] = set()
    for entry in raw["sites"]:
        sid = str(entry["id"])
        _require(sid not in seen_sites, f"site {sid}: duplicate id")
        seen_sites.add(sid)
        capacity = _as_count(entry["capacity"], f"site {sid}: capacity")
        _require(
            1 <= capacity <= n_types,
            f"site {sid}: capacity {capacity} outside 1..{n_types} (one team per type per base)",
        )
        sites.append(CandidateSite(sid, capacity, _as_coords(entry.get("coordinates"), f"site {sid}")))

    max_bases = _as_count(raw["max_bases"], "max_bases")
    _require(
        max_bases <= len(sites),
        f"max_bases {max_bases} exceeds number of candidate sites {len(sites)}",
    )

    travel_raw = raw["travel_min"]
    if isinstance(travel_raw, str):
        path = Path(travel_raw)
        if not path.is_absolute() and base_dir is not None:
            path = Path(base_dir) / path
        travel = _load_travel_csv(path, [s.id for s in sites], [d.id for d in demands])
    else:
        try:
            travel = np.asarray(travel_raw, dtype=np.float64)
        except ValueError:
            raise ValidationError("travel_min rows have inconsistent lengths") from None
        _require(
            travel.ndim == 2 and travel.shape == (len(sites), len(demands)),
            f"travel_min has shape {travel.shape}, expected ({len(sites)}, {len(demands)})",
        )
        travel = travel.copy()

    bad = ~np.isfinite(travel) | (travel < 0)
    if bad.any():
        j, i = np.argwhere(bad)[0]
        raise ValidationError(
            f"travel_min[{sites[j].id}, {demands[i].id}] = {travel[j, i]} is not a finite non-negative time"
        )

    return Instance(tuple(team_types), tuple(demands), tuple(sites), max_bases, travel)


def total_demand(instance: Instance) -> int:
    """Total call count over all demand nodes and team types."""
    return int(instance.demand_matrix.sum())


def check_deployment(instance: Instance, deployment: Deployment) -> None:
    """Raise DeploymentError unless the deployment satisfies every resource
    and coupling constraint of the instance."""
    for site in deployment.open_bases:
        if site not in instance.site_index:
            raise DeploymentError(f"deployment opens unknown site {site!r}")
    per_site: dict[str, int] = {}
    per_type: dict[str, int] = {}
    for site, type_id in deployment.placements:
        if site not in instance.site_index:
            raise DeploymentError(f"placement references unknown site {site!r}")
        if type_id not in instance.type_index:
            raise DeploymentError(f"placement references unknown team type {type_id!r}")
        if site not in deployment.open_bases:
            raise DeploymentError(f"placement ({site}, {type_id}) at a site that is not open")
        per_site[site] = per_site.get(site, 0) + 1
        per_type[type_id] = per_type.get(type_id, 0) + 1
    for site, count in per_site.items():
        capacity = instance.sites[instance.site_index[site]].capacity
        if count > capacity:
            raise DeploymentError(f"site {site} holds {count} teams, capacity is {capacity}")
    for type_id, count in per_type.items():
        fleet = instance.team_types[instance.type_index[type_id]].fleet_size
        if count > fleet:
            raise DeploymentError(f"team type {type_id} placed {count} times, fleet size is {fleet}")
    if len(deployment.open_bases) > instance.max_bases:
        raise DeploymentError(
            f"{len(deployment.open_bases)} bases open, budget is {instance.max_bases}"
        )


def is_feasible(instance: Instance, deployment: Deployment) -> bool:
    """True when :func:`check_deployment` accepts the deployment."""
    try:
        check_deployment(instance, deployment)
    except DeploymentError:
        return False
    return True
