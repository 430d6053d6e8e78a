"""Synthetic city-scale fixture.

Builds a full-size benchmark instance (427 demand centroids, 1,527
candidate sites, two team types, 27 teams over a budget of 22 bases) with
coordinates in a metropolitan bounding box, travel times from great-circle
distance at an urban driving speed, and demand totals produced by the
Poisson generator so that a 30-day horizon lands near 26,700 calls.

The numbers that fall out are synthetic: the fixture exists for
performance work and scenario demos, never for real-world claims.
"""

from __future__ import annotations

from datetime import date

import numpy as np

from .demand import RateTable, generate_calls
from .instance import Deployment, Instance, validate_instance

CITY_CENTER = (-19.92, -43.94)
LAT_HALF_SPAN = 0.135
LON_HALF_SPAN = 0.16
DRIVE_SPEED_KMH = 30.0
BAND_PROFILE = (0.5, 0.3, 0.9, 1.3, 1.5, 1.1)  # six 4-hour bands
WEEKDAY_PROFILE = (1.0, 0.95, 0.95, 1.0, 1.15, 1.2, 1.05)
TYPE_SHARE = {"advanced": 0.45, "basic": 0.55}


def _haversine_minutes(site_coords: np.ndarray, demand_coords: np.ndarray) -> np.ndarray:
    lat1 = np.radians(site_coords[:, 0])[:, None]
    lon1 = np.radians(site_coords[:, 1])[:, None]
    lat2 = np.radians(demand_coords[:, 0])[None, :]
    lon2 = np.radians(demand_coords[:, 1])[None, :]
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    a = np.sin(dlat / 2.0) ** 2 + np.cos(lat1) * np.cos(lat2) * np.sin(dlon / 2.0) ** 2
    km = 2.0 * 6371.0 * np.arcsin(np.sqrt(a))
    return km / DRIVE_SPEED_KMH * 60.0


def benchmark_rate_table(seed: int = 0, n_demands: int = 427,
                         days: int = 30, target_calls: float = 26_700.0,
                         start_date: date = date(2024, 1, 1)) -> RateTable:
    """Random per-neighborhood rates scaled so the expected call total over
    the generation window matches ``target_calls``."""
    rng = np.random.default_rng(seed)
    weights = rng.lognormal(mean=0.0, sigma=1.0, size=n_demands)
    raw: dict[tuple[int, int, str, str], float] = {}
    for i in range(n_demands):
        node = f"n{i:03d}"
        for weekday in range(7):
            for band in range(6):
                for type_id, share in TYPE_SHARE.items():
                    raw[(weekday, band, type_id, node)] = (
                        weights[i] * BAND_PROFILE[band] * WEEKDAY_PROFILE[weekday] * share
                    )
    expected = 0.0
    for offset in range(days):
        weekday = (start_date.weekday() + offset) % 7
        expected += sum(rate for key, rate in raw.items() if key[0] == weekday)
    scale = target_calls / expected
    return RateTable(rates={k: v * scale for k, v in raw.items()}, band_count=6)


def benchmark_instance(seed: int = 0, n_demands: int = 427, n_sites: int = 1527,
                       advanced_fleet: int = 6, basic_fleet: int = 21,
                       max_bases: int = 22, days: int = 30,
                       target_calls: float = 26_700.0) -> Instance:
    rng = np.random.default_rng(seed)
    max_bases = min(max_bases, n_sites)
    lat0, lon0 = CITY_CENTER

    def sample_coords(n: int) -> np.ndarray:
        lat = lat0 + rng.uniform(-LAT_HALF_SPAN, LAT_HALF_SPAN, n)
        lon = lon0 + rng.uniform(-LON_HALF_SPAN, LON_HALF_SPAN, n)
        return np.column_stack([lat, lon])

    demand_coords = sample_coords(n_demands)
    site_coords = sample_coords(n_sites)
    travel = _haversine_minutes(site_coords, demand_coords)

    rates = benchmark_rate_table(seed=seed + 1, n_demands=n_demands,
                                 days=days, target_calls=target_calls)
    _records, totals = generate_calls(rates, days=days, seed=seed + 2)

    demands = []
    for i in range(n_demands):
        node = f"n{i:03d}"
        demands.append({
            "id": node,
            "coordinates": [float(demand_coords[i, 0]), float(demand_coords[i, 1])],
            "demand_per_type": {
                type_id: totals.get((node, type_id), 0) for type_id in TYPE_SHARE
            },
        })
    sites = [
        {
            "id": f"s{j:04d}",
            "coordinates": [float(site_coords[j, 0]), float(site_coords[j, 1])],
            "capacity": 2,
        }
        for j in range(n_sites)
    ]
    return validate_instance({
        "team_types": [
            {"id": "advanced", "response_limit_min": 10.0, "fleet_size": advanced_fleet},
            {"id": "basic", "response_limit_min": 8.0, "fleet_size": basic_fleet},
        ],
        "demands": demands,
        "sites": sites,
        "max_bases": max_bases,
        "travel_min": travel,
    })


def benchmark_baseline(instance: Instance, seed: int = 0) -> Deployment:
    """A feasible, deliberately unoptimized deployment: random bases, teams
    assigned in site order."""
    rng = np.random.default_rng(seed)
    n_bases = min(instance.max_bases, instance.n_sites)
    base_idx = sorted(rng.choice(instance.n_sites, size=n_bases, replace=False).tolist())
    bases = [instance.site_ids[j] for j in base_idx]
    placements: list[tuple[str, str]] = []
    for type_ in instance.team_types:
        load = {b: sum(1 for s, _t in placements if s == b) for b in bases}
        placed = 0
        for b in bases:
            if placed >= type_.fleet_size:
                break
            capacity = instance.sites[instance.site_index[b]].capacity
            if load[b] < capacity:
                placements.append((b, type_.id))
                placed += 1
    open_bases = {s for s, _t in placements}
    return Deployment.build(open_bases, placements)
