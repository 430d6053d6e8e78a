import numpy as np
import pytest

from teamcover.instance import Deployment, Instance, validate_instance

TINY_DESCRIPTION = {
    "team_types": [
        {"id": "A", "response_limit_min": 10, "fleet_size": 1},
        {"id": "B", "response_limit_min": 8, "fleet_size": 1},
    ],
    "demands": [
        {"id": "i1", "demand_per_type": {"A": 4, "B": 2}},
        {"id": "i2", "demand_per_type": {"A": 1, "B": 3}},
        {"id": "i3", "demand_per_type": {"A": 2, "B": 5}},
    ],
    "sites": [
        {"id": "j1", "capacity": 2},
        {"id": "j2", "capacity": 2},
    ],
    "max_bases": 2,
    "travel_min": [[5, 9, 12], [11, 7, 6]],
}


def tiny_description(max_bases=2, with_coordinates=False):
    import copy

    raw = copy.deepcopy(TINY_DESCRIPTION)
    raw["max_bases"] = max_bases
    if with_coordinates:
        coords = {
            "i1": [-19.90, -43.95], "i2": [-19.92, -43.93], "i3": [-19.94, -43.91],
            "j1": [-19.91, -43.94], "j2": [-19.93, -43.92],
        }
        for entry in raw["demands"] + raw["sites"]:
            entry["coordinates"] = coords[entry["id"]]
    return raw


def make_tiny(max_bases=2, with_coordinates=False) -> Instance:
    return validate_instance(tiny_description(max_bases, with_coordinates))


@pytest.fixture
def tiny() -> Instance:
    return make_tiny(2)


@pytest.fixture
def tiny_q1() -> Instance:
    return make_tiny(1)


def random_instance(rng: np.random.Generator, max_demands=8, max_sites=6,
                    n_types=2, max_fleet=2, max_demand=9) -> Instance:
    """Small random instance inside the oracle guard."""
    n_i = int(rng.integers(1, max_demands + 1))
    n_j = int(rng.integers(1, max_sites + 1))
    types = [
        {
            "id": f"t{u}",
            "response_limit_min": float(rng.uniform(2.0, 12.0)),
            "fleet_size": int(rng.integers(0, max_fleet + 1)),
        }
        for u in range(n_types)
    ]
    if all(t["fleet_size"] == 0 for t in types):
        types[0]["fleet_size"] = 1
    demands = [
        {
            "id": f"i{i}",
            "demand_per_type": {f"t{u}": int(rng.integers(0, max_demand + 1)) for u in range(n_types)},
        }
        for i in range(n_i)
    ]
    sites = [{"id": f"j{j}", "capacity": int(rng.integers(1, n_types + 1))} for j in range(n_j)]
    return validate_instance({
        "team_types": types,
        "demands": demands,
        "sites": sites,
        "max_bases": int(rng.integers(0, n_j + 1)),
        "travel_min": rng.uniform(0.0, 15.0, (n_j, n_i)).round(2).tolist(),
    })


def random_feasible_deployment(rng: np.random.Generator, instance: Instance) -> Deployment:
    """Random feasible deployment built by shuffled feasible insertions."""
    candidates = [
        (site.id, team.id) for site in instance.sites for team in instance.team_types
    ]
    order = rng.permutation(len(candidates))
    placements: list[tuple[str, str]] = []
    load: dict[str, int] = {}
    per_type: dict[str, int] = {}
    open_bases: set[str] = set()
    for k in order:
        site_id, type_id = candidates[int(k)]
        site = instance.sites[instance.site_index[site_id]]
        team = instance.team_types[instance.type_index[type_id]]
        if per_type.get(type_id, 0) >= team.fleet_size:
            continue
        if load.get(site_id, 0) >= site.capacity:
            continue
        if site_id not in open_bases and len(open_bases) >= instance.max_bases:
            continue
        if rng.random() < 0.35:
            continue
        placements.append((site_id, type_id))
        load[site_id] = load.get(site_id, 0) + 1
        per_type[type_id] = per_type.get(type_id, 0) + 1
        open_bases.add(site_id)
    return Deployment.build(open_bases, placements)
