import copy

import numpy as np
import pytest

from teamcover.errors import DeploymentError, ValidationError
from teamcover.instance import (
    Deployment,
    check_deployment,
    is_feasible,
    total_demand,
    validate_instance,
)

from conftest import TINY_DESCRIPTION, make_tiny, random_feasible_deployment, random_instance


def tiny_raw():
    return copy.deepcopy(TINY_DESCRIPTION)


def test_tiny_fixture_validates(tiny):
    assert tiny.type_ids == ("A", "B")
    assert tiny.demand_ids == ("i1", "i2", "i3")
    assert tiny.site_ids == ("j1", "j2")
    np.testing.assert_array_equal(tiny.demand_matrix, [[4, 1, 2], [2, 3, 5]])


def test_total_demand_examples(tiny):
    assert total_demand(tiny) == 17
    zero = tiny_raw()
    for node in zero["demands"]:
        node["demand_per_type"] = {}
    assert total_demand(validate_instance(zero)) == 0
    single = validate_instance({
        "team_types": [{"id": "t", "response_limit_min": 5, "fleet_size": 1}],
        "demands": [{"id": "d", "demand_per_type": {"t": 7}}],
        "sites": [{"id": "s", "capacity": 1}],
        "max_bases": 1,
        "travel_min": [[3.0]],
    })
    assert total_demand(single) == 7


def test_validation_idempotent(tiny):
    again = validate_instance(tiny)
    assert again == tiny
    assert validate_instance(again) == tiny


def test_demand_maps_densified():
    raw = tiny_raw()
    raw["demands"][0]["demand_per_type"] = {"A": 4}  # B omitted
    inst = validate_instance(raw)
    assert inst.demands[0].demand_per_type == {"A": 4, "B": 0}


def test_travel_dimension_mismatch_rejected():
    raw = tiny_raw()
    raw["travel_min"] = [[5, 9], [11, 7]]  # |I| - 1 columns
    with pytest.raises(ValidationError, match="shape"):
        validate_instance(raw)


def test_capacity_above_type_count_rejected():
    raw = tiny_raw()
    raw["sites"][0]["capacity"] = 3
    with pytest.raises(ValidationError, match="j1"):
        validate_instance(raw)


def test_unknown_demand_type_key_rejected():
    raw = tiny_raw()
    raw["demands"][1]["demand_per_type"]["C"] = 1
    with pytest.raises(ValidationError, match="i2"):
        validate_instance(raw)


def test_negative_values_rejected():
    raw = tiny_raw()
    raw["travel_min"][0][1] = -2
    with pytest.raises(ValidationError, match="j1"):
        validate_instance(raw)
    raw = tiny_raw()
    raw["demands"][2]["demand_per_type"]["A"] = -1
    with pytest.raises(ValidationError, match="i3"):
        validate_instance(raw)


def test_max_bases_above_sites_rejected():
    raw = tiny_raw()
    raw["max_bases"] = 3
    with pytest.raises(ValidationError, match="max_bases"):
        validate_instance(raw)


def test_non_finite_travel_rejected():
    raw = tiny_raw()
    raw["travel_min"][1][2] = float("inf")
    with pytest.raises(ValidationError, match="j2"):
        validate_instance(raw)


def test_instance_immutable(tiny):
    with pytest.raises(ValueError):
        tiny.travel_min[0, 0] = 1.0
    with pytest.raises(ValueError):
        tiny.demand_matrix[0, 0] = 9


def test_deployment_checker_accepts_valid(tiny):
    dep = Deployment.build(["j1", "j2"], [("j1", "A"), ("j2", "B")])
    check_deployment(tiny, dep)


@pytest.mark.parametrize("dep,message", [
    (Deployment.build([], [("j1", "A")]), "not open"),
    (Deployment.build(["j1", "j2", "jX"], []), "unknown site"),
    (Deployment.build(["j1"], [("j1", "C")]), "unknown team type"),
])
def test_deployment_checker_rejects(tiny, dep, message):
    with pytest.raises(DeploymentError, match=message):
        check_deployment(tiny, dep)


def test_deployment_checker_resource_limits():
    inst = make_tiny(1)
    over_q = Deployment.build(["j1", "j2"], [("j1", "A"), ("j2", "B")])
    with pytest.raises(DeploymentError, match="budget"):
        check_deployment(inst, over_q)
    raw = tiny_raw()
    raw["sites"][0]["capacity"] = 1
    tight = validate_instance(raw)
    with pytest.raises(DeploymentError, match="capacity"):
        check_deployment(tight, Deployment.build(["j1"], [("j1", "A"), ("j1", "B")]))
    raw = tiny_raw()
    raw["team_types"][0]["fleet_size"] = 1
    fleet = validate_instance(raw)
    with pytest.raises(DeploymentError, match="fleet"):
        check_deployment(fleet, Deployment.build(["j1", "j2"], [("j1", "A"), ("j2", "A")]))


def test_mutation_flips_acceptance():
    """Randomized: a feasible deployment passes; pushing one resource past
    its limit or breaking the open-base coupling flips the verdict."""
    rng = np.random.default_rng(11)
    flips = 0
    for _ in range(60):
        inst = random_instance(rng)
        dep = random_feasible_deployment(rng, inst)
        assert is_feasible(inst, dep)
        placements = sorted(dep.placements)
        if placements and rng.random() < 0.5:
            site, type_id = placements[int(rng.integers(len(placements)))]
            broken = Deployment.build(dep.open_bases - {site}, dep.placements)
            assert not is_feasible(inst, broken)
            flips += 1
        else:
            # force a placement the limits cannot absorb
            team = inst.team_types[0]
            overfull = [(s.id, team.id) for s in inst.sites][: team.fleet_size + 1]
            if len(overfull) <= team.fleet_size:
                continue
            candidate = Deployment.build([s for s, _ in overfull], overfull)
            if len({s for s, _ in overfull}) > inst.max_bases:
                assert not is_feasible(inst, candidate)
                flips += 1
            elif all(inst.sites[inst.site_index[s]].capacity >= 1 for s, _ in overfull):
                assert not is_feasible(inst, candidate)
                flips += 1
    assert flips > 20


def test_travel_csv_loading(tmp_path):
    csv_path = tmp_path / "travel.csv"
    csv_path.write_text("site,i2,i1,i3\nj2,7,11,6\nj1,9,5,12\n")
    raw = tiny_raw()
    raw["travel_min"] = "travel.csv"
    inst = validate_instance(raw, base_dir=tmp_path)
    np.testing.assert_array_equal(inst.travel_min, [[5, 9, 12], [11, 7, 6]])


def test_travel_csv_missing_demand_column(tmp_path):
    csv_path = tmp_path / "travel.csv"
    csv_path.write_text("site,i1,i2\nj1,5,9\nj2,11,7\n")
    raw = tiny_raw()
    raw["travel_min"] = "travel.csv"
    with pytest.raises(ValidationError, match="i3"):
        validate_instance(raw, base_dir=tmp_path)


def test_content_hash_ignores_coordinates_not_data():
    plain = validate_instance(tiny_raw())
    with_coords = make_tiny(2, with_coordinates=True)
    assert plain.content_hash() == with_coords.content_hash()
    bumped = tiny_raw()
    bumped["demands"][0]["demand_per_type"]["A"] = 5
    assert validate_instance(bumped).content_hash() != plain.content_hash()
