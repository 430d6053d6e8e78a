import copy

import numpy as np
import pytest

from teamcover.coverage import build_cover_matrix, evaluate_deployment
from teamcover.errors import ValidationError
from teamcover.instance import Deployment, validate_instance

from conftest import TINY_DESCRIPTION, random_feasible_deployment, random_instance


def unpack_row(cover, u, j, n):
    return [cover.covers(u, j, i) for i in range(n)]


def test_tiny_cover_matrix_cells(tiny):
    cover = build_cover_matrix(tiny)
    a, b = tiny.type_index["A"], tiny.type_index["B"]
    assert unpack_row(cover, a, 0, 3) == [True, True, False]
    assert unpack_row(cover, a, 1, 3) == [False, True, True]
    assert unpack_row(cover, b, 0, 3) == [True, False, False]
    assert unpack_row(cover, b, 1, 3) == [False, True, True]


def test_boundary_time_is_covered():
    raw = copy.deepcopy(TINY_DESCRIPTION)
    raw["travel_min"][0][0] = 10.0  # exactly the A limit
    raw["travel_min"][0][1] = 8.0   # exactly the B limit
    inst = validate_instance(raw)
    cover = build_cover_matrix(inst)
    assert cover.covers(inst.type_index["A"], 0, 0)
    assert cover.covers(inst.type_index["B"], 0, 1)


def test_zero_limit_covers_nothing():
    raw = copy.deepcopy(TINY_DESCRIPTION)
    raw["team_types"][0]["response_limit_min"] = 1e-9
    inst = validate_instance(raw)
    cover = build_cover_matrix(inst)
    u = inst.type_index["A"]
    assert not any(unpack_row(cover, u, 0, 3) + unpack_row(cover, u, 1, 3))


def test_wider_limit_covers_superset():
    rng = np.random.default_rng(21)
    for _ in range(20):
        inst = random_instance(rng)
        cover = build_cover_matrix(inst)
        limits = [t.response_limit_min for t in inst.team_types]
        wide, narrow = (0, 1) if limits[0] >= limits[1] else (1, 0)
        for j in range(inst.n_sites):
            for i in range(inst.n_demands):
                if cover.covers(narrow, j, i):
                    assert cover.covers(wide, j, i)


def test_evaluate_examples(tiny):
    cover = build_cover_matrix(tiny)
    both_j2 = Deployment.build(["j2"], [("j2", "A"), ("j2", "B")])
    report = evaluate_deployment(tiny, cover, both_j2)
    assert report.covered_demand == 11
    assert report.tx_cob == pytest.approx(11 / 17)
    split = Deployment.build(["j1", "j2"], [("j1", "A"), ("j2", "B")])
    assert evaluate_deployment(tiny, cover, split).covered_demand == 13
    empty = evaluate_deployment(tiny, cover, Deployment.empty())
    assert empty.covered_demand == 0
    assert empty.tx_cob == 0.0
    assert empty.tx_red_bases == 1.0


def test_report_flags_and_covering_sites(tiny):
    cover = build_cover_matrix(tiny)
    dep = Deployment.build(["j1", "j2"], [("j1", "A"), ("j2", "B")])
    report = evaluate_deployment(tiny, cover, dep)
    assert report.cover_flags[("i1", "A")] is True
    assert report.cover_flags[("i3", "A")] is False
    assert report.covering_sites[("i2", "B")] == ("j2",)
    assert report.covering_sites[("i1", "B")] == ()
    for key, flag in report.cover_flags.items():
        assert flag == bool(report.covering_sites[key])


def test_unknown_ids_rejected(tiny):
    cover = build_cover_matrix(tiny)
    with pytest.raises(ValidationError, match="unknown site"):
        evaluate_deployment(tiny, cover, Deployment.build(["jX"], [("jX", "A")]))
    with pytest.raises(ValidationError, match="unknown team type"):
        evaluate_deployment(tiny, cover, Deployment.build(["j1"], [("j1", "Z")]))


def naive_reference(instance, deployment):
    """Triple-loop evaluation straight off the travel matrix."""
    covered = 0
    for u, team in enumerate(instance.team_types):
        placed = [instance.site_index[s] for s, t in deployment.placements if t == team.id]
        for i in range(instance.n_demands):
            if any(instance.travel_min[j, i] <= team.response_limit_min for j in placed):
                covered += int(instance.demand_matrix[u, i])
    return covered


def test_matches_naive_reference_on_random_instances():
    rng = np.random.default_rng(22)
    for _ in range(100):
        inst = random_instance(rng, max_demands=20, max_sites=20, max_fleet=4)
        cover = build_cover_matrix(inst)
        dep = random_feasible_deployment(rng, inst)
        report = evaluate_deployment(inst, cover, dep)
        assert report.covered_demand == naive_reference(inst, dep)


def test_adding_placement_never_decreases_coverage():
    rng = np.random.default_rng(23)
    for _ in range(40):
        inst = random_instance(rng)
        cover = build_cover_matrix(inst)
        dep = random_feasible_deployment(rng, inst)
        base = evaluate_deployment(inst, cover, dep).covered_demand
        # try to add one more feasible placement
        for site in inst.sites:
            for team in inst.team_types:
                candidate = (site.id, team.id)
                if candidate in dep.placements:
                    continue
                placed_here = sum(1 for s, _ in dep.placements if s == site.id)
                placed_type = sum(1 for _, t in dep.placements if t == team.id)
                opens = site.id not in dep.open_bases
                if placed_here >= site.capacity or placed_type >= team.fleet_size:
                    continue
                if opens and len(dep.open_bases) >= inst.max_bases:
                    continue
                grown = Deployment.build(
                    dep.open_bases | {site.id}, set(dep.placements) | {candidate}
                )
                assert evaluate_deployment(inst, cover, grown).covered_demand >= base


def test_permutation_invariance():
    rng = np.random.default_rng(24)
    raw = copy.deepcopy(TINY_DESCRIPTION)
    inst = validate_instance(raw)
    cover = build_cover_matrix(inst)
    dep = Deployment.build(["j1", "j2"], [("j1", "A"), ("j2", "B")])
    base = evaluate_deployment(inst, cover, dep).covered_demand
    for _ in range(5):
        permuted = copy.deepcopy(raw)
        d_order = rng.permutation(3).tolist()
        s_order = rng.permutation(2).tolist()
        permuted["demands"] = [raw["demands"][k] for k in d_order]
        permuted["sites"] = [raw["sites"][k] for k in s_order]
        permuted["travel_min"] = [
            [raw["travel_min"][j][i] for i in d_order] for j in s_order
        ]
        inst_p = validate_instance(permuted)
        cover_p = build_cover_matrix(inst_p)
        assert evaluate_deployment(inst_p, cover_p, dep).covered_demand == base
