import numpy as np
import pytest

from teamcover.coverage import build_cover_matrix, evaluate_deployment
from teamcover.errors import ValidationError
from teamcover.instance import Deployment, total_demand, validate_instance
from teamcover.oracle import brute_force_scalarized
from teamcover.pareto import ParetoPoint, pareto_filter, scalarized_objective, sweep_lambda
from teamcover.solver import solve_exact

from conftest import random_instance


def test_scalarized_examples(tiny):
    cover = build_cover_matrix(tiny)
    one_base = evaluate_deployment(
        tiny, cover, Deployment.build(["j2"], [("j2", "A"), ("j2", "B")])
    )
    assert scalarized_objective(one_base, 1.0) == pytest.approx(11 / 17)
    empty = evaluate_deployment(tiny, cover, Deployment.empty())
    assert scalarized_objective(empty, 0.0) == 1.0
    assert scalarized_objective(one_base, 0.6) == pytest.approx(0.6 * 11 / 17 + 0.4 * 0.5)
    assert scalarized_objective(one_base, 0.6) == pytest.approx(0.5882, abs=1e-4)


def test_scalarized_rejects_bad_inputs(tiny):
    cover = build_cover_matrix(tiny)
    report = evaluate_deployment(tiny, cover, Deployment.empty())
    with pytest.raises(ValidationError):
        scalarized_objective(report, 1.5)
    zero = validate_instance({
        "team_types": [{"id": "A", "response_limit_min": 5, "fleet_size": 1}],
        "demands": [{"id": "i", "demand_per_type": {"A": 0}}],
        "sites": [{"id": "j", "capacity": 1}],
        "max_bases": 1,
        "travel_min": [[1.0]],
    })
    zero_cover = build_cover_matrix(zero)
    zero_report = evaluate_deployment(zero, zero_cover, Deployment.empty())
    with pytest.raises(ValidationError):
        scalarized_objective(zero_report, 0.5)


def test_sweep_endpoints_and_interior(tiny):
    cover = build_cover_matrix(tiny)
    points = sweep_lambda(tiny, cover, 101, jobs=1)
    assert len(points) == 101
    assert points[0].lam == 0.0 and points[-1].lam == 1.0
    assert (points[0].f1_tx_cob, points[0].f2_tx_red_bases) == (0.0, 1.0)
    assert points[-1].f1_tx_cob == pytest.approx(13 / 17)
    assert points[-1].f2_tx_red_bases == 0.0
    mid = points[60]  # lambda = 0.60 picks the one-base deployment
    assert mid.f1_tx_cob == pytest.approx(11 / 17)
    assert mid.f2_tx_red_bases == 0.5
    assert mid.scalar_score == pytest.approx(0.6 * 11 / 17 + 0.4 * 0.5)


def test_sweep_rejects_degenerate_grid(tiny):
    cover = build_cover_matrix(tiny)
    with pytest.raises(ValidationError):
        sweep_lambda(tiny, cover, 1, jobs=1)


def test_tiny_front_is_exactly_three_points(tiny):
    cover = build_cover_matrix(tiny)
    front = pareto_filter(sweep_lambda(tiny, cover, 101, jobs=1))
    assert [(p.f1_tx_cob, p.f2_tx_red_bases) for p in front] == [
        (0.0, 1.0), (11 / 17, 0.5), (13 / 17, 0.0),
    ]


def test_filter_rules():
    def point(lam, f1, f2):
        return ParetoPoint(lam, f1, f2, 0.0, Deployment.empty())

    dominated = pareto_filter([point(0.1, 0.5, 0.5), point(0.2, 0.6, 0.5)])
    assert [(p.f1_tx_cob, p.f2_tx_red_bases) for p in dominated] == [(0.6, 0.5)]

    duplicates = pareto_filter([point(0.4, 0.5, 0.5), point(0.2, 0.5, 0.5)])
    assert len(duplicates) == 1 and duplicates[0].lam == 0.2

    mixed = pareto_filter([point(0.0, 0.2, 0.9), point(0.5, 0.6, 0.4), point(1.0, 0.9, 0.1)])
    assert len(mixed) == 3  # mutually non-dominated, all kept
    assert [p.f1_tx_cob for p in mixed] == sorted(p.f1_tx_cob for p in mixed)


def test_filter_output_mutually_non_dominated_random_clouds():
    rng = np.random.default_rng(41)
    for _ in range(100):
        cloud = [
            ParetoPoint(float(rng.random()), float(rng.random()), float(rng.random()),
                        0.0, Deployment.empty())
            for _ in range(int(rng.integers(1, 40)))
        ]
        front = pareto_filter(cloud)
        for a in front:
            for b in front:
                if a is b:
                    continue
                assert not (
                    a.f1_tx_cob >= b.f1_tx_cob
                    and a.f2_tx_red_bases >= b.f2_tx_red_bases
                    and (a.f1_tx_cob, a.f2_tx_red_bases) != (b.f1_tx_cob, b.f2_tx_red_bases)
                )
        # every input weakly dominated by some output point
        for p in cloud:
            assert any(
                f.f1_tx_cob >= p.f1_tx_cob and f.f2_tx_red_bases >= p.f2_tx_red_bases
                for f in front
            )


def test_sweep_matches_scalar_oracle_on_random_instances():
    rng = np.random.default_rng(42)
    checked = 0
    for _ in range(12):
        inst = random_instance(rng, max_demands=5, max_sites=4)
        if total_demand(inst) == 0:
            continue
        cover = build_cover_matrix(inst)
        points = sweep_lambda(inst, cover, 11, jobs=1)
        for p in points:
            score, _f1, _f2, _dep = brute_force_scalarized(inst, p.lam)
            assert p.scalar_score == pytest.approx(score, abs=1e-9)
            checked += 1
    assert checked > 50


def test_lambda_one_matches_mono_objective_optimum():
    rng = np.random.default_rng(43)
    for _ in range(15):
        inst = random_instance(rng, max_demands=6, max_sites=5)
        if total_demand(inst) == 0:
            continue
        cover = build_cover_matrix(inst)
        points = sweep_lambda(inst, cover, 5, jobs=1)
        mono = solve_exact(inst, cover).report.covered_demand
        assert points[-1].f1_tx_cob == pytest.approx(mono / total_demand(inst))


def test_exact_front_points_on_convex_hull(tiny):
    """No filtered exact point may lie below the segment joining its
    neighbours (weighted-sum solutions sit on the convex hull)."""
    cover = build_cover_matrix(tiny)
    front = pareto_filter(sweep_lambda(tiny, cover, 101, jobs=1))
    pts = [(p.f1_tx_cob, p.f2_tx_red_bases) for p in front]
    for k in range(1, len(pts) - 1):
        (x0, y0), (x1, y1), (x2, y2) = pts[k - 1], pts[k], pts[k + 1]
        if x2 == x0:
            continue
        interpolated = y0 + (y2 - y0) * (x1 - x0) / (x2 - x0)
        assert y1 >= interpolated - 1e-12


def test_parallel_sweep_matches_serial(tiny):
    cover = build_cover_matrix(tiny)
    serial = sweep_lambda(tiny, cover, 21, jobs=1)
    parallel = sweep_lambda(tiny, cover, 21, jobs=2)
    assert [(p.lam, p.f1_tx_cob, p.f2_tx_red_bases, p.deployment) for p in serial] == [
        (p.lam, p.f1_tx_cob, p.f2_tx_red_bases, p.deployment) for p in parallel
    ]
