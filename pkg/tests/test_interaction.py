import math

import numpy as np
import pytest

from riskfield import (
    EgoParams,
    FieldParams,
    GridSpec,
    MonitorConfig,
    MultimodalPrediction,
    Polyline2D,
    PredictedTrajectory,
    ValidationError,
    VehicleState,
    build_geometry,
    ego_entity_field,
    interaction_risk_at,
    interaction_risk_grid,
    monitor_all,
    prediction_entity_field,
    risk_field_at,
    risk_level,
)

PARAMS = FieldParams()
EGO = EgoParams()
CONFIG = MonitorConfig(f_thld=10.0, grid_resolution=0.5, refinement_levels=3)


def straight_entity(entity_id, x0, y0, heading, length=60.0, v=15.0, mass=1500.0):
    x1 = x0 + length * math.cos(heading)
    y1 = y0 + length * math.sin(heading)
    geom = build_geometry(Polyline2D([(x0, y0), (x1, y1)]))
    pred = MultimodalPrediction((PredictedTrajectory(geom, 1.0),))
    state = VehicleState(position=(x0, y0), heading=heading, velocity=v, mass=mass)
    return prediction_entity_field(entity_id, PARAMS, pred, state), pred, state


def head_on_pair():
    a, pred_a, state_a = straight_entity("west", 0.0, 0.0, 0.0)
    b, pred_b, state_b = straight_entity("east", 80.0, 0.0, math.pi)
    return (a, pred_a, state_a), (b, pred_b, state_b)


def test_product_structure_and_commutativity():
    (a, pred_a, state_a), (b, pred_b, state_b) = head_on_pair()
    rng = np.random.default_rng(2)
    for pt in rng.uniform(-10, 90, size=(40, 2)):
        ir = interaction_risk_at(a, b, pt)
        assert ir == interaction_risk_at(b, a, pt)
        expected = (risk_field_at(PARAMS, pred_a, state_a, pt)
                    * risk_field_at(PARAMS, pred_b, state_b, pt))
        assert ir == pytest.approx(expected, rel=1e-15, abs=1e-300)


def test_zero_outside_either_support():
    (a, _, _), (b, _, _) = head_on_pair()
    # the eastbound prediction only spans x in [0, 60]: beyond both, zero
    assert interaction_risk_at(a, b, (200.0, 0.0)) == 0.0
    assert interaction_risk_at(a, b, (-50.0, 0.0)) == 0.0


def test_head_on_overlap_midpoint_is_product_of_fields():
    (a, pred_a, state_a), (b, pred_b, state_b) = head_on_pair()
    point = (40.0, 0.0)
    expected = (risk_field_at(PARAMS, pred_a, state_a, point)
                * risk_field_at(PARAMS, pred_b, state_b, point))
    assert expected > 0
    assert interaction_risk_at(a, b, point) == pytest.approx(expected, rel=1e-15)


def test_interaction_grid_disjoint_hints_all_zero():
    a, _, _ = straight_entity("a", 0.0, 0.0, 0.0, length=20.0)
    b, _, _ = straight_entity("b", 500.0, 500.0, 0.0, length=20.0)
    spec = GridSpec((0.0, -5.0), 1.0, 30, 10)
    grid = interaction_risk_grid(a, b, spec)
    assert np.all(grid.values == 0.0)


def test_interaction_grid_single_cell_matches_point():
    (a, _, _), (b, _, _) = head_on_pair()
    spec = GridSpec((39.5, -0.5), 1.0, 1, 1)
    grid = interaction_risk_grid(a, b, spec)
    assert grid.values[0, 0] == interaction_risk_at(a, b, (40.0, 0.0))


def test_interaction_grid_band_confined_to_overlap():
    (a, _, _), (b, _, _) = head_on_pair()
    spec = GridSpec((-5.0, -4.0), 0.5, 180, 16)
    grid = interaction_risk_grid(a, b, spec)
    xs = spec.x_centers()
    nonzero_cols = np.where(grid.values.max(axis=0) > 1e-12)[0]
    # corridors span [0, 60] and [20, 80]: risk only inside the overlap
    assert xs[nonzero_cols.min()] >= 20.0 - 1.0
    assert xs[nonzero_cols.max()] <= 60.0 + 1.0


def test_risk_level_disjoint_pair():
    a, _, _ = straight_entity("a", 0.0, 0.0, 0.0, length=20.0)
    b, _, _ = straight_entity("b", 500.0, 500.0, 0.0, length=20.0)
    report = risk_level(a, b, CONFIG)
    assert report.risk == 0.0
    assert report.exceeds_threshold is False
    assert report.argmax_point == (250.0, 250.0)


def test_risk_level_symmetry_exact():
    (a, _, _), (b, _, _) = head_on_pair()
    r_ab = risk_level(a, b, CONFIG)
    r_ba = risk_level(b, a, CONFIG)
    assert r_ab.risk == r_ba.risk
    assert r_ab.argmax_point == r_ba.argmax_point
    assert r_ab.pair == r_ba.pair == ("east", "west")


def test_risk_level_head_on_between_vehicles():
    (a, _, _), (b, _, _) = head_on_pair()
    report = risk_level(a, b, CONFIG)
    assert report.risk > 0
    assert 0.0 < report.argmax_point[0] < 80.0
    assert report.exceeds_threshold is True


def test_mass_scaling_doubles_risk_and_keeps_argmax():
    (a, _, _), (b, _, _) = head_on_pair()
    heavy, _, _ = straight_entity("west", 0.0, 0.0, 0.0, mass=3000.0)
    base = risk_level(a, b, CONFIG)
    scaled = risk_level(heavy, b, CONFIG)
    assert scaled.risk == pytest.approx(2 * base.risk, rel=1e-12)
    assert scaled.argmax_point == base.argmax_point


def test_refinement_never_lowers_the_maximum():
    (a, _, _), (b, _, _) = head_on_pair()
    previous = -1.0
    for levels in range(5):
        config = MonitorConfig(f_thld=10.0, grid_resolution=0.5, refinement_levels=levels)
        report = risk_level(a, b, config)
        assert report.risk >= previous
        previous = report.risk


def test_risk_level_matches_brute_force():
    (a, _, _), (b, _, _) = head_on_pair()
    report = risk_level(a, b, CONFIG)
    box = a.support_hint.intersection(b.support_hint)
    xs = np.arange(box.xmin, box.xmax + 0.05, 0.05)
    ys = np.arange(box.ymin, box.ymax + 0.05, 0.05)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    brute = float((a.evaluator(pts) * b.evaluator(pts)).max())
    assert report.risk == pytest.approx(brute, rel=0.02)


def test_stationary_ego_annihilates_interaction():
    ego = ego_entity_field("ego", EGO, PARAMS,
                           VehicleState(position=(30.0, 0.0), heading=0.0, velocity=0.0))
    other, _, _ = straight_entity("car", 0.0, 0.0, 0.0)
    report = risk_level(ego, other, CONFIG)
    assert report.risk == 0.0


def test_monitor_all_pair_counts_and_order():
    entities = [straight_entity(f"car_{n}", 15.0 * n, 0.0, 0.0, length=30.0)[0]
                for n in range(4)]
    reports = monitor_all(entities, CONFIG)
    assert len(reports) == 6
    risks = [r.risk for r in reports]
    assert risks == sorted(risks, reverse=True)
    pairs = {r.pair for r in reports}
    assert len(pairs) == 6

    two = monitor_all(entities[:2], CONFIG)
    assert len(two) == 1

    with pytest.raises(ValidationError):
        monitor_all(entities[:1], CONFIG)


def test_monitor_all_reports_disjoint_pairs_with_zero():
    near_a, _, _ = straight_entity("a", 0.0, 0.0, 0.0, length=30.0)
    near_b, _, _ = straight_entity("b", 10.0, 3.0, 0.0, length=30.0)
    far, _, _ = straight_entity("c", 900.0, 900.0, 0.0, length=30.0)
    reports = monitor_all([near_a, near_b, far], CONFIG)
    assert len(reports) == 3
    by_pair = {r.pair: r for r in reports}
    assert by_pair[("a", "b")].risk > 0
    assert by_pair[("a", "c")].risk == 0.0
    assert by_pair[("b", "c")].risk == 0.0


def test_interaction_grid_budget_enforced():
    from riskfield import GridBudgetError

    (a, _, _), (b, _, _) = head_on_pair()
    spec = GridSpec((0.0, 0.0), 0.01, 4000, 2000)
    with pytest.raises(GridBudgetError):
        interaction_risk_grid(a, b, spec)


def test_monitor_config_validation():
    with pytest.raises(ValidationError):
        MonitorConfig(f_thld=-1.0, grid_resolution=0.5)
    with pytest.raises(ValidationError):
        MonitorConfig(f_thld=0.0, grid_resolution=0.0)
    with pytest.raises(ValidationError):
        MonitorConfig(f_thld=0.0, grid_resolution=0.5, refinement_levels=-1)
