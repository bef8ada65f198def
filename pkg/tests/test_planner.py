import math

import numpy as np
import pytest

from riskfield import (
    EgoParams,
    FieldParams,
    LateralIntent,
    LongitudinalIntent,
    MonitorConfig,
    MultimodalPrediction,
    PlannerConfig,
    Polyline2D,
    PredictedTrajectory,
    ValidationError,
    VehicleState,
    build_geometry,
    prediction_entity_field,
    rank_candidates,
    sample_candidates,
    score_candidates,
)

PARAMS = FieldParams()
EGO = EgoParams()
MONITOR = MonitorConfig(f_thld=50.0, grid_resolution=0.5, refinement_levels=3)
CONFIG = PlannerConfig(lane_width=3.75, horizon=6.0, accel_delta=2.0,
                       weights=(1.0, 0.0, 0.0))


def ego_state(v=15.0, heading=0.0, pos=(0.0, 0.0)):
    return VehicleState(position=pos, heading=heading, velocity=v, mass=1500.0)


def lead_entity(x0=30.0, length=25.0):
    geom = build_geometry(Polyline2D([(x0, 0.0), (x0 + length, 0.0)]))
    pred = MultimodalPrediction((PredictedTrajectory(geom, 1.0),))
    state = VehicleState(position=(x0, 0.0), heading=0.0, velocity=10.0, mass=1500.0)
    return prediction_entity_field("lead", PARAMS, pred, state)


def by_intents(items, lateral, longitudinal):
    for item in items:
        cand = item.candidate if hasattr(item, "candidate") else item
        if cand.lateral_intent is lateral and cand.longitudinal_intent is longitudinal:
            return item
    raise AssertionError("candidate not found")


def test_nine_distinct_candidates():
    candidates = sample_candidates(ego_state(), CONFIG)
    assert len(candidates) == 9
    intents = {(c.lateral_intent, c.longitudinal_intent) for c in candidates}
    assert len(intents) == 9


def test_keep_maintain_is_straight_segment():
    candidates = sample_candidates(ego_state(v=15.0), CONFIG)
    keep = by_intents(candidates, LateralIntent.KEEP, LongitudinalIntent.MAINTAIN)
    assert keep.geometry.total_length == pytest.approx(90.0, abs=1e-9)
    assert np.all(np.abs(keep.geometry.source.points[:, 1]) <= 1e-12)
    assert keep.terminal_speed == 15.0


def test_constant_acceleration_lengths():
    candidates = sample_candidates(ego_state(v=15.0), CONFIG)
    accel = by_intents(candidates, LateralIntent.KEEP, LongitudinalIntent.ACCELERATE)
    decel = by_intents(candidates, LateralIntent.KEEP, LongitudinalIntent.DECELERATE)
    assert accel.geometry.total_length == pytest.approx(15 * 6 + 0.5 * 2 * 36, abs=1e-9)
    assert decel.geometry.total_length == pytest.approx(15 * 6 - 0.5 * 2 * 36, abs=1e-9)
    assert accel.terminal_speed == 27.0
    assert decel.terminal_speed == 3.0


def test_deceleration_truncates_at_stop():
    candidates = sample_candidates(ego_state(v=5.0), CONFIG)
    decel = by_intents(candidates, LateralIntent.KEEP, LongitudinalIntent.DECELERATE)
    assert decel.terminal_speed == 0.0
    # v^2 / (2 a): the lateral profile adds nothing for KEEP
    assert decel.geometry.total_length == pytest.approx(25.0 / 4.0, abs=1e-9)


def test_lane_change_terminal_offset():
    heading = 0.35
    candidates = sample_candidates(ego_state(v=15.0, heading=heading, pos=(4.0, -1.0)),
                                   CONFIG)
    for lateral, sign in [(LateralIntent.LEFT_CHANGE, 1.0),
                          (LateralIntent.RIGHT_CHANGE, -1.0)]:
        cand = by_intents(candidates, lateral, LongitudinalIntent.MAINTAIN)
        end = cand.geometry.source.points[-1]
        # lateral offset in the ego frame
        dx, dy = end[0] - 4.0, end[1] + 1.0
        offset = -math.sin(heading) * dx + math.cos(heading) * dy
        assert offset == pytest.approx(sign * CONFIG.lane_width, abs=1e-9)


def test_candidates_start_at_pose_with_heading():
    heading = -0.8
    pos = (12.0, 7.0)
    candidates = sample_candidates(ego_state(v=12.0, heading=heading, pos=pos), CONFIG)
    for cand in candidates:
        first, second = cand.geometry.source.points[:2]
        assert math.hypot(first[0] - pos[0], first[1] - pos[1]) < 1e-9
        seg_heading = math.atan2(second[1] - first[1], second[0] - first[0])
        delta = (seg_heading - heading + math.pi) % (2 * math.pi) - math.pi
        assert abs(delta) < 1e-9


def test_sampling_density_configurable():
    config = PlannerConfig(lane_width=3.75, horizon=6.0, accel_delta=2.0,
                           weights=(1.0, 0.0, 0.0), points_per_candidate=64)
    candidates = sample_candidates(ego_state(), config)
    assert all(len(c.geometry.source.points) >= 50 for c in candidates)
    with pytest.raises(ValidationError):
        PlannerConfig(lane_width=3.75, horizon=6.0, accel_delta=2.0,
                      points_per_candidate=10)


def test_zero_velocity_rejected():
    with pytest.raises(ValidationError):
        sample_candidates(ego_state(v=0.0), CONFIG)


def test_no_entities_scores_zero_risk():
    candidates = sample_candidates(ego_state(), CONFIG)
    config = PlannerConfig(lane_width=3.75, horizon=6.0, accel_delta=2.0,
                           weights=(1.0, 1.0, 1.0))
    scores = score_candidates(candidates, [], ego_state(), EGO, PARAMS, config, MONITOR)
    assert all(s.risk_max == 0.0 for s in scores)
    ranked = rank_candidates(scores)
    # with no safety signal, comfort and efficiency decide: keeping the lane
    # while decelerating is the most comfortable, accelerating most efficient
    assert ranked[0].candidate.lateral_intent is LateralIntent.KEEP


def test_weight_scaling_leaves_ranking_unchanged():
    candidates = sample_candidates(ego_state(), CONFIG)
    entity = lead_entity()
    base_cfg = PlannerConfig(lane_width=3.75, horizon=6.0, accel_delta=2.0,
                             weights=(1.0, 0.5, 0.25))
    double_cfg = PlannerConfig(lane_width=3.75, horizon=6.0, accel_delta=2.0,
                               weights=(2.0, 1.0, 0.5))
    base = rank_candidates(score_candidates(
        candidates, [entity], ego_state(), EGO, PARAMS, base_cfg, MONITOR))
    doubled = rank_candidates(score_candidates(
        candidates, [entity], ego_state(), EGO, PARAMS, double_cfg, MONITOR))
    order = [(s.candidate.lateral_intent, s.candidate.longitudinal_intent) for s in base]
    order2 = [(s.candidate.lateral_intent, s.candidate.longitudinal_intent) for s in doubled]
    assert order == order2


def test_safety_only_ranking_follows_risk():
    candidates = sample_candidates(ego_state(), CONFIG)
    scores = score_candidates(candidates, [lead_entity()], ego_state(), EGO, PARAMS,
                              CONFIG, MONITOR)
    ranked = rank_candidates(scores)
    risks = [s.risk_max for s in ranked]
    assert risks == sorted(risks)


def test_tie_break_enum_order():
    candidates = sample_candidates(ego_state(), CONFIG)
    scores = score_candidates(candidates, [], ego_state(), EGO, PARAMS, CONFIG, MONITOR)
    # no entities and safety-only weights: every total is zero
    assert all(s.total == 0.0 for s in scores)
    ranked = rank_candidates(scores)
    expected = [(lat, lon) for lat in LateralIntent for lon in LongitudinalIntent]
    got = [(s.candidate.lateral_intent, s.candidate.longitudinal_intent) for s in ranked]
    assert got == expected


def test_decelerating_lead_prefers_deceleration():
    candidates = sample_candidates(ego_state(), CONFIG)
    scores = score_candidates(candidates, [lead_entity()], ego_state(), EGO, PARAMS,
                              CONFIG, MONITOR)
    ranked = rank_candidates(scores)
    assert ranked[0].candidate.longitudinal_intent is LongitudinalIntent.DECELERATE
    accel = by_intents(scores, LateralIntent.KEEP, LongitudinalIntent.ACCELERATE)
    decel = by_intents(scores, LateralIntent.KEEP, LongitudinalIntent.DECELERATE)
    assert accel.risk_max > decel.risk_max


def test_rank_requires_full_fan():
    candidates = sample_candidates(ego_state(), CONFIG)
    scores = score_candidates(candidates, [], ego_state(), EGO, PARAMS, CONFIG, MONITOR)
    with pytest.raises(ValidationError):
        rank_candidates(scores[:5])


def test_config_validation():
    with pytest.raises(ValidationError):
        PlannerConfig(lane_width=0.0, horizon=6.0, accel_delta=2.0)
    with pytest.raises(ValidationError):
        PlannerConfig(lane_width=3.75, horizon=6.0, accel_delta=2.0,
                      weights=(0.0, 0.0, 0.0))
    with pytest.raises(ValidationError):
        PlannerConfig(lane_width=3.75, horizon=6.0, accel_delta=2.0,
                      weights=(-1.0, 0.0, 1.0))
