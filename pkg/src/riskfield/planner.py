"""Candidate trajectory sampling and risk-aware ranking for the ego vehicle.

Nine candidates fan out ahead of the ego: the Cartesian product of lateral
intents (left lane change / keep / right lane change) and longitudinal
intents (accelerate / maintain / decelerate). Each candidate carries its own
Laplace risk field, is scored against every surrounding entity's field, and
the fan is ranked by a weighted combination of safety, comfort and
efficiency (lower total is better).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .ego import EgoParams
from .errors import ValidationError
from .field import FieldParams, VehicleState
from .geometry import Polyline2D, TrajectoryGeometry, build_geometry
from .interaction import EntityField, MonitorConfig, laplace_entity_field, risk_level
from . import paths


class LateralIntent(Enum):
    LEFT_CHANGE = 0
    KEEP = 1
    RIGHT_CHANGE = 2


class LongitudinalIntent(Enum):
    DECELERATE = 0
    MAINTAIN = 1
    ACCELERATE = 2


@dataclass(frozen=True)
class PlannerConfig:
    lane_width: float  # m
    horizon: float  # s
    accel_delta: float  # m/s^2 magnitude of the accelerate/decelerate options
    weights: tuple[float, float, float] = (1.0, 0.0, 0.0)  # safety, comfort, efficiency
    points_per_candidate: int = 101

    def __post_init__(self) -> None:
        if self.lane_width <= 0 or self.horizon <= 0 or self.accel_delta <= 0:
            raise ValidationError("lane_width, horizon and accel_delta must be positive")
        w = tuple(float(x) for x in self.weights)
        if len(w) != 3 or any(x < 0 for x in w) or not any(x > 0 for x in w):
            raise ValidationError("weights must be 3 non-negative values, not all zero")
        object.__setattr__(self, "weights", w)
        if self.points_per_candidate < 50:
            raise ValidationError("candidates need at least 50 sample points")


@dataclass(frozen=True)
class CandidateTrajectory:
    lateral_intent: LateralIntent
    longitudinal_intent: LongitudinalIntent
    geometry: TrajectoryGeometry
    terminal_speed: float

    def __post_init__(self) -> None:
        if self.terminal_speed < 0:
            raise ValidationError("terminal speed must be >= 0")


@dataclass(frozen=True)
class CandidateScore:
    """Per-candidate safety/comfort/efficiency metrics; lower total is better.

    comfort and efficiency are normalized to [0, 1] across the candidate set,
    risk_max is normalized likewise before entering the weighted total.
    """

    candidate: CandidateTrajectory
    risk_per_entity: dict[str, float]
    risk_max: float
    comfort: float
    efficiency: float
    total: float


def _longitudinal_plan(velocity: float, horizon: float, accel: float) -> tuple[float, float]:
    """Arc length and terminal speed of a constant-acceleration profile.

    Deceleration profiles truncate at the stopping point instead of rolling
    backwards.
    """
    if accel < 0 and velocity + accel * horizon < 0:
        return velocity * velocity / (2.0 * -accel), 0.0
    return velocity * horizon + 0.5 * accel * horizon * horizon, velocity + accel * horizon


_LATERAL_SIGN = {
    LateralIntent.LEFT_CHANGE: 1.0,
    LateralIntent.KEEP: 0.0,
    LateralIntent.RIGHT_CHANGE: -1.0,
}

_ACCEL_SIGN = {
    LongitudinalIntent.DECELERATE: -1.0,
    LongitudinalIntent.MAINTAIN: 0.0,
    LongitudinalIntent.ACCELERATE: 1.0,
}


def sample_candidates(state: VehicleState, config: PlannerConfig) -> list[CandidateTrajectory]:
    """Sample the nine-candidate fan ahead of the ego vehicle.

    Lateral profiles are quintic shifts to +/- one lane width (zero end slope
    and curvature); longitudinal profiles apply constant acceleration over
    the horizon with speed floored at zero. Every candidate starts at the ego
    pose, heading included.
    """
    if state.velocity <= 0:
        raise ValidationError("candidate sampling requires forward motion")
    candidates = []
    for lateral in LateralIntent:
        shift = _LATERAL_SIGN[lateral] * config.lane_width
        for longitudinal in LongitudinalIntent:
            accel = _ACCEL_SIGN[longitudinal] * config.accel_delta
            length, terminal = _longitudinal_plan(state.velocity, config.horizon, accel)
            pts = paths.lane_change_points(state.position, state.heading, shift, length,
                                           num=config.points_per_candidate)
            candidates.append(CandidateTrajectory(
                lateral_intent=lateral,
                longitudinal_intent=longitudinal,
                geometry=build_geometry(Polyline2D(pts)),
                terminal_speed=terminal,
            ))
    return candidates


def candidate_entity_field(candidate: CandidateTrajectory, state: VehicleState,
                           ego_params: EgoParams, field_params: FieldParams,
                           entity_id: str = "ego") -> EntityField:
    """Laplace risk field carried by a sampled candidate.

    The candidate's total length replaces the kinematic rollout length, and
    its mean absolute curvature stands in for the steering magnitude in the
    width slope: a sampled path has no single steering angle.
    """
    geom = candidate.geometry
    width_slope = ego_params.b_ego + ego_params.k_ego * geom.mean_abs_curvature
    return laplace_entity_field(entity_id, geom, width_slope, ego_params,
                                field_params, state)


def _comfort_raw(candidate: CandidateTrajectory, state: VehicleState,
                 config: PlannerConfig) -> float:
    """Peak lateral jerk proxy of the quintic profile.

    The spatial third derivative peaks at the profile ends; weighting by the
    cube of the larger end speed converts it to a time-domain jerk scale.
    """
    shift = _LATERAL_SIGN[candidate.lateral_intent] * config.lane_width
    if shift == 0.0:
        return 0.0
    accel = _ACCEL_SIGN[candidate.longitudinal_intent] * config.accel_delta
    length, terminal = _longitudinal_plan(state.velocity, config.horizon, accel)
    return paths.quintic_jerk_peak(shift, length) * max(state.velocity, terminal) ** 3


def score_candidates(candidates: list[CandidateTrajectory], entities: list[EntityField],
                     state: VehicleState, ego_params: EgoParams,
                     field_params: FieldParams, config: PlannerConfig,
                     monitor: MonitorConfig) -> list[CandidateScore]:
    """Score every candidate against the surrounding entities.

    Safety is the largest pairwise risk level of the candidate's field
    against any entity; comfort and efficiency are trajectory-intrinsic.
    Normalization across the candidate set happens here, so candidates are
    scored together rather than one at a time.
    """
    risk_maps: list[dict[str, float]] = []
    comfort_raws: list[float] = []
    for candidate in candidates:
        cand_field = candidate_entity_field(candidate, state, ego_params, field_params)
        risk_maps.append({
            entity.entity_id: risk_level(cand_field, entity, monitor).risk
            for entity in entities
        })
        comfort_raws.append(_comfort_raw(candidate, state, config))

    risk_maxes = [max(m.values()) if m else 0.0 for m in risk_maps]
    risk_scale = max(risk_maxes)
    comfort_scale = max(comfort_raws)
    speed_scale = max(c.terminal_speed for c in candidates)
    w_safety, w_comfort, w_efficiency = config.weights

    scores = []
    for candidate, risks, risk_max, comfort_raw in zip(candidates, risk_maps,
                                                       risk_maxes, comfort_raws):
        safety = risk_max / risk_scale if risk_scale > 0 else 0.0
        comfort = comfort_raw / comfort_scale if comfort_scale > 0 else 0.0
        efficiency = 1.0 - candidate.terminal_speed / speed_scale if speed_scale > 0 else 0.0
        total = w_safety * safety + w_comfort * comfort + w_efficiency * efficiency
        scores.append(CandidateScore(candidate, risks, risk_max, comfort, efficiency, total))
    return scores


def rank_candidates(scores: list[CandidateScore]) -> list[CandidateScore]:
    """Order scores ascending by total; best candidate first.

    Ties break by risk, then by intent enum order (left/keep/right, then
    decelerate/maintain/accelerate), keeping the ranking deterministic.
    """
    if len(scores) != 9:
        raise ValidationError("ranking expects the full nine-candidate fan")
    return sorted(scores, key=lambda s: (
        s.total,
        s.risk_max,
        s.candidate.lateral_intent.value,
        s.candidate.longitudinal_intent.value,
    ))
