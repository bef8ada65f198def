"""Kinematic forward prediction of the ego vehicle and its Laplace risk field.

The ego vehicle's future is far less uncertain than other entities': a single
bicycle-model rollout of the current state over a look-ahead horizon replaces
the multimodal prediction, and the Gaussian cross-section is swapped for a
sharper Laplace-like profile with a linearly decaying height.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ValidationError
from .field import UNDERFLOW_EXPONENT, FieldParams, VehicleState, virtual_mass
from .geometry import (
    MIN_SEGMENT_LENGTH,
    Polyline2D,
    TrajectoryGeometry,
    build_geometry,
    project_points,
)
from . import paths

from dataclasses import dataclass

# Steering angles with |tan| below this are treated as driving straight;
# at 60 m range the lateral deviation of such an arc stays under 2 mm.
STRAIGHT_TAN_THRESHOLD = 1e-6


@dataclass(frozen=True)
class EgoParams:
    """Constants of the Laplace ego-field model.

    q_ego: 1/m, slope of the linear cross-section height
    b_ego: width slope base; k_ego: m/rad steering-to-slope gain
    c_ego: m, initial width
    t_la: s, look-ahead horizon of the kinematic rollout
    path_step: m, sampling step of the predicted arc
    """

    q_ego: float = 0.004
    b_ego: float = 0.05
    k_ego: float = 1.0
    c_ego: float = 0.5
    t_la: float = 6.0
    path_step: float = 0.25

    def __post_init__(self) -> None:
        for name in ("q_ego", "b_ego", "k_ego", "c_ego", "t_la", "path_step"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive")
        if self.path_step > 0.5:
            raise ValidationError("path_step must not exceed 0.5 m")


def turning_radius(state: VehicleState) -> float | None:
    """Signed bicycle-model turning radius wheelbase/tan(steering angle).

    Positive radius = left turn. Returns None for straight driving
    (|tan(steering)| below the straight threshold).
    """
    t = math.tan(state.steering_angle)
    if abs(t) < STRAIGHT_TAN_THRESHOLD:
        return None
    return state.wheelbase / t


def predict_ego_path(state: VehicleState, params: EgoParams) -> TrajectoryGeometry | None:
    """Forward-simulate the current state over the look-ahead horizon.

    A straight ray, or a circular arc of the bicycle-model radius, of length
    velocity * t_la, sampled every path_step meters. Returns None for a
    stationary vehicle (the ego field is all-zero then).
    """
    length = state.velocity * params.t_la
    if length <= MIN_SEGMENT_LENGTH:
        return None
    radius = turning_radius(state)
    if radius is None:
        pts = paths.straight_points(state.position, state.heading, length,
                                    step=params.path_step)
    else:
        pts = paths.arc_points(state.position, state.heading, radius, length,
                               step=params.path_step)
    return build_geometry(Polyline2D(pts))


def laplace_height(params: EgoParams, s: float, path_length: float) -> float:
    """Linear cross-section height q_ego*|s - path_length|; zero at the path end."""
    if not 0.0 <= s <= path_length:
        raise ValidationError(f"arc length {s} outside [0, {path_length}]")
    return params.q_ego * abs(s - path_length)


def laplace_width(params: EgoParams, s: float, steering_angle: float) -> float:
    """Linear cross-section width (b_ego + k_ego*|steering|)*s + c_ego."""
    if s < 0:
        raise ValidationError("arc length must be non-negative")
    return (params.b_ego + params.k_ego * abs(steering_angle)) * s + params.c_ego


def laplace_values(geom: TrajectoryGeometry, q: float, width_slope: float,
                   width_intercept: float, pts: np.ndarray) -> np.ndarray:
    """Laplace-profile field height*exp(-|d|/width) along a path, at many points.

    `width_slope` is b_ego + k_ego*|steering| for the kinematic rollout; the
    candidate scorer substitutes the path's mean absolute curvature for the
    steering magnitude.
    """
    s, d, inside = project_points(geom, pts)
    height = q * np.abs(s - geom.total_length)
    lam = width_slope * s + width_intercept
    arg = -np.abs(d) / lam
    vals = np.where(arg < UNDERFLOW_EXPONENT, 0.0, height * np.exp(np.maximum(arg, UNDERFLOW_EXPONENT)))
    return np.where(inside, vals, 0.0)


def ego_width_slope(params: EgoParams, state: VehicleState) -> float:
    return params.b_ego + params.k_ego * abs(state.steering_angle)


def ego_risk_probability(state: VehicleState, params: EgoParams, point) -> float:
    """Laplace occupancy-risk probability of the ego's kinematic rollout.

    Zero outside the rollout's support and zero everywhere for a stationary
    vehicle. Rebuilds the path per call; batch users should precompute the
    path and use `laplace_values`.
    """
    geom = predict_ego_path(state, params)
    if geom is None:
        return 0.0
    pt = np.asarray(point, dtype=np.float64).reshape(1, 2)
    return float(laplace_values(geom, params.q_ego, ego_width_slope(params, state),
                                params.c_ego, pt)[0])


def ego_risk_field_at(state: VehicleState, ego_params: EgoParams,
                      field_params: FieldParams, point) -> float:
    """Ego risk field value: Laplace occupancy probability times virtual mass."""
    return ego_risk_probability(state, ego_params, point) * virtual_mass(field_params, state)
