"""Risk field of one traffic entity built from its predicted trajectories.

The occupancy-probability field of a predicted trajectory is a torus with a
Gaussian cross-section in trajectory coordinates: height decays as a parabola
toward the trajectory end, width grows linearly with arc length (faster for
curvier paths). Multimodal predictions combine modes as a probability-weighted
mixture, and scaling by the entity's virtual mass yields its risk field.

All functions are pure; grids are evaluated by the identical point routine so
grid cells and single-point queries agree bitwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import GridBudgetError, ValidationError
from .geometry import TrajectoryGeometry, project_points

# Exponent arguments below this evaluate to exactly zero (denormal guard).
UNDERFLOW_EXPONENT = -700.0

# Default cell budget for grid evaluations.
MAX_GRID_CELLS = 4_000_000


@dataclass(frozen=True)
class FieldParams:
    """Constants of the Gaussian risk-field model.

    q: 1/m^2, steepness of the parabolic cross-section height
    b: width slope base (dimensionless)
    k: m, curvature-to-width-slope gain
    c: m, initial cross-section width
    alpha, beta, gamma: virtual-mass speed law m*T*(alpha*v^beta + gamma)
    """

    q: float = 0.0001
    b: float = 0.04
    k: float = 1.0
    c: float = 0.5
    alpha: float = 1.566e-14
    beta: float = 6.687
    gamma: float = 0.3345

    def __post_init__(self) -> None:
        if self.q <= 0 or self.c <= 0:
            raise ValidationError("q and c must be positive")
        if self.b < 0 or self.k < 0 or self.alpha < 0 or self.gamma < 0:
            raise ValidationError("b, k, alpha and gamma must be non-negative")


@dataclass(frozen=True)
class VehicleState:
    """Pose and physical state of one traffic entity (SI units)."""

    position: tuple[float, float]
    heading: float  # rad
    velocity: float  # m/s
    steering_angle: float = 0.0  # rad
    wheelbase: float = 2.8  # m
    mass: float = 1500.0  # kg
    type_factor: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "position", (float(self.position[0]), float(self.position[1])))
        if self.velocity < 0:
            raise ValidationError("velocity must be >= 0")
        if self.wheelbase <= 0:
            raise ValidationError("wheelbase must be positive")
        if self.mass <= 0:
            raise ValidationError("mass must be positive")
        if self.type_factor <= 0:
            raise ValidationError("type_factor must be positive")
        if not abs(self.steering_angle) < math.pi / 2:
            raise ValidationError("steering angle must lie within (-pi/2, pi/2)")


@dataclass(frozen=True)
class PredictedTrajectory:
    """One predicted path with its mode probability."""

    geometry: TrajectoryGeometry
    probability: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.probability <= 1.0:
            raise ValidationError("mode probability must lie in [0, 1]")


@dataclass(frozen=True)
class MultimodalPrediction:
    """Non-empty set of predicted trajectories with probabilities summing to 1."""

    modes: tuple[PredictedTrajectory, ...]

    MAX_MODES = 16

    def __post_init__(self) -> None:
        modes = tuple(self.modes)
        if not 1 <= len(modes) <= self.MAX_MODES:
            raise ValidationError(f"prediction needs 1..{self.MAX_MODES} modes")
        total = sum(m.probability for m in modes)
        if abs(total - 1.0) > 1e-6:
            raise ValidationError(
                f"mode probabilities sum to {total:.6f}; normalize with from_raw()"
            )
        object.__setattr__(self, "modes", modes)

    @classmethod
    def from_raw(cls, modes) -> "MultimodalPrediction":
        """Build a prediction from possibly-unnormalized mode probabilities.

        Predictor outputs are often unnormalized after truncation to the top
        modes; sums within 0.05 of 1 are rescaled, larger deviations rejected.
        """
        modes = tuple(modes)
        if not modes:
            raise ValidationError("prediction needs at least one mode")
        total = sum(m.probability for m in modes)
        if abs(total - 1.0) > 0.05:
            raise ValidationError(
                f"mode probabilities sum to {total:.6f}, outside 1 +/- 0.05"
            )
        return cls(tuple(replace(m, probability=m.probability / total) for m in modes))


@dataclass(frozen=True)
class GridSpec:
    """Rectangular evaluation grid; cell (i, j) center sits at
    origin + ((i + 0.5) * resolution, (j + 0.5) * resolution)."""

    origin: tuple[float, float]
    resolution: float
    width: int
    height: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))
        object.__setattr__(self, "width", int(self.width))
        object.__setattr__(self, "height", int(self.height))
        if self.resolution <= 0:
            raise ValidationError("grid resolution must be positive")
        if self.width < 1 or self.height < 1:
            raise ValidationError("grid needs at least one cell per axis")

    @property
    def cells(self) -> int:
        return self.width * self.height

    def x_centers(self) -> np.ndarray:
        return self.origin[0] + (np.arange(self.width) + 0.5) * self.resolution

    def y_centers(self) -> np.ndarray:
        return self.origin[1] + (np.arange(self.height) + 0.5) * self.resolution

    def cell_centers(self) -> np.ndarray:
        """All cell centers, flattened row-major (row j outer, column i inner)."""
        xs = self.x_centers()
        ys = self.y_centers()
        gx, gy = np.meshgrid(xs, ys)
        return np.column_stack([gx.ravel(), gy.ravel()])


@dataclass(frozen=True, eq=False)
class RiskGrid:
    """Sampled scalar risk field; values[j, i] belongs to cell (i, j)."""

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (self.spec.height, self.spec.width):
            raise ValidationError(
                f"values shape {vals.shape} does not match grid "
                f"{(self.spec.height, self.spec.width)}"
            )
        if not np.all(np.isfinite(vals)) or np.any(vals < 0):
            raise ValidationError("grid values must be finite and non-negative")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def origin(self) -> tuple[float, float]:
        return self.spec.origin

    @property
    def resolution(self) -> float:
        return self.spec.resolution

    @property
    def width(self) -> int:
        return self.spec.width

    @property
    def height(self) -> int:
        return self.spec.height


def gaussian_height(params: FieldParams, s: float, path_length: float) -> float:
    """Parabolic cross-section height q*(s - path_length)^2.

    Maximal at the entity (s = 0), exactly zero at the trajectory end.
    """
    if not 0.0 <= s <= path_length:
        raise ValidationError(f"arc length {s} outside [0, {path_length}]")
    return params.q * (s - path_length) ** 2


def gaussian_width(params: FieldParams, s: float, mean_abs_curvature: float) -> float:
    """Linear cross-section width (b + k*kappa_mean)*s + c.

    Grows along the trajectory: prediction uncertainty disperses with
    distance, and faster for curvier paths.
    """
    if s < 0 or mean_abs_curvature < 0:
        raise ValidationError("arc length and mean curvature must be non-negative")
    return (params.b + params.k * mean_abs_curvature) * s + params.c


def _gaussian_mode_values(params: FieldParams, geom: TrajectoryGeometry,
                          pts: np.ndarray) -> np.ndarray:
    """Unweighted Gaussian-profile field of a single mode at many points."""
    s, d, inside = project_points(geom, pts)
    height = params.q * (s - geom.total_length) ** 2
    sigma = (params.b + params.k * geom.mean_abs_curvature) * s + params.c
    arg = -(d * d) / (2.0 * sigma * sigma)
    vals = np.where(arg < UNDERFLOW_EXPONENT, 0.0, height * np.exp(np.maximum(arg, UNDERFLOW_EXPONENT)))
    return np.where(inside, vals, 0.0)


def prediction_values(params: FieldParams, prediction: MultimodalPrediction,
                      pts: np.ndarray) -> np.ndarray:
    """Probability-weighted mixture field of a multimodal prediction."""
    pts = np.asarray(pts, dtype=np.float64)
    total = np.zeros(len(pts))
    for mode in prediction.modes:
        total += mode.probability * _gaussian_mode_values(params, mode.geometry, pts)
    return total


def mode_risk_probability(params: FieldParams, traj: PredictedTrajectory, point) -> float:
    """Occupancy-risk probability of a single predicted trajectory at a point.

    Points projecting outside [0, path length] contribute exactly zero: the
    parabolic height would grow again past its root, which is unphysical.
    """
    pt = np.asarray(point, dtype=np.float64).reshape(1, 2)
    return float(_gaussian_mode_values(params, traj.geometry, pt)[0])


def risk_probability(params: FieldParams, prediction: MultimodalPrediction, point) -> float:
    """Complete occupancy-risk probability: probability-weighted mode mixture."""
    pt = np.asarray(point, dtype=np.float64).reshape(1, 2)
    return float(prediction_values(params, prediction, pt)[0])


def virtual_mass(params: FieldParams, state: VehicleState) -> float:
    """Consequence severity m*T*(alpha*v^beta + gamma).

    Couples mass, vehicle type and speed; strictly increasing in speed.
    Speed is taken in m/s; with the default alpha/beta the speed term only
    matters above roughly 50 m/s.
    """
    v = state.velocity
    return state.mass * state.type_factor * (params.alpha * v ** params.beta + params.gamma)


def risk_field_at(params: FieldParams, prediction: MultimodalPrediction,
                  state: VehicleState, point) -> float:
    """Risk field value: occupancy probability times virtual mass."""
    return risk_probability(params, prediction, point) * virtual_mass(params, state)


def risk_field_grid(params: FieldParams, prediction: MultimodalPrediction,
                    state: VehicleState, spec: GridSpec, *,
                    max_cells: int = MAX_GRID_CELLS) -> RiskGrid:
    """Risk field sampled at every cell center of the grid.

    Uses the identical evaluation path as `risk_field_at`, so cell values
    match single-point queries bitwise. Deterministic and independent of any
    evaluation order.
    """
    if spec.cells > max_cells:
        raise GridBudgetError(f"grid has {spec.cells} cells, budget is {max_cells}")
    vals = prediction_values(params, prediction, spec.cell_centers())
    vals = vals * virtual_mass(params, state)
    return RiskGrid(spec, vals.reshape(spec.height, spec.width))
