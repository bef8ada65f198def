"""Pairwise interaction risk between traffic entities.

The interaction risk of two entities at a point is the product of their risk
fields: nonzero only where both fields overlap, it factors into a joint
occupancy probability times a joint collision severity. The scalar risk level
of a pair is the spatial maximum of that product, located by a coarse grid
over the overlap of the entities' support regions followed by local grid
refinement around the running argmax.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .ego import EgoParams, ego_width_slope, laplace_values, predict_ego_path
from .errors import GridBudgetError, ValidationError
from .field import (
    MAX_GRID_CELLS,
    FieldParams,
    GridSpec,
    MultimodalPrediction,
    RiskGrid,
    VehicleState,
    gaussian_width,
    prediction_values,
    virtual_mass,
)
from .geometry import TrajectoryGeometry

# Support-hint dilation beyond the trajectory box, in units of the
# cross-section width at the path end.
GAUSSIAN_HINT_WIDTHS = 5.0
LAPLACE_HINT_WIDTHS = 10.0


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box in meters."""

    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def __post_init__(self) -> None:
        if self.xmax < self.xmin or self.ymax < self.ymin:
            raise ValidationError("bounding box extents must be non-negative")

    @classmethod
    def around(cls, pts: np.ndarray, margin: float = 0.0) -> "BoundingBox":
        pts = np.asarray(pts, dtype=np.float64)
        return cls(float(pts[:, 0].min()) - margin, float(pts[:, 1].min()) - margin,
                   float(pts[:, 0].max()) + margin, float(pts[:, 1].max()) + margin)

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    def center(self) -> tuple[float, float]:
        return ((self.xmin + self.xmax) / 2.0, (self.ymin + self.ymax) / 2.0)

    def union(self, other: "BoundingBox") -> "BoundingBox":
        return BoundingBox(min(self.xmin, other.xmin), min(self.ymin, other.ymin),
                           max(self.xmax, other.xmax), max(self.ymax, other.ymax))

    def intersection(self, other: "BoundingBox") -> "BoundingBox | None":
        xmin = max(self.xmin, other.xmin)
        ymin = max(self.ymin, other.ymin)
        xmax = min(self.xmax, other.xmax)
        ymax = min(self.ymax, other.ymax)
        if xmax < xmin or ymax < ymin:
            return None
        return BoundingBox(xmin, ymin, xmax, ymax)

    def contains_mask(self, pts: np.ndarray) -> np.ndarray:
        return ((pts[:, 0] >= self.xmin) & (pts[:, 0] <= self.xmax)
                & (pts[:, 1] >= self.ymin) & (pts[:, 1] <= self.ymax))


@dataclass(frozen=True, eq=False)
class EntityField:
    """Risk field of one entity: a batch point evaluator plus metadata.

    `support_hint` bounds the region holding all non-negligible field mass;
    pair computations are pruned to hint overlaps. `position` is the entity's
    current location, used as a reporting fallback for disjoint pairs.
    """

    entity_id: str
    evaluator: Callable[[np.ndarray], np.ndarray]  # (M, 2) points -> (M,) values
    support_hint: BoundingBox
    position: tuple[float, float]


@dataclass(frozen=True)
class MonitorConfig:
    """Risk monitoring knobs; the alert threshold is deployment-specific and
    therefore has no default."""

    f_thld: float
    grid_resolution: float
    refinement_levels: int = 3

    def __post_init__(self) -> None:
        if self.f_thld < 0:
            raise ValidationError("f_thld must be non-negative")
        if self.grid_resolution <= 0:
            raise ValidationError("grid_resolution must be positive")
        if self.refinement_levels < 0:
            raise ValidationError("refinement_levels must be non-negative")


@dataclass(frozen=True)
class RiskReport:
    """Scalar risk level of an entity pair and where it peaks."""

    pair: tuple[str, str]
    risk: float
    argmax_point: tuple[float, float]
    exceeds_threshold: bool
    grid_resolution_used: float

    def to_dict(self) -> dict:
        return {
            "pair": list(self.pair),
            "risk": self.risk,
            "argmax": [self.argmax_point[0], self.argmax_point[1]],
            "exceeds_threshold": self.exceeds_threshold,
            "grid_resolution_used": self.grid_resolution_used,
        }


def prediction_entity_field(entity_id: str, params: FieldParams,
                            prediction: MultimodalPrediction,
                            state: VehicleState) -> EntityField:
    """Entity field of a predicted (Gaussian-profile) traffic entity."""
    mass = virtual_mass(params, state)

    def evaluator(pts: np.ndarray) -> np.ndarray:
        return prediction_values(params, prediction, pts) * mass

    hint = None
    for mode in prediction.modes:
        geom = mode.geometry
        dilation = GAUSSIAN_HINT_WIDTHS * gaussian_width(
            params, geom.total_length, geom.mean_abs_curvature)
        box = BoundingBox.around(geom.source.points, dilation)
        hint = box if hint is None else hint.union(box)
    return EntityField(entity_id, evaluator, hint, state.position)


def laplace_entity_field(entity_id: str, geom: TrajectoryGeometry, width_slope: float,
                         ego_params: EgoParams, field_params: FieldParams,
                         state: VehicleState) -> EntityField:
    """Entity field with a Laplace profile along an explicit path."""
    mass = virtual_mass(field_params, state)
    q = ego_params.q_ego
    c = ego_params.c_ego

    def evaluator(pts: np.ndarray) -> np.ndarray:
        return laplace_values(geom, q, width_slope, c, pts) * mass

    dilation = LAPLACE_HINT_WIDTHS * (width_slope * geom.total_length + c)
    hint = BoundingBox.around(geom.source.points, dilation)
    return EntityField(entity_id, evaluator, hint, state.position)


def ego_entity_field(entity_id: str, ego_params: EgoParams, field_params: FieldParams,
                     state: VehicleState) -> EntityField:
    """Entity field of the ego vehicle's kinematic rollout.

    A stationary ego has an identically zero field (degenerate support),
    annihilating every interaction it participates in.
    """
    geom = predict_ego_path(state, ego_params)
    if geom is None:
        x, y = state.position
        return EntityField(entity_id, lambda pts: np.zeros(len(pts)),
                           BoundingBox(x, y, x, y), state.position)
    return laplace_entity_field(entity_id, geom, ego_width_slope(ego_params, state),
                                ego_params, field_params, state)


def interaction_risk_at(a: EntityField, b: EntityField, point) -> float:
    """Interaction risk at one point: product of the two risk fields."""
    pt = np.asarray(point, dtype=np.float64).reshape(1, 2)
    return float(a.evaluator(pt)[0] * b.evaluator(pt)[0])


def interaction_risk_grid(a: EntityField, b: EntityField, spec: GridSpec, *,
                          max_cells: int = MAX_GRID_CELLS) -> RiskGrid:
    """Cellwise interaction-risk field over a grid.

    Cells outside the overlap of the support hints are skipped and reported
    as zero; the truncated tail mass there is negligible by construction of
    the hints.
    """
    if spec.cells > max_cells:
        raise GridBudgetError(f"grid has {spec.cells} cells, budget is {max_cells}")
    values = np.zeros(spec.cells)
    box = a.support_hint.intersection(b.support_hint)
    if box is not None:
        centers = spec.cell_centers()
        mask = box.contains_mask(centers)
        if mask.any():
            pts = centers[mask]
            values[mask] = a.evaluator(pts) * b.evaluator(pts)
    return RiskGrid(spec, values.reshape(spec.height, spec.width))


def _pair_values(a: EntityField, b: EntityField, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    return (a.evaluator(pts) * b.evaluator(pts)).reshape(len(ys), len(xs))


def _lex_argmax(values: np.ndarray, xs: np.ndarray, ys: np.ndarray):
    """Greatest value with ties broken by the smallest (i, j) cell index."""
    peak = float(values.max())
    tied = np.argwhere(values == peak)  # rows of (j, i)
    order = tied[:, 1] * len(ys) + tied[:, 0]
    j, i = tied[int(np.argmin(order))]
    return peak, (float(xs[i]), float(ys[j]))


def risk_level(a: EntityField, b: EntityField, config: MonitorConfig) -> RiskReport:
    """Scalar risk level of a pair: spatial maximum of their interaction risk.

    The maximum is located on a grid spanning the support-hint overlap at the
    configured resolution, then sharpened by `refinement_levels` rounds that
    halve the resolution in the 3x3-cell neighbourhood of the running argmax.
    Refinement never lowers the reported maximum. Deterministic, and exactly
    symmetric in the pair.
    """
    pair = tuple(sorted((a.entity_id, b.entity_id)))
    box = a.support_hint.intersection(b.support_hint)
    resolution = config.grid_resolution
    if box is None:
        mid = ((a.position[0] + b.position[0]) / 2.0,
               (a.position[1] + b.position[1]) / 2.0)
        return RiskReport(pair, 0.0, mid, False, resolution)

    nx = max(1, int(math.ceil(box.width / resolution)))
    ny = max(1, int(math.ceil(box.height / resolution)))
    xs = box.xmin + (np.arange(nx) + 0.5) * resolution
    ys = box.ymin + (np.arange(ny) + 0.5) * resolution
    best, best_pt = _lex_argmax(_pair_values(a, b, xs, ys), xs, ys)
    if best <= 0.0:
        return RiskReport(pair, 0.0, box.center(), False, resolution)

    current = resolution
    for _ in range(config.refinement_levels):
        refined = current / 2.0
        xs = best_pt[0] - 1.5 * current + (np.arange(6) + 0.5) * refined
        ys = best_pt[1] - 1.5 * current + (np.arange(6) + 0.5) * refined
        value, point = _lex_argmax(_pair_values(a, b, xs, ys), xs, ys)
        if value > best:
            best, best_pt = value, point
        current = refined
    return RiskReport(pair, best, best_pt, best > config.f_thld, current)


def monitor_all(entities: list[EntityField], config: MonitorConfig) -> list[RiskReport]:
    """Risk reports for every unordered entity pair.

    Pairs with disjoint support hints short-circuit to zero risk. Reports
    come back sorted by risk descending, ties by pair ids.
    """
    if len(entities) < 2:
        raise ValidationError("monitoring needs at least 2 entities")
    ordered = sorted(entities, key=lambda e: e.entity_id)
    reports = [risk_level(a, b, config) for a, b in itertools.combinations(ordered, 2)]
    reports.sort(key=lambda r: (-r.risk, r.pair))
    return reports
