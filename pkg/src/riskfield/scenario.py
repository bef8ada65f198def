"""Scenario files: schema, validation, synthetic predictions and grids.

A scenario is a JSON document describing traffic entities (with either inline
multimodal predictions or synthetic-predictor templates), an evaluation grid,
monitoring thresholds and optional planner settings. Inline predictions are
the integration boundary where a real predictor's output drops in; templates
synthesize deterministic lane-change / turn / straight mode shapes for
designed scenes.

Validation failures always name the JSON path of the offending field.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from enum import Enum

from .errors import ScenarioError, ValidationError
from .field import GridSpec, MultimodalPrediction, PredictedTrajectory, VehicleState
from .geometry import Polyline2D, build_geometry
from .interaction import BoundingBox, MonitorConfig
from .planner import PlannerConfig
from . import paths

SCHEMA_VERSION = 1

# Synthetic mode geometries are sampled at this step, meters.
TEMPLATE_PATH_STEP = 0.25

AUTO_GRID_MARGIN = 2.0  # meters around the union of support hints

_ID_PATTERN = re.compile(r"^[A-Za-z0-9_-]+$")


class EntityKind(Enum):
    PREDICTED = "predicted"
    EGO = "ego"


class TemplateMode(Enum):
    STRAIGHT = "STRAIGHT"
    LANE_CHANGE_LEFT = "LANE_CHANGE_LEFT"
    LANE_CHANGE_RIGHT = "LANE_CHANGE_RIGHT"
    TURN_LEFT = "TURN_LEFT"
    TURN_RIGHT = "TURN_RIGHT"


@dataclass(frozen=True)
class SyntheticTemplate:
    """Deterministic stand-in for a learned predictor: named mode shapes
    with probabilities, e.g. potential lane change or potential turn."""

    modes: tuple[tuple[TemplateMode, float], ...]
    horizon: float  # s
    lane_width: float = 3.75  # m
    turn_radius: float = 12.0  # m

    def __post_init__(self) -> None:
        if not self.modes:
            raise ValidationError("template needs at least one mode")
        if self.horizon <= 0:
            raise ValidationError("template horizon must be positive")
        if self.lane_width <= 0:
            raise ValidationError("template lane_width must be positive")
        if self.turn_radius < 1.0:
            raise ValidationError("template turn_radius must be at least 1 m")


@dataclass(frozen=True)
class EntitySpec:
    entity_id: str
    kind: EntityKind
    state: VehicleState
    prediction: MultimodalPrediction | None = None
    template: SyntheticTemplate | None = None


@dataclass(frozen=True)
class AutoGrid:
    """Grid bounds derived from the entities' support hints at load time."""

    resolution: float | None = None


@dataclass(frozen=True)
class ScenarioSpec:
    entities: tuple[EntitySpec, ...]
    grid: GridSpec | AutoGrid
    monitor: MonitorConfig | None = None
    planner: PlannerConfig | None = None

    def entity(self, entity_id: str) -> EntitySpec:
        for e in self.entities:
            if e.entity_id == entity_id:
                return e
        raise ValidationError(f"unknown entity id {entity_id!r}")

    def ego_entities(self) -> list[EntitySpec]:
        return [e for e in self.entities if e.kind is EntityKind.EGO]


def synthesize_prediction(template: SyntheticTemplate, state: VehicleState) -> MultimodalPrediction:
    """Deterministic multimodal prediction from a template and a state.

    Straight modes run velocity*horizon ahead; lane changes shift one
    lane width over that length with a quintic profile; turns are quarter
    arcs of the template radius. Every mode starts at the entity pose.
    """
    if state.velocity <= 0:
        raise ValidationError("synthetic predictions require forward motion")
    length = state.velocity * template.horizon
    built = []
    for mode_name, probability in template.modes:
        if mode_name is TemplateMode.STRAIGHT:
            pts = paths.straight_points(state.position, state.heading, length,
                                        step=TEMPLATE_PATH_STEP)
        elif mode_name is TemplateMode.LANE_CHANGE_LEFT:
            pts = paths.lane_change_points(state.position, state.heading,
                                           template.lane_width, length,
                                           step=TEMPLATE_PATH_STEP)
        elif mode_name is TemplateMode.LANE_CHANGE_RIGHT:
            pts = paths.lane_change_points(state.position, state.heading,
                                           -template.lane_width, length,
                                           step=TEMPLATE_PATH_STEP)
        else:
            radius = template.turn_radius
            if mode_name is TemplateMode.TURN_RIGHT:
                radius = -radius
            pts = paths.arc_points(state.position, state.heading, radius,
                                   abs(radius) * math.pi / 2.0,
                                   step=TEMPLATE_PATH_STEP)
        built.append(PredictedTrajectory(build_geometry(Polyline2D(pts)), probability))
    return MultimodalPrediction.from_raw(built)


def resolve_prediction(entity: EntitySpec) -> MultimodalPrediction:
    """Inline prediction if present, synthesized from the template otherwise."""
    if entity.prediction is not None:
        return entity.prediction
    if entity.template is not None:
        return synthesize_prediction(entity.template, entity.state)
    raise ValidationError(f"entity {entity.entity_id!r} carries no prediction")


def auto_grid_spec(hints: list[BoundingBox], resolution: float,
                   margin: float = AUTO_GRID_MARGIN) -> GridSpec:
    """Grid covering the union of support hints plus a margin."""
    if not hints:
        raise ValidationError("auto grid needs at least one support hint")
    box = hints[0]
    for hint in hints[1:]:
        box = box.union(hint)
    xmin, ymin = box.xmin - margin, box.ymin - margin
    width = max(1, int(math.ceil((box.xmax + margin - xmin) / resolution)))
    height = max(1, int(math.ceil((box.ymax + margin - ymin) / resolution)))
    return GridSpec((xmin, ymin), resolution, width, height)


# --- JSON parsing -----------------------------------------------------------


def _require(obj: dict, key: str, path: str):
    if key not in obj:
        raise ScenarioError(f"{path}.{key}", "missing required field")
    return obj[key]


def _as_dict(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise ScenarioError(path, "expected an object")
    return value


def _as_list(value, path: str) -> list:
    if not isinstance(value, list):
        raise ScenarioError(path, "expected an array")
    return value


def _as_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(path, "expected a number")
    if not math.isfinite(value):
        raise ScenarioError(path, "must be finite")
    return float(value)


def _as_int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(path, "expected an integer")
    return value


def _as_point(value, path: str) -> tuple[float, float]:
    pair = _as_list(value, path)
    if len(pair) != 2:
        raise ScenarioError(path, "expected [x, y]")
    return (_as_number(pair[0], f"{path}[0]"), _as_number(pair[1], f"{path}[1]"))


def _parse_state(obj, path: str) -> VehicleState:
    data = _as_dict(obj, path)
    try:
        return VehicleState(
            position=_as_point(_require(data, "position", path), f"{path}.position"),
            heading=_as_number(_require(data, "heading", path), f"{path}.heading"),
            velocity=_as_number(_require(data, "velocity", path), f"{path}.velocity"),
            steering_angle=_as_number(data.get("steering_angle", 0.0), f"{path}.steering_angle"),
            wheelbase=_as_number(data.get("wheelbase", 2.8), f"{path}.wheelbase"),
            mass=_as_number(_require(data, "mass", path), f"{path}.mass"),
            type_factor=_as_number(data.get("type_factor", 1.0), f"{path}.type_factor"),
        )
    except ScenarioError:
        raise
    except ValidationError as exc:
        raise ScenarioError(path, str(exc)) from exc


def _parse_modes(value, path: str) -> MultimodalPrediction:
    rows = _as_list(value, path)
    modes = []
    for n, row in enumerate(rows):
        mode_path = f"{path}[{n}]"
        data = _as_dict(row, mode_path)
        probability = _as_number(_require(data, "probability", mode_path),
                                 f"{mode_path}.probability")
        pts = [_as_point(p, f"{mode_path}.points[{m}]")
               for m, p in enumerate(_as_list(_require(data, "points", mode_path),
                                              f"{mode_path}.points"))]
        try:
            geometry = build_geometry(Polyline2D(pts))
            modes.append(PredictedTrajectory(geometry, probability))
        except ValidationError as exc:
            raise ScenarioError(mode_path, str(exc)) from exc
    try:
        return MultimodalPrediction.from_raw(modes)
    except ValidationError as exc:
        raise ScenarioError(path, str(exc)) from exc


def _parse_template(value, path: str) -> SyntheticTemplate:
    data = _as_dict(value, path)
    modes_obj = _as_dict(_require(data, "modes", path), f"{path}.modes")
    modes = []
    for name, probability in modes_obj.items():
        try:
            mode = TemplateMode(name)
        except ValueError as exc:
            known = ", ".join(m.value for m in TemplateMode)
            raise ScenarioError(f"{path}.modes.{name}",
                                f"unknown template mode (expected one of {known})") from exc
        modes.append((mode, _as_number(probability, f"{path}.modes.{name}")))
    try:
        return SyntheticTemplate(
            modes=tuple(modes),
            horizon=_as_number(_require(data, "horizon", path), f"{path}.horizon"),
            lane_width=_as_number(data.get("lane_width", 3.75), f"{path}.lane_width"),
            turn_radius=_as_number(data.get("turn_radius", 12.0), f"{path}.turn_radius"),
        )
    except ScenarioError:
        raise
    except ValidationError as exc:
        raise ScenarioError(path, str(exc)) from exc


def _parse_entity(obj, path: str) -> EntitySpec:
    data = _as_dict(obj, path)
    entity_id = _require(data, "id", path)
    if not isinstance(entity_id, str) or not _ID_PATTERN.match(entity_id):
        raise ScenarioError(f"{path}.id", "entity ids must match [A-Za-z0-9_-]+")
    kind_name = _require(data, "kind", path)
    try:
        kind = EntityKind(kind_name)
    except ValueError as exc:
        raise ScenarioError(f"{path}.kind", "expected 'predicted' or 'ego'") from exc
    state = _parse_state(_require(data, "state", path), f"{path}.state")

    prediction = None
    template = None
    if kind is EntityKind.PREDICTED:
        if ("modes" in data) == ("template" in data):
            raise ScenarioError(path, "predicted entities need exactly one of 'modes' or 'template'")
        if "modes" in data:
            prediction = _parse_modes(data["modes"], f"{path}.modes")
        else:
            template = _parse_template(data["template"], f"{path}.template")
            try:
                synthesize_prediction(template, state)  # surface faults at load time
            except ValidationError as exc:
                raise ScenarioError(f"{path}.template", str(exc)) from exc
    else:
        if "modes" in data or "template" in data:
            raise ScenarioError(path, "ego entities use kinematic prediction, not modes/templates")
    return EntitySpec(entity_id, kind, state, prediction, template)


def _parse_grid(value, path: str):
    if value == "auto":
        return AutoGrid()
    data = _as_dict(value, path)
    if data.get("auto"):
        resolution = data.get("resolution")
        return AutoGrid(None if resolution is None
                        else _as_number(resolution, f"{path}.resolution"))
    try:
        return GridSpec(
            origin=_as_point(_require(data, "origin", path), f"{path}.origin"),
            resolution=_as_number(_require(data, "resolution", path), f"{path}.resolution"),
            width=_as_int(_require(data, "width", path), f"{path}.width"),
            height=_as_int(_require(data, "height", path), f"{path}.height"),
        )
    except ScenarioError:
        raise
    except ValidationError as exc:
        raise ScenarioError(path, str(exc)) from exc


def _parse_monitor(value, path: str) -> MonitorConfig:
    data = _as_dict(value, path)
    try:
        return MonitorConfig(
            f_thld=_as_number(_require(data, "f_thld", path), f"{path}.f_thld"),
            grid_resolution=_as_number(_require(data, "grid_resolution", path),
                                       f"{path}.grid_resolution"),
            refinement_levels=_as_int(data.get("refinement_levels", 3),
                                      f"{path}.refinement_levels"),
        )
    except ScenarioError:
        raise
    except ValidationError as exc:
        raise ScenarioError(path, str(exc)) from exc


def _parse_planner(value, path: str) -> PlannerConfig:
    data = _as_dict(value, path)
    weights_obj = _as_dict(data.get("weights", {"safety": 1.0}), f"{path}.weights")
    weights = (
        _as_number(weights_obj.get("safety", 0.0), f"{path}.weights.safety"),
        _as_number(weights_obj.get("comfort", 0.0), f"{path}.weights.comfort"),
        _as_number(weights_obj.get("efficiency", 0.0), f"{path}.weights.efficiency"),
    )
    try:
        return PlannerConfig(
            lane_width=_as_number(_require(data, "lane_width", path), f"{path}.lane_width"),
            horizon=_as_number(_require(data, "horizon", path), f"{path}.horizon"),
            accel_delta=_as_number(_require(data, "accel_delta", path), f"{path}.accel_delta"),
            weights=weights,
            points_per_candidate=_as_int(data.get("points_per_candidate", 101),
                                         f"{path}.points_per_candidate"),
        )
    except ScenarioError:
        raise
    except ValidationError as exc:
        raise ScenarioError(path, str(exc)) from exc


def parse_scenario(document: dict) -> ScenarioSpec:
    """Validate a decoded scenario document into a ScenarioSpec."""
    data = _as_dict(document, "$")
    version = _require(data, "schema_version", "$")
    if version != SCHEMA_VERSION:
        raise ScenarioError("$.schema_version", f"unsupported version {version!r}, expected {SCHEMA_VERSION}")

    rows = _as_list(_require(data, "entities", "$"), "$.entities")
    if not rows:
        raise ScenarioError("$.entities", "scenario needs at least one entity")
    entities = tuple(_parse_entity(row, f"$.entities[{n}]") for n, row in enumerate(rows))
    seen: set[str] = set()
    for n, entity in enumerate(entities):
        if entity.entity_id in seen:
            raise ScenarioError(f"$.entities[{n}].id", f"duplicate entity id {entity.entity_id!r}")
        seen.add(entity.entity_id)

    grid = _parse_grid(_require(data, "grid", "$"), "$.grid")
    monitor = _parse_monitor(data["monitor"], "$.monitor") if "monitor" in data else None
    planner = _parse_planner(data["planner"], "$.planner") if "planner" in data else None
    return ScenarioSpec(entities, grid, monitor, planner)


def load_scenario(path) -> ScenarioSpec:
    """Load and validate a scenario JSON file."""
    with open(path, "r", encoding="utf-8") as handle:
        try:
            document = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ScenarioError("$", f"not valid JSON ({exc})") from exc
    return parse_scenario(document)


# --- serialization (round-trip support) -------------------------------------


def scenario_to_dict(spec: ScenarioSpec) -> dict:
    """Scenario document for a spec; load_scenario(save) round-trips."""
    entities = []
    for entity in spec.entities:
        state = entity.state
        row: dict = {
            "id": entity.entity_id,
            "kind": entity.kind.value,
            "state": {
                "position": [state.position[0], state.position[1]],
                "heading": state.heading,
                "velocity": state.velocity,
                "steering_angle": state.steering_angle,
                "wheelbase": state.wheelbase,
                "mass": state.mass,
                "type_factor": state.type_factor,
            },
        }
        if entity.prediction is not None:
            row["modes"] = [
                {"probability": mode.probability,
                 "points": mode.geometry.source.points.tolist()}
                for mode in entity.prediction.modes
            ]
        if entity.template is not None:
            row["template"] = {
                "modes": {mode.value: p for mode, p in entity.template.modes},
                "horizon": entity.template.horizon,
                "lane_width": entity.template.lane_width,
                "turn_radius": entity.template.turn_radius,
            }
        entities.append(row)

    if isinstance(spec.grid, AutoGrid):
        grid = "auto" if spec.grid.resolution is None else {
            "auto": True, "resolution": spec.grid.resolution}
    else:
        grid = {
            "origin": [spec.grid.origin[0], spec.grid.origin[1]],
            "resolution": spec.grid.resolution,
            "width": spec.grid.width,
            "height": spec.grid.height,
        }

    document: dict = {"schema_version": SCHEMA_VERSION, "entities": entities, "grid": grid}
    if spec.monitor is not None:
        document["monitor"] = {
            "f_thld": spec.monitor.f_thld,
            "grid_resolution": spec.monitor.grid_resolution,
            "refinement_levels": spec.monitor.refinement_levels,
        }
    if spec.planner is not None:
        document["planner"] = {
            "lane_width": spec.planner.lane_width,
            "horizon": spec.planner.horizon,
            "accel_delta": spec.planner.accel_delta,
            "weights": {
                "safety": spec.planner.weights[0],
                "comfort": spec.planner.weights[1],
                "efficiency": spec.planner.weights[2],
            },
            "points_per_candidate": spec.planner.points_per_candidate,
        }
    return document


def save_scenario(spec: ScenarioSpec, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        json.dump(scenario_to_dict(spec), handle, indent=2)
        handle.write("\n")
