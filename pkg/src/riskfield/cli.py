"""Command-line interface: risk monitoring, ego analysis, planning, field export.

Subcommands:
  monitor  pairwise risk reports for every entity pair, plus interaction grids
  ego      ego-vs-entity risk reports and grids
  plan     rank the nine-candidate fan by risk and other criteria
  field    export one entity's risk field as CSV/PGM

All numeric output is deterministic; reports go to stdout as JSON, grids to
`--out-dir` when given. Exit codes: 0 success, 1 validation error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

from .ego import EgoParams
from .errors import GridBudgetError, ValidationError
from .field import MAX_GRID_CELLS, FieldParams, GridSpec, RiskGrid
from .gridio import write_grid_csv, write_grid_pgm
from .interaction import (
    EntityField,
    MonitorConfig,
    ego_entity_field,
    interaction_risk_grid,
    monitor_all,
    prediction_entity_field,
    risk_level,
)
from .planner import candidate_entity_field, rank_candidates, sample_candidates, score_candidates
from .scenario import (
    AutoGrid,
    EntityKind,
    ScenarioSpec,
    auto_grid_spec,
    load_scenario,
    resolve_prediction,
)

_FIELD_PARAM_NAMES = {f.name for f in dataclasses.fields(FieldParams)}
_EGO_PARAM_NAMES = {f.name for f in dataclasses.fields(EgoParams)}


def _load_params(path) -> tuple[FieldParams, EgoParams]:
    """Parameter overrides from a flat JSON object keyed by parameter name."""
    field_params = FieldParams()
    ego_params = EgoParams()
    if path is None:
        return field_params, ego_params
    with open(path, "r", encoding="utf-8") as handle:
        try:
            overrides = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"parameter file is not valid JSON ({exc})") from exc
    if not isinstance(overrides, dict):
        raise ValidationError("parameter file must hold a JSON object")
    field_overrides, ego_overrides = {}, {}
    for key, value in overrides.items():
        if key in _FIELD_PARAM_NAMES:
            field_overrides[key] = value
        elif key in _EGO_PARAM_NAMES:
            ego_overrides[key] = value
        else:
            raise ValidationError(f"unknown parameter {key!r} in override file")
    return (dataclasses.replace(field_params, **field_overrides),
            dataclasses.replace(ego_params, **ego_overrides))


def _build_fields(spec: ScenarioSpec, field_params: FieldParams,
                  ego_params: EgoParams) -> list[EntityField]:
    fields = []
    for entity in spec.entities:
        if entity.kind is EntityKind.EGO:
            fields.append(ego_entity_field(entity.entity_id, ego_params,
                                           field_params, entity.state))
        else:
            prediction = resolve_prediction(entity)
            fields.append(prediction_entity_field(entity.entity_id, field_params,
                                                  prediction, entity.state))
    return fields


def _resolve_grid(spec: ScenarioSpec, fields: list[EntityField],
                  grid_res: float | None) -> GridSpec:
    grid = spec.grid
    if isinstance(grid, AutoGrid):
        resolution = grid_res or grid.resolution
        if resolution is None:
            if spec.monitor is None:
                raise ValidationError(
                    "auto grid needs a resolution (monitor.grid_resolution or --grid-res)")
            resolution = spec.monitor.grid_resolution
        return auto_grid_spec([f.support_hint for f in fields], resolution)
    if grid_res is not None and grid_res != grid.resolution:
        # keep the covered extent, re-tile at the requested resolution
        width = max(1, int(math.ceil(grid.width * grid.resolution / grid_res)))
        height = max(1, int(math.ceil(grid.height * grid.resolution / grid_res)))
        return GridSpec(grid.origin, grid_res, width, height)
    return grid


def _require_monitor(spec: ScenarioSpec) -> MonitorConfig:
    if spec.monitor is None:
        raise ValidationError("scenario has no 'monitor' section")
    return spec.monitor


def _emit(document: dict) -> None:
    sys.stdout.write(json.dumps(document, indent=2) + "\n")


def _write_pair_grid(out_dir, name: str, a: EntityField, b: EntityField,
                     grid: GridSpec) -> None:
    values = interaction_risk_grid(a, b, grid)
    write_grid_csv(values, out_dir / f"{name}.csv")
    write_grid_pgm(values, out_dir / f"{name}.pgm")


def _prepare_out_dir(args):
    if args.out_dir is None:
        return None
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_monitor(args) -> int:
    spec = load_scenario(args.scenario)
    field_params, ego_params = _load_params(args.params)
    monitor = _require_monitor(spec)
    fields = _build_fields(spec, field_params, ego_params)
    reports = monitor_all(fields, monitor)
    _emit({"command": "monitor", "reports": [r.to_dict() for r in reports]})
    out = _prepare_out_dir(args)
    if out is not None:
        grid = _resolve_grid(spec, fields, args.grid_res)
        by_id = {f.entity_id: f for f in fields}
        for report in reports:
            a, b = report.pair
            _write_pair_grid(out, f"ir_{a}_{b}", by_id[a], by_id[b], grid)
    return 0


def _ego_and_others(spec: ScenarioSpec, fields: list[EntityField]):
    egos = spec.ego_entities()
    if len(egos) != 1:
        raise ValidationError(f"this command needs exactly one ego entity, found {len(egos)}")
    ego_id = egos[0].entity_id
    ego_field = next(f for f in fields if f.entity_id == ego_id)
    others = [f for f in fields if f.entity_id != ego_id]
    if not others:
        raise ValidationError("scenario has no entities besides the ego vehicle")
    return egos[0], ego_field, others


def _cmd_ego(args) -> int:
    spec = load_scenario(args.scenario)
    field_params, ego_params = _load_params(args.params)
    monitor = _require_monitor(spec)
    fields = _build_fields(spec, field_params, ego_params)
    _, ego_field, others = _ego_and_others(spec, fields)
    reports = [risk_level(ego_field, other, monitor) for other in others]
    reports.sort(key=lambda r: (-r.risk, r.pair))
    _emit({"command": "ego", "reports": [r.to_dict() for r in reports]})
    out = _prepare_out_dir(args)
    if out is not None:
        grid = _resolve_grid(spec, fields, args.grid_res)
        by_id = {f.entity_id: f for f in fields}
        for report in reports:
            a, b = report.pair
            _write_pair_grid(out, f"ir_{a}_{b}", by_id[a], by_id[b], grid)
    return 0


def _cmd_plan(args) -> int:
    spec = load_scenario(args.scenario)
    field_params, ego_params = _load_params(args.params)
    monitor = _require_monitor(spec)
    if spec.planner is None:
        raise ValidationError("scenario has no 'planner' section")
    fields = _build_fields(spec, field_params, ego_params)
    ego_spec, _, others = _ego_and_others(spec, fields)

    candidates = sample_candidates(ego_spec.state, spec.planner)
    scores = score_candidates(candidates, others, ego_spec.state, ego_params,
                              field_params, spec.planner, monitor)
    ranked = rank_candidates(scores)
    _emit({"command": "plan", "ranked": [
        {
            "rank": n + 1,
            "lateral": s.candidate.lateral_intent.name,
            "longitudinal": s.candidate.longitudinal_intent.name,
            "total": s.total,
            "risk_max": s.risk_max,
            "comfort": s.comfort,
            "efficiency": s.efficiency,
            "terminal_speed": s.candidate.terminal_speed,
            "risk_per_entity": dict(sorted(s.risk_per_entity.items())),
        }
        for n, s in enumerate(ranked)
    ]})
    out = _prepare_out_dir(args)
    if out is not None:
        grid = _resolve_grid(spec, fields, args.grid_res)
        for candidate in candidates:
            cand_field = candidate_entity_field(candidate, ego_spec.state,
                                                ego_params, field_params)
            name = f"cand_{candidate.lateral_intent.name}_{candidate.longitudinal_intent.name}"
            for other in others:
                _write_pair_grid(out, f"{name}_{other.entity_id}", cand_field, other, grid)
    return 0


def _cmd_field(args) -> int:
    spec = load_scenario(args.scenario)
    field_params, ego_params = _load_params(args.params)
    fields = _build_fields(spec, field_params, ego_params)
    try:
        entity_field = next(f for f in fields if f.entity_id == args.entity)
    except StopIteration:
        raise ValidationError(f"unknown entity id {args.entity!r}") from None
    grid = _resolve_grid(spec, fields, args.grid_res)
    if grid.cells > MAX_GRID_CELLS:
        raise GridBudgetError(f"grid has {grid.cells} cells, budget is {MAX_GRID_CELLS}")
    values = entity_field.evaluator(grid.cell_centers()).reshape(grid.height, grid.width)
    risk_grid = RiskGrid(grid, values)
    _emit({
        "command": "field",
        "entity": args.entity,
        "max": float(values.max()),
        "grid": {
            "origin": [grid.origin[0], grid.origin[1]],
            "resolution": grid.resolution,
            "width": grid.width,
            "height": grid.height,
        },
    })
    out = _prepare_out_dir(args)
    if out is not None:
        write_grid_csv(risk_grid, out / f"field_{args.entity}.csv")
        write_grid_pgm(risk_grid, out / f"field_{args.entity}.pgm")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riskfield",
        description="Driving-risk fields: monitoring, ego analysis and trajectory ranking.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    def common(sub):
        sub.add_argument("--scenario", required=True, help="scenario JSON file")
        sub.add_argument("--out-dir", default=None, help="directory for grid outputs")
        sub.add_argument("--grid-res", type=float, default=None,
                         help="override the output grid resolution, meters")
        sub.add_argument("--params", default=None,
                         help="JSON file overriding model parameters by name")

    monitor = subparsers.add_parser("monitor", help="pairwise traffic risk reports")
    common(monitor)
    monitor.set_defaults(func=_cmd_monitor)

    ego = subparsers.add_parser("ego", help="ego-vehicle risk analysis")
    common(ego)
    ego.set_defaults(func=_cmd_ego)

    plan = subparsers.add_parser("plan", help="rank candidate trajectories")
    common(plan)
    plan.set_defaults(func=_cmd_plan)

    field_cmd = subparsers.add_parser("field", help="export one entity's risk field")
    common(field_cmd)
    field_cmd.add_argument("--entity", required=True, help="entity id to evaluate")
    field_cmd.set_defaults(func=_cmd_field)

    return parser


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; that is a validation failure here
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli())
