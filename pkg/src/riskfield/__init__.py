"""Probabilistic driving-risk fields over 2-D road space.

Builds scalar risk fields from multimodal trajectory predictions (Gaussian
cross-section) and from kinematic ego rollouts (Laplace cross-section),
multiplies pairs of fields into interaction risk, and applies the result to
traffic monitoring, ego risk analysis and candidate-trajectory ranking.
"""

from .errors import GridBudgetError, ScenarioError, ValidationError
from .geometry import (
    FrenetPoint,
    Polyline2D,
    TrajectoryGeometry,
    build_geometry,
    frenet_round_trip,
    project_points,
    to_frenet,
)
from .field import (
    FieldParams,
    GridSpec,
    MultimodalPrediction,
    PredictedTrajectory,
    RiskGrid,
    VehicleState,
    gaussian_height,
    gaussian_width,
    mode_risk_probability,
    risk_field_at,
    risk_field_grid,
    risk_probability,
    virtual_mass,
)
from .ego import (
    EgoParams,
    ego_risk_field_at,
    ego_risk_probability,
    laplace_height,
    laplace_width,
    predict_ego_path,
    turning_radius,
)
from .interaction import (
    BoundingBox,
    EntityField,
    MonitorConfig,
    RiskReport,
    ego_entity_field,
    interaction_risk_at,
    interaction_risk_grid,
    laplace_entity_field,
    monitor_all,
    prediction_entity_field,
    risk_level,
)
from .planner import (
    CandidateScore,
    CandidateTrajectory,
    LateralIntent,
    LongitudinalIntent,
    PlannerConfig,
    candidate_entity_field,
    rank_candidates,
    sample_candidates,
    score_candidates,
)
from .scenario import (
    AutoGrid,
    EntityKind,
    EntitySpec,
    ScenarioSpec,
    SyntheticTemplate,
    TemplateMode,
    auto_grid_spec,
    load_scenario,
    parse_scenario,
    resolve_prediction,
    save_scenario,
    scenario_to_dict,
    synthesize_prediction,
)
from .gridio import write_grid_csv, write_grid_pgm
from .cli import run_cli

__version__ = "0.1.0"
