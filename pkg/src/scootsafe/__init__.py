"""Surrogate safety metrics for paired vehicle / e-scooter GPS trajectories."""
from .config import RunConfig
from .conflict import (
    CoastRay,
    ConflictConfig,
    ConflictProfile,
    RiskLevel,
    analyze_case,
    coast_intersection,
    gap_time,
    instantaneous_ttc,
    risk_level,
)
from .errors import ScootsafeError
from .geodesy import GeoPoint, PlanePoint, ProjectionContext, bearing, from_plane, haversine_distance, to_plane
from .geometry import GeometryClass, InteractionPhase, classify_geometry, interaction_phase
from .kinematics import KinematicState, distance_series, estimate_states, median_speed, min_distance, mps_to_mph
from .pipeline import build_case, evaluate_case
from .report import AggregateReport, CaseMetrics, compare_conflict_baseline, geometry_histogram, summarize
from .scenario import ScenarioSpec, brute_force_min_distance, brute_force_ttc, generate_case
from .trajectory import (
    AgentKind,
    CleanTrajectory,
    Dataset,
    EncounterCase,
    GpsFix,
    RawTrajectory,
    interpolate_gaps,
    remove_outliers,
    smooth,
    synchronize,
)

__all__ = [
    "AgentKind",
    "AggregateReport",
    "CaseMetrics",
    "CleanTrajectory",
    "CoastRay",
    "ConflictConfig",
    "ConflictProfile",
    "Dataset",
    "EncounterCase",
    "GeoPoint",
    "GeometryClass",
    "GpsFix",
    "InteractionPhase",
    "KinematicState",
    "PlanePoint",
    "ProjectionContext",
    "RawTrajectory",
    "RiskLevel",
    "RunConfig",
    "ScenarioSpec",
    "ScootsafeError",
    "analyze_case",
    "bearing",
    "brute_force_min_distance",
    "brute_force_ttc",
    "build_case",
    "classify_geometry",
    "coast_intersection",
    "compare_conflict_baseline",
    "distance_series",
    "estimate_states",
    "evaluate_case",
    "from_plane",
    "gap_time",
    "generate_case",
    "geometry_histogram",
    "haversine_distance",
    "instantaneous_ttc",
    "interaction_phase",
    "interpolate_gaps",
    "median_speed",
    "min_distance",
    "mps_to_mph",
    "remove_outliers",
    "risk_level",
    "smooth",
    "summarize",
    "synchronize",
    "to_plane",
]

__version__ = "0.1.0"
