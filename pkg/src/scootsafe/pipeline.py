"""End-to-end processing of one encounter: condition, synchronise, analyse, classify."""
from __future__ import annotations

from dataclasses import dataclass

from .config import RunConfig
from .conflict import ConflictProfile, analyze_tracks
from .errors import UnclassifiableError
from .geometry import classify_geometry, interaction_phase
from .kinematics import kinematic_track, median_speed, min_distance
from .report import CaseMetrics
from .trajectory import Dataset, EncounterCase, RawTrajectory, condition, synchronize

ANALYZED = "analyzed"
UNCLASSIFIABLE = "unclassifiable"
REJECTED = "rejected"


@dataclass(frozen=True, eq=False)
class CaseResult:
    metrics: CaseMetrics
    profile: ConflictProfile
    status: str
    note: str = ""


def build_case(
    case_id: str,
    dataset: Dataset | str,
    vehicle: RawTrajectory,
    escooter: RawTrajectory,
    config: RunConfig | None = None,
) -> EncounterCase:
    cfg = config or RunConfig()
    conditioned = [
        condition(
            raw,
            max_speed=cfg.max_plausible_speed_mps,
            target_dt=cfg.target_dt,
            max_gap=cfg.max_gap_s,
            window=cfg.smooth_window,
        )
        for raw in (vehicle, escooter)
    ]
    return synchronize(
        *conditioned,
        cfg.resample_hz,
        case_id=case_id,
        dataset=Dataset(dataset),
        min_overlap=cfg.min_overlap_s,
    )


def evaluate_case(case: EncounterCase, config: RunConfig | None = None) -> CaseResult:
    """Scenario variables, conflict verdict and geometry of one synchronised case."""
    cfg = config or RunConfig()
    eps = cfg.stationary_eps_mps
    veh = kinematic_track(case.vehicle, eps)
    esc = kinematic_track(case.escooter, eps)
    profile = analyze_tracks(veh, esc, cfg.conflict)

    status, note, geometry = ANALYZED, "", None
    try:
        phase = interaction_phase(case, cfg.phase_half_window_s)
        geometry = classify_geometry(case, phase, cfg.parallel_angle_deg, eps)
    except UnclassifiableError as exc:
        status, note = UNCLASSIFIABLE, str(exc)

    metrics = CaseMetrics(
        id=case.id,
        dataset=case.dataset,
        min_distance=min_distance(case),
        vehicle_median_speed=median_speed(veh.speed),
        escooter_median_speed=median_speed(esc.speed),
        min_gap_time=profile.min_gap_time,
        mttc=profile.mttc,
        is_potential_conflict=profile.is_potential_conflict,
        risk=profile.risk,
        geometry=geometry,
        contact=profile.contact,
    )
    return CaseResult(metrics, profile, status, note)
