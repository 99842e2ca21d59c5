"""Assign each encounter one of four relative-motion geometries."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import UnclassifiableError
from .kinematics import STATIONARY_EPS, distance_series, kinematic_track
from .trajectory import EncounterCase

_TIME_TOL = 1e-9


class GeometryClass(str, Enum):
    PARALLEL_SAME_DIRECTION = "parallel_same_direction"
    PARALLEL_OPPOSITE_DIRECTION = "parallel_opposite_direction"
    CROSSING_FROM_LEFT = "crossing_from_left"
    CROSSING_FROM_RIGHT = "crossing_from_right"


@dataclass(frozen=True)
class InteractionPhase:
    t_start: float
    t_end: float

    def __post_init__(self):
        if self.t_start > self.t_end:
            raise ValueError("interaction phase must have t_start <= t_end")


def interaction_phase(case: EncounterCase, half_window: float = 2.0) -> InteractionPhase:
    """Window of +/- ``half_window`` seconds around the (earliest) closest approach, clipped to the case."""
    t, d = distance_series(case)
    t_min = t[int(np.argmin(d))]
    return InteractionPhase(float(max(t[0], t_min - half_window)), float(min(t[-1], t_min + half_window)))


def relative_heading(case: EncounterCase, phase: InteractionPhase, eps: float = STATIONARY_EPS) -> float:
    """Circular mean of the e-scooter heading relative to the vehicle heading over the phase.

    Signed, in (-180, 180]; positive means the e-scooter points clockwise of
    the vehicle, i.e. it moves toward the vehicle's right-hand side.
    """
    veh = kinematic_track(case.vehicle, eps)
    esc = kinematic_track(case.escooter, eps)
    t = veh.t
    in_phase = (t >= phase.t_start - _TIME_TOL) & (t <= phase.t_end + _TIME_TOL)
    usable = in_phase & ~np.isnan(veh.heading) & ~np.isnan(esc.heading)
    if not usable.any():
        raise UnclassifiableError(f"case {case.id!r}: no frame with both headings defined in the interaction phase")
    diff = np.radians(esc.heading[usable] - veh.heading[usable])
    s, c = np.sin(diff).mean(), np.cos(diff).mean()
    if np.hypot(s, c) < 1e-9:
        raise UnclassifiableError(f"case {case.id!r}: relative heading has no dominant direction")
    return float(np.degrees(np.arctan2(s, c)))


def classify_geometry(
    case: EncounterCase,
    phase: InteractionPhase,
    parallel_angle: float = 45.0,
    eps: float = STATIONARY_EPS,
) -> GeometryClass:
    """Parallel when the mean heading difference is within ``parallel_angle`` of 0 or 180 degrees.

    Otherwise the encounter is a crossing, and its side is the direction of the
    e-scooter's motion across the vehicle's path: moving toward the vehicle's
    right means it comes from the left.
    """
    if not 0 < parallel_angle < 90:
        raise ValueError("parallel_angle must lie in (0, 90)")
    rel = relative_heading(case, phase, eps)
    delta = abs(rel)
    if delta < parallel_angle:
        return GeometryClass.PARALLEL_SAME_DIRECTION
    if delta > 180.0 - parallel_angle:
        return GeometryClass.PARALLEL_OPPOSITE_DIRECTION
    return GeometryClass.CROSSING_FROM_LEFT if rel > 0 else GeometryClass.CROSSING_FROM_RIGHT
