"""Per-frame speed and heading, median speeds and inter-agent distance."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyInputError
from .geodesy import PlanePoint, planar_heading
from .trajectory import CleanTrajectory, EncounterCase

MPS_TO_MPH = 2.2369362921
STATIONARY_EPS = 0.1


@dataclass(frozen=True)
class KinematicState:
    """Kinematic state of one agent at one frame.

    ``heading`` is held from the last frame with ``speed >= eps`` while the
    agent is (near) stationary and is ``None`` only if it never moved before.
    ``moving`` tells whether the frame itself is above the threshold.
    """

    t: float
    pos: PlanePoint
    speed: float
    heading: float | None
    moving: bool


@dataclass(frozen=True, eq=False)
class KinematicTrack:
    """Array form of a state sequence; ``heading`` is NaN where undefined."""

    t: np.ndarray
    pos: np.ndarray
    speed: np.ndarray
    heading: np.ndarray
    moving: np.ndarray

    def __len__(self) -> int:
        return int(self.t.size)

    def states(self) -> list[KinematicState]:
        return [
            KinematicState(
                t=float(t),
                pos=PlanePoint(float(p[0]), float(p[1])),
                speed=float(s),
                heading=None if np.isnan(h) else float(h),
                moving=bool(m),
            )
            for t, p, s, h, m in zip(self.t, self.pos, self.speed, self.heading, self.moving)
        ]

    def velocity(self) -> np.ndarray:
        """``(n, 2)`` velocity vectors; zero where the heading is undefined."""
        rad = np.radians(np.nan_to_num(self.heading))
        v = np.column_stack((np.sin(rad), np.cos(rad))) * self.speed[:, None]
        v[np.isnan(self.heading)] = 0.0
        return v


def _hold_last(values: np.ndarray, valid: np.ndarray) -> np.ndarray:
    """Forward-fill ``values`` from the last index where ``valid`` holds; NaN before the first."""
    idx = np.where(valid, np.arange(values.size), -1)
    np.maximum.accumulate(idx, out=idx)
    out = np.full(values.size, np.nan)
    has = idx >= 0
    out[has] = values[idx[has]]
    return out


def kinematic_track(traj: CleanTrajectory, eps: float = STATIONARY_EPS) -> KinematicTrack:
    """Backward-difference speed and heading for every frame of ``traj``."""
    pts = traj.points
    d = np.diff(pts, axis=0)
    step_speed = np.hypot(d[:, 0], d[:, 1]) / traj.dt
    step_heading = planar_heading(d[:, 0], d[:, 1])
    # frame 0 copies frame 1
    speed = np.concatenate((step_speed[:1], step_speed))
    raw_heading = np.concatenate((step_heading[:1], step_heading))
    moving = speed >= eps
    heading = _hold_last(raw_heading, moving)
    return KinematicTrack(t=traj.times, pos=pts, speed=speed, heading=heading, moving=moving)


def estimate_states(traj: CleanTrajectory, eps: float = STATIONARY_EPS) -> list[KinematicState]:
    return kinematic_track(traj, eps).states()


def median_speed(states: Sequence[KinematicState] | np.ndarray) -> float:
    """Median frame speed; an even count averages the two middle values."""
    if isinstance(states, np.ndarray):
        speeds = states
    else:
        speeds = np.array([s.speed for s in states], dtype=float)
    if speeds.size == 0:
        raise EmptyInputError("median speed of an empty state sequence")
    return float(np.median(speeds))


def mps_to_mph(v: float) -> float:
    return v * MPS_TO_MPH


def distance_series(case: EncounterCase) -> tuple[np.ndarray, np.ndarray]:
    """Frame times and planar vehicle / e-scooter separation in metres."""
    d = case.escooter.points - case.vehicle.points
    return case.times, np.hypot(d[:, 0], d[:, 1])


def min_distance(case: EncounterCase) -> float:
    return float(distance_series(case)[1].min())
