"""Coast-trajectory crossings, gap time, time-to-collision and case verdicts.

Every frame in which both agents move is projected forward at constant
velocity ("coast trajectory").  If the two forward rays cross, the absolute
difference of the arrival times at the crossing is the frame's gap time.  The
time-to-collision is the first time the constant-velocity separation drops to
the collision radius.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .geodesy import PlanePoint
from .kinematics import STATIONARY_EPS, KinematicState, KinematicTrack, kinematic_track
from .trajectory import EncounterCase

PARALLEL_TOL = 1e-9
# relative speeds below this are finite-difference roundoff, not closure (m/s)
MIN_CLOSING_SPEED = 1e-9


class RiskLevel(str, Enum):
    HIGH = "high"
    MEDIUM = "medium"
    LOW = "low"


@dataclass(frozen=True)
class ConflictConfig:
    conflict_gap_threshold: float = 3.0
    gap_cap: float = 20.0
    risk_high: float = 1.0
    risk_medium: float = 2.5
    collision_radius: float = 2.0

    def __post_init__(self):
        if not 0 < self.risk_high < self.risk_medium:
            raise ValueError("need 0 < risk_high < risk_medium")
        if not 0 < self.conflict_gap_threshold < self.gap_cap:
            raise ValueError("need 0 < conflict_gap_threshold < gap_cap")
        if not self.collision_radius > 0:
            raise ValueError("collision_radius must be positive")


@dataclass(frozen=True)
class CoastRay:
    origin: PlanePoint
    heading: float
    speed: float

    def __post_init__(self):
        if not self.speed > 0:
            raise ValueError("coast ray speed must be positive")
        if not 0.0 <= self.heading < 360.0:
            raise ValueError("heading must lie in [0, 360)")

    @classmethod
    def from_state(cls, s: KinematicState) -> CoastRay:
        if s.heading is None:
            raise ValueError("state has no heading")
        return cls(s.pos, s.heading, s.speed)

    @property
    def direction(self) -> tuple[float, float]:
        h = math.radians(self.heading)
        return math.sin(h), math.cos(h)


@dataclass(frozen=True)
class Crossing:
    point: PlanePoint
    arrival_a: float
    arrival_b: float


@dataclass(frozen=True)
class FrameConflict:
    t: float
    crossing: Crossing | None
    gap_time: float | None
    ttc: float | None


def coast_intersection(a: CoastRay, b: CoastRay) -> Crossing | None:
    """Crossing of the two forward rays, or None if parallel or behind either agent."""
    ax, ay = a.direction
    bx, by = b.direction
    cross = ax * by - ay * bx
    if abs(cross) < PARALLEL_TOL:
        return None
    dx = b.origin.x - a.origin.x
    dy = b.origin.y - a.origin.y
    s = (dx * by - dy * bx) / cross
    r = (dx * ay - dy * ax) / cross
    if s < 0 or r < 0:
        return None
    point = PlanePoint(a.origin.x + s * ax, a.origin.y + s * ay)
    return Crossing(point, s / a.speed, r / b.speed)


def gap_time(arrival_a: float, arrival_b: float) -> float:
    return abs(arrival_a - arrival_b)


def _velocity(s: KinematicState) -> tuple[float, float]:
    if s.heading is None:
        raise ValueError("time-to-collision needs a defined heading for both agents")
    h = math.radians(s.heading)
    return s.speed * math.sin(h), s.speed * math.cos(h)


def ttc_from_relative(rx: float, ry: float, vx: float, vy: float, radius: float) -> float | None:
    """Smallest tau >= 0 with |r + v tau| <= radius, for relative position r and velocity v."""
    c = rx * rx + ry * ry - radius * radius
    if c <= 0.0:
        return 0.0
    a = vx * vx + vy * vy
    half_b = rx * vx + ry * vy
    if a < MIN_CLOSING_SPEED**2 or half_b >= 0.0:
        return None
    disc = half_b * half_b - a * c
    if disc < 0.0:
        return None
    # c / (larger root * a): avoids cancellation when the smaller root is tiny
    return c / (-half_b + math.sqrt(disc))


def instantaneous_ttc(a: KinematicState, b: KinematicState, radius: float) -> float | None:
    vax, vay = _velocity(a)
    vbx, vby = _velocity(b)
    return ttc_from_relative(b.pos.x - a.pos.x, b.pos.y - a.pos.y, vbx - vax, vby - vay, radius)


def risk_level(mttc: float, cfg: ConflictConfig = ConflictConfig()) -> RiskLevel:
    """First-match banding: High below ``risk_high``, Medium below ``risk_medium``, else Low."""
    if not mttc > 0:
        raise ValueError(f"mTTC must be positive, got {mttc}")
    if mttc < cfg.risk_high:
        return RiskLevel.HIGH
    if mttc < cfg.risk_medium:
        return RiskLevel.MEDIUM
    return RiskLevel.LOW


@dataclass(frozen=True, eq=False)
class ConflictProfile:
    """Per-frame crossing data (NaN where undefined) and the case verdict.

    ``contact`` marks a case in which the agents were already inside the
    collision radius at some analysed frame (TTC 0).  Such frames do not enter
    ``mttc``, which is kept strictly positive; a contact case is High risk.
    """

    t: np.ndarray
    crossing: np.ndarray
    arrival_a: np.ndarray
    arrival_b: np.ndarray
    gap: np.ndarray
    ttc: np.ndarray
    min_gap_time: float | None
    mttc: float | None
    is_potential_conflict: bool
    risk: RiskLevel | None
    contact: bool = False
    analysed_frames: int = field(default=0)

    @property
    def frames(self) -> list[FrameConflict]:
        out = []
        for i, t in enumerate(self.t):
            if np.isnan(self.gap[i]):
                crossing = None
                g = None
            else:
                crossing = Crossing(
                    PlanePoint(float(self.crossing[i, 0]), float(self.crossing[i, 1])),
                    float(self.arrival_a[i]),
                    float(self.arrival_b[i]),
                )
                g = float(self.gap[i])
            ttc = None if np.isnan(self.ttc[i]) else float(self.ttc[i])
            out.append(FrameConflict(float(t), crossing, g, ttc))
        return out


def _frame_crossings(a: KinematicTrack, b: KinematicTrack, active: np.ndarray):
    ha = np.radians(np.nan_to_num(a.heading))
    hb = np.radians(np.nan_to_num(b.heading))
    ax, ay = np.sin(ha), np.cos(ha)
    bx, by = np.sin(hb), np.cos(hb)
    cross = ax * by - ay * bx
    dx = b.pos[:, 0] - a.pos[:, 0]
    dy = b.pos[:, 1] - a.pos[:, 1]
    ok = active & (np.abs(cross) >= PARALLEL_TOL)
    safe = np.where(ok, cross, 1.0)
    s = (dx * by - dy * bx) / safe
    r = (dx * ay - dy * ax) / safe
    ok &= (s >= 0) & (r >= 0)
    with np.errstate(invalid="ignore", divide="ignore"):
        arr_a = np.where(ok, s / a.speed, np.nan)
        arr_b = np.where(ok, r / b.speed, np.nan)
    pts = np.column_stack((a.pos[:, 0] + s * ax, a.pos[:, 1] + s * ay))
    pts[~ok] = np.nan
    return pts, arr_a, arr_b


def _frame_ttc(a: KinematicTrack, b: KinematicTrack, active: np.ndarray, radius: float) -> np.ndarray:
    r = b.pos - a.pos
    v = b.velocity() - a.velocity()
    c = np.einsum("ij,ij->i", r, r) - radius * radius
    qa = np.einsum("ij,ij->i", v, v)
    half_b = np.einsum("ij,ij->i", r, v)
    disc = half_b * half_b - qa * c
    closing = (c > 0) & (qa >= MIN_CLOSING_SPEED**2) & (half_b < 0) & (disc >= 0)
    ttc = np.full(len(a), np.nan)
    with np.errstate(invalid="ignore", divide="ignore"):
        ttc[closing] = c[closing] / (-half_b[closing] + np.sqrt(disc[closing]))
    ttc[c <= 0] = 0.0
    ttc[~active] = np.nan
    return ttc


def analyze_tracks(a: KinematicTrack, b: KinematicTrack, cfg: ConflictConfig = ConflictConfig()) -> ConflictProfile:
    """Conflict profile for two synchronised kinematic tracks (agent order is irrelevant to the verdict)."""
    if len(a) != len(b):
        raise ValueError("tracks must be synchronised")
    active = a.moving & b.moving & ~np.isnan(a.heading) & ~np.isnan(b.heading)
    pts, arr_a, arr_b = _frame_crossings(a, b, active)
    gap = np.abs(arr_a - arr_b)
    ttc = _frame_ttc(a, b, active, cfg.collision_radius)

    capped = gap[gap <= cfg.gap_cap]
    min_gap = float(capped.min()) if capped.size else None
    is_conflict = bool(np.any(gap < cfg.conflict_gap_threshold))

    mttc = None
    risk = None
    contact = bool(np.any(ttc == 0.0))
    if is_conflict:
        positive = ttc[ttc > 0]
        if positive.size:
            mttc = float(positive.min())
        if contact:
            risk = RiskLevel.HIGH
        elif mttc is not None:
            risk = risk_level(mttc, cfg)
    return ConflictProfile(
        t=a.t,
        crossing=pts,
        arrival_a=arr_a,
        arrival_b=arr_b,
        gap=gap,
        ttc=ttc,
        min_gap_time=min_gap,
        mttc=mttc,
        is_potential_conflict=is_conflict,
        risk=risk,
        contact=contact,
        analysed_frames=int(active.sum()),
    )


def analyze_case(
    case: EncounterCase,
    cfg: ConflictConfig = ConflictConfig(),
    eps: float = STATIONARY_EPS,
) -> ConflictProfile:
    """Frame-by-frame crossing / TTC analysis with the vehicle as agent ``a``."""
    return analyze_tracks(kinematic_track(case.vehicle, eps), kinematic_track(case.escooter, eps), cfg)
