"""Raw GPS tracks, conditioning (outliers, gaps, smoothing) and case synchronisation."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.signal import savgol_filter

from .errors import DegenerateTrajectoryError, NoOverlapError
from .geodesy import (
    GeoPoint,
    PlanePoint,
    ProjectionContext,
    haversine_array,
    haversine_scalar,
    project,
    unproject,
)

logger = logging.getLogger(__name__)

# Tolerance used when comparing interval lengths against a target step, so that
# a 0.1 s interval stored as 0.10000000000000009 is not split in two.
_STEP_TOL = 1e-9


class AgentKind(str, Enum):
    VEHICLE = "vehicle"
    ESCOOTER = "escooter"


class Dataset(str, Enum):
    VEHICLE_CENTERED = "vehicle_centered"
    ESCOOTER_CENTERED = "escooter_centered"


@dataclass(frozen=True)
class GpsFix:
    t: float
    pos: GeoPoint
    alt: float | None = None


@dataclass(frozen=True, eq=False)
class RawTrajectory:
    """Time-ordered geodetic fixes of one agent, held as parallel arrays."""

    agent: AgentKind
    t: np.ndarray
    lat: np.ndarray
    lon: np.ndarray
    alt: np.ndarray | None = None

    def __post_init__(self):
        for name in ("t", "lat", "lon") + (("alt",) if self.alt is not None else ()):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = self.t.size
        if n < 2:
            raise DegenerateTrajectoryError(f"{self.agent.value} trajectory needs at least 2 fixes, got {n}")
        if self.lat.shape != (n,) or self.lon.shape != (n,) or (self.alt is not None and self.alt.shape != (n,)):
            raise ValueError("t, lat, lon (and alt) must be 1-D arrays of equal length")
        if not np.all(np.isfinite(self.t)):
            raise ValueError("timestamps must be finite")
        if not np.all(np.diff(self.t) > 0):
            raise ValueError("timestamps must be strictly increasing")
        if not (np.all(np.isfinite(self.lat)) and np.all(np.isfinite(self.lon))):
            raise ValueError("coordinates must be finite")
        if np.any(np.abs(self.lat) > 90.0) or np.any(np.abs(self.lon) > 180.0):
            raise ValueError("coordinates out of range")

    @classmethod
    def from_fixes(cls, agent: AgentKind, fixes: Sequence[GpsFix]) -> RawTrajectory:
        alts = [f.alt for f in fixes]
        alt = None if any(a is None for a in alts) else np.array(alts, dtype=float)
        return cls(
            agent=agent,
            t=np.array([f.t for f in fixes], dtype=float),
            lat=np.array([f.pos.lat for f in fixes], dtype=float),
            lon=np.array([f.pos.lon for f in fixes], dtype=float),
            alt=alt,
        )

    @property
    def fixes(self) -> list[GpsFix]:
        alts = self.alt if self.alt is not None else [None] * len(self)
        return [
            GpsFix(float(t), GeoPoint(float(la), float(lo)), None if a is None else float(a))
            for t, la, lo, a in zip(self.t, self.lat, self.lon, alts)
        ]

    def __len__(self) -> int:
        return int(self.t.size)

    def _replace(self, idx=None, **arrays) -> RawTrajectory:
        if idx is not None:
            arrays = {
                "t": self.t[idx],
                "lat": self.lat[idx],
                "lon": self.lon[idx],
                "alt": None if self.alt is None else self.alt[idx],
            }
        return RawTrajectory(agent=self.agent, **arrays)

    def local_context(self) -> ProjectionContext:
        return ProjectionContext.from_points(self.lat, self.lon)


@dataclass(frozen=True, eq=False)
class CleanTrajectory:
    """Uniformly sampled planar track; ``points`` is an ``(n, 2)`` array of (x, y) metres."""

    agent: AgentKind
    t0: float
    dt: float
    points: np.ndarray
    ctx: ProjectionContext

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("points must have shape (n, 2)")
        if pts.shape[0] < 2:
            raise DegenerateTrajectoryError("clean trajectory needs at least 2 points")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return int(self.points.shape[0])

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(len(self)) * self.dt

    @property
    def plane_points(self) -> list[PlanePoint]:
        return [PlanePoint(float(x), float(y)) for x, y in self.points]


@dataclass(frozen=True, eq=False)
class EncounterCase:
    id: str
    dataset: Dataset
    vehicle: CleanTrajectory
    escooter: CleanTrajectory

    def __post_init__(self):
        v, e = self.vehicle, self.escooter
        if v.agent is not AgentKind.VEHICLE or e.agent is not AgentKind.ESCOOTER:
            raise ValueError("encounter case needs one vehicle and one e-scooter trajectory")
        if v.t0 != e.t0 or v.dt != e.dt or len(v) != len(e) or v.ctx != e.ctx:
            raise ValueError(f"case {self.id!r}: trajectories are not synchronised")

    @property
    def times(self) -> np.ndarray:
        return self.vehicle.times

    @property
    def dt(self) -> float:
        return self.vehicle.dt

    def __len__(self) -> int:
        return len(self.vehicle)


def remove_outliers(raw: RawTrajectory, max_speed: float) -> RawTrajectory:
    """Drop fixes whose implied speed from the last retained fix exceeds ``max_speed`` (m/s).

    The first fix is always retained.
    """
    t, lat, lon = raw.t, raw.lat, raw.lon
    step_ok = haversine_array(lat[:-1], lon[:-1], lat[1:], lon[1:]) <= max_speed * np.diff(t)
    if step_ok.all():
        return raw
    n = len(raw)
    keep = [0]
    i = 1
    while i < n:
        j = keep[-1]
        if j == i - 1:
            # accept the run of plausible steps after the last kept fix; the fix ending it fails
            bad = np.flatnonzero(~step_ok[j:])
            stop = n if bad.size == 0 else i + int(bad[0])
            keep.extend(range(i, stop))
            i = stop + 1
        else:
            if haversine_scalar(lat[j], lon[j], lat[i], lon[i]) <= max_speed * (t[i] - t[j]):
                keep.append(i)
            i += 1
    if len(keep) < 2:
        raise DegenerateTrajectoryError(
            f"only {len(keep)} {raw.agent.value} fix(es) survive the {max_speed} m/s outlier filter"
        )
    logger.debug("outlier filter dropped %d of %d fixes", len(raw) - len(keep), len(raw))
    return raw._replace(idx=np.asarray(keep))


def _longest_segment(t: np.ndarray, max_gap: float) -> tuple[int, int]:
    breaks = np.flatnonzero(np.diff(t) > max_gap)
    starts = np.concatenate(([0], breaks + 1))
    stops = np.concatenate((breaks + 1, [t.size]))
    durations = t[stops - 1] - t[starts]
    k = int(np.argmax(durations))  # first maximum: ties go to the earlier segment
    return int(starts[k]), int(stops[k])


def interpolate_gaps(raw: RawTrajectory, target_dt: float, max_gap: float) -> RawTrajectory:
    """Fill every interval up to ``max_gap`` with linear fixes spaced at most ``target_dt`` apart.

    Intervals longer than ``max_gap`` split the track; only the longest piece
    (by duration, earliest on ties) is kept.  Interpolation is linear in the
    local tangent plane.
    """
    if not target_dt > 0 or not max_gap > 0:
        raise ValueError("target_dt and max_gap must be positive")
    start, stop = _longest_segment(raw.t, max_gap)
    if stop - start < len(raw):
        logger.warning(
            "%s track has gaps over %.3g s; keeping fixes %d..%d of %d",
            raw.agent.value, max_gap, start, stop - 1, len(raw),
        )
        if stop - start < 2:
            raise DegenerateTrajectoryError("no contiguous segment with at least 2 fixes")
        raw = raw._replace(idx=slice(start, stop))

    dts = np.diff(raw.t)
    parts = np.maximum(1, np.ceil(dts / target_dt - _STEP_TOL)).astype(int)
    if np.all(parts == 1):
        return raw

    seg = np.repeat(np.arange(dts.size), parts)
    offsets = np.arange(seg.size) - np.repeat(np.cumsum(parts) - parts, parts)
    frac = offsets / parts[seg]

    ctx = raw.local_context()
    x, y = project(ctx, raw.lat, raw.lon, check=False)

    def lerp(v):
        return np.append(v[seg] + frac * (v[seg + 1] - v[seg]), v[-1])

    lat, lon = unproject(ctx, lerp(x), lerp(y))
    t = np.append(raw.t[seg] + frac * dts[seg], raw.t[-1])
    alt = None if raw.alt is None else lerp(raw.alt)
    return raw._replace(t=t, lat=lat, lon=lon, alt=alt)


def smooth(raw: RawTrajectory, window: int) -> RawTrajectory:
    """Centred moving average of planar position over ``window`` fixes.

    Near the ends the window is clamped inside the track and a local straight
    line fit is evaluated instead, so straight constant-speed tracks are fixed
    points everywhere.  Timestamps are untouched.
    """
    if window < 1 or window % 2 == 0:
        raise ValueError(f"window must be an odd count >= 1, got {window}")
    n = len(raw)
    if n % 2 == 0:
        window = min(window, n - 1)
    else:
        window = min(window, n)
    if window < 3:
        return raw
    ctx = raw.local_context()
    x, y = project(ctx, raw.lat, raw.lon, check=False)
    xy = np.vstack((x, y))
    dx, dy = savgol_filter(xy, window, 1, mode="interp", axis=-1) - xy
    # apply the correction as a local displacement so unmoved fixes keep their exact coordinates
    lat = raw.lat + dy / ctx.meters_per_deg_lat
    lon = raw.lon + dx / (ctx.meters_per_deg_lat * np.cos(np.radians(raw.lat)))
    lon = (lon + 180.0) % 360.0 - 180.0
    return raw._replace(t=raw.t, lat=lat, lon=lon, alt=raw.alt)


def condition(
    raw: RawTrajectory,
    *,
    max_speed: float = 30.0,
    target_dt: float = 0.1,
    max_gap: float = 1.0,
    window: int = 5,
) -> RawTrajectory:
    """Outlier removal, gap interpolation and smoothing, in that order."""
    raw = remove_outliers(raw, max_speed)
    raw = interpolate_gaps(raw, target_dt, max_gap)
    return smooth(raw, window)


def synchronize(
    a: RawTrajectory,
    b: RawTrajectory,
    hz: float,
    *,
    case_id: str = "case",
    dataset: Dataset = Dataset.VEHICLE_CENTERED,
    min_overlap: float = 1.0,
) -> EncounterCase:
    """Resample both tracks onto the shared uniform grid covering their overlap.

    The shared tangent plane is centred on the centroid of all fixes of both
    agents.  Argument order does not matter; agents are identified by kind.
    """
    if not hz > 0:
        raise ValueError("hz must be positive")
    if {a.agent, b.agent} != {AgentKind.VEHICLE, AgentKind.ESCOOTER}:
        raise ValueError("synchronize needs one vehicle and one e-scooter track")
    start = max(a.t[0], b.t[0])
    end = min(a.t[-1], b.t[-1])
    if end < start:
        raise NoOverlapError(
            f"case {case_id!r}: tracks do not overlap in time "
            f"([{a.t[0]:g}, {a.t[-1]:g}] vs [{b.t[0]:g}, {b.t[-1]:g}])"
        )
    if end - start < min_overlap:
        raise NoOverlapError(
            f"case {case_id!r}: tracks overlap for {end - start:g} s, less than {min_overlap:g} s"
        )
    dt = 1.0 / hz
    n = int(math.floor((end - start) * hz + _STEP_TOL)) + 1
    grid = start + np.arange(n) * dt

    ctx = ProjectionContext.from_points(np.concatenate((a.lat, b.lat)), np.concatenate((a.lon, b.lon)))
    tracks = {}
    for raw in (a, b):
        x, y = project(ctx, raw.lat, raw.lon)
        pts = np.column_stack((np.interp(grid, raw.t, x), np.interp(grid, raw.t, y)))
        tracks[raw.agent] = CleanTrajectory(raw.agent, float(start), dt, pts, ctx)
    return EncounterCase(case_id, Dataset(dataset), tracks[AgentKind.VEHICLE], tracks[AgentKind.ESCOOTER])
