"""Synthetic constant-velocity encounters and brute-force reference oracles.

Generated cases have analytic ground truth: crossing geometries are built so
the two agents reach the crossing point exactly ``designed_gap`` seconds
apart, parallel geometries run on straight tracks a fixed lateral offset apart.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterator

import numpy as np

from .errors import InfeasibleSpecError
from .geodesy import GeoPoint, ProjectionContext, unproject
from .geometry import GeometryClass
from .kinematics import KinematicState
from .trajectory import AgentKind, Dataset, EncounterCase, RawTrajectory

# Downtown Indianapolis, where the reference field data were collected.
DEFAULT_ORIGIN = GeoPoint(39.7684, -86.1581)

# Minimum time before the first arrival at the crossing, so the approach is observed.
MIN_LEAD_S = 1.0


@dataclass(frozen=True)
class ScenarioSpec:
    geometry: GeometryClass
    vehicle_speed: float
    escooter_speed: float
    designed_gap: float = 1.0
    duration: float = 20.0
    noise_sigma: float = 0.0
    seed: int = 0
    hz: float = 10.0
    lateral_offset: float = 3.0
    crossing_angle: float = 90.0
    vehicle_heading: float | None = None
    origin: GeoPoint = field(default=DEFAULT_ORIGIN)

    def __post_init__(self):
        object.__setattr__(self, "geometry", GeometryClass(self.geometry))
        if not (self.vehicle_speed > 0 and self.escooter_speed > 0):
            raise InfeasibleSpecError("both speeds must be positive")
        if not self.duration > 0 or not self.hz > 0:
            raise InfeasibleSpecError("duration and hz must be positive")
        if not self.noise_sigma >= 0:
            raise InfeasibleSpecError("noise_sigma must be non-negative")
        if self.is_crossing:
            if not 45.0 < self.crossing_angle < 135.0:
                raise InfeasibleSpecError("crossing_angle must lie strictly between 45 and 135 degrees")
            if self.duration / 2 - abs(self.designed_gap) / 2 < MIN_LEAD_S:
                raise InfeasibleSpecError(
                    f"designed gap {self.designed_gap} s does not fit a {self.duration} s encounter"
                )

    @property
    def is_crossing(self) -> bool:
        return self.geometry in (GeometryClass.CROSSING_FROM_LEFT, GeometryClass.CROSSING_FROM_RIGHT)


def _unit(heading_deg: float) -> np.ndarray:
    h = math.radians(heading_deg)
    return np.array([math.sin(h), math.cos(h)])


def planar_tracks(spec: ScenarioSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Noise-free ``(t, vehicle_xy, escooter_xy)`` in a plane centred on the encounter.

    Crossing cases put the crossing point at the origin; the vehicle reaches
    it at ``duration/2 - gap/2`` and the e-scooter at ``duration/2 + gap/2``
    (a negative gap means the e-scooter arrives first).  Parallel cases are
    abreast at ``duration/2`` with the e-scooter ``lateral_offset`` metres to
    the vehicle's right.
    """
    rng = np.random.default_rng(spec.seed)
    heading = spec.vehicle_heading if spec.vehicle_heading is not None else float(rng.uniform(0.0, 360.0))
    n = int(math.floor(spec.duration * spec.hz + 1e-9)) + 1
    t = np.arange(n) * (1.0 / spec.hz)
    mid = spec.duration / 2.0
    u_v = _unit(heading)
    right = np.array([u_v[1], -u_v[0]])

    g = spec.geometry
    if spec.is_crossing:
        sign = 1.0 if g is GeometryClass.CROSSING_FROM_LEFT else -1.0
        u_e = _unit(heading + sign * spec.crossing_angle)
        t_v = mid - spec.designed_gap / 2.0
        t_e = mid + spec.designed_gap / 2.0
        veh = np.outer(t - t_v, u_v) * spec.vehicle_speed
        esc = np.outer(t - t_e, u_e) * spec.escooter_speed
    else:
        u_e = u_v if g is GeometryClass.PARALLEL_SAME_DIRECTION else -u_v
        veh = np.outer(t - mid, u_v) * spec.vehicle_speed
        esc = np.outer(t - mid, u_e) * spec.escooter_speed + right * spec.lateral_offset
    return t, veh, esc


def generate_raw(spec: ScenarioSpec) -> tuple[RawTrajectory, RawTrajectory]:
    """Vehicle and e-scooter GPS tracks for ``spec``, with isotropic Gaussian position noise."""
    t, veh, esc = planar_tracks(spec)
    rng = np.random.default_rng(np.random.SeedSequence([spec.seed, 1]))
    if spec.noise_sigma > 0:
        veh = veh + rng.normal(0.0, spec.noise_sigma, veh.shape)
        esc = esc + rng.normal(0.0, spec.noise_sigma, esc.shape)
    ctx = ProjectionContext.at(spec.origin)
    out = []
    for agent, xy in ((AgentKind.VEHICLE, veh), (AgentKind.ESCOOTER, esc)):
        lat, lon = unproject(ctx, xy[:, 0], xy[:, 1])
        out.append(RawTrajectory(agent, t, lat, lon))
    return out[0], out[1]


def generate_case(
    spec: ScenarioSpec,
    case_id: str = "synthetic",
    dataset: Dataset = Dataset.VEHICLE_CENTERED,
    config=None,
) -> EncounterCase:
    """Generate ``spec`` and run it through the standard conditioning and synchronisation."""
    from .pipeline import build_case

    vehicle, escooter = generate_raw(spec)
    return build_case(case_id, dataset, vehicle, escooter, config)


def case_seed(seed: int, index: int) -> int:
    """Independent per-case seed derived from a corpus seed and the case index."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def iter_specs(template: ScenarioSpec, count: int, seed: int) -> Iterator[ScenarioSpec]:
    for k in range(count):
        yield replace(template, seed=case_seed(seed, k))


def brute_force_ttc(
    a: KinematicState,
    b: KinematicState,
    radius: float,
    dt: float = 1e-3,
    horizon: float = 60.0,
) -> float | None:
    """First time the constant-velocity separation drops to ``radius``, found by time stepping.

    The first step at or inside the radius is refined by bisection to 1e-6 s.
    Returns None if contact does not occur on any step up to ``horizon``.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if a.heading is None or b.heading is None:
        raise ValueError("both agents need a heading")
    ha, hb = math.radians(a.heading), math.radians(b.heading)
    r0 = np.array([b.pos.x - a.pos.x, b.pos.y - a.pos.y])
    v = np.array([b.speed * math.sin(hb) - a.speed * math.sin(ha), b.speed * math.cos(hb) - a.speed * math.cos(ha)])

    def sep(tau):
        return math.hypot(r0[0] + v[0] * tau, r0[1] + v[1] * tau)

    steps = np.arange(int(math.floor(horizon / dt + 1e-9)) + 1) * dt
    d = np.hypot(r0[0] + v[0] * steps, r0[1] + v[1] * steps)
    hit = np.flatnonzero(d <= radius)
    if hit.size == 0:
        return None
    k = int(hit[0])
    if k == 0:
        return 0.0
    lo, hi = float(steps[k - 1]), float(steps[k])
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        if sep(mid) <= radius:
            hi = mid
        else:
            lo = mid
    return hi


def brute_force_min_distance(case: EncounterCase, dt: float) -> float:
    """Minimum separation over a dense, linearly interpolated copy of the case timeline."""
    if not 0 < dt < case.dt:
        raise ValueError("dt must be positive and smaller than the case step")
    t = case.times
    dense = np.arange(t[0], t[-1] + dt / 2, dt)
    dense = dense[dense <= t[-1]]
    rel = case.escooter.points - case.vehicle.points
    dx = np.interp(dense, t, rel[:, 0])
    dy = np.interp(dense, t, rel[:, 1])
    return float(np.hypot(dx, dy).min())


_RANGED_FIELDS = (
    "vehicle_speed",
    "escooter_speed",
    "designed_gap",
    "duration",
    "noise_sigma",
    "lateral_offset",
    "crossing_angle",
    "vehicle_heading",
    "hz",
)


def specs_from_document(doc: dict, seed: int | None = None) -> list[tuple[str, Dataset, ScenarioSpec]]:
    """Expand a corpus description into ``(case_id, dataset, spec)`` triples.

    ``doc`` has an optional top-level ``seed`` and ``origin`` ({"lat", "lon"})
    and a list of ``groups``.  Each group gives ``count``, ``geometry``,
    optional ``dataset`` and ``id_prefix``, and any ScenarioSpec field; numeric
    fields may be a ``[low, high]`` pair, drawn uniformly per case.  Draws use
    a stream derived from (seed, case index), so every case is reproducible on
    its own.
    """
    if not isinstance(doc, dict) or not isinstance(doc.get("groups"), list) or not doc["groups"]:
        raise InfeasibleSpecError("generation spec needs a non-empty 'groups' list")
    seed = int(doc.get("seed", 0) if seed is None else seed)
    origin = DEFAULT_ORIGIN
    if "origin" in doc:
        origin = GeoPoint(float(doc["origin"]["lat"]), float(doc["origin"]["lon"]))

    out = []
    index = 0
    for gi, group in enumerate(doc["groups"]):
        group = dict(group)
        count = int(group.pop("count", 1))
        dataset = Dataset(group.pop("dataset", Dataset.VEHICLE_CENTERED.value))
        prefix = str(group.pop("id_prefix", f"g{gi:02d}"))
        unknown = set(group) - set(_RANGED_FIELDS) - {"geometry"}
        if unknown:
            raise InfeasibleSpecError(f"unknown field(s) in group {gi}: {', '.join(sorted(unknown))}")
        for k in range(count):
            s = case_seed(seed, index)
            rng = np.random.default_rng(np.random.SeedSequence([seed, index, 2]))
            values = {}
            for name in _RANGED_FIELDS:
                if name not in group:
                    continue
                v = group[name]
                if isinstance(v, (list, tuple)):
                    lo, hi = (float(x) for x in v)
                    v = float(rng.uniform(lo, hi))
                values[name] = v
            try:
                spec = ScenarioSpec(geometry=GeometryClass(group["geometry"]), seed=s, origin=origin, **values)
            except KeyError:
                raise InfeasibleSpecError(f"group {gi} has no geometry") from None
            except (TypeError, ValueError) as exc:
                if isinstance(exc, InfeasibleSpecError):
                    raise
                raise InfeasibleSpecError(f"group {gi}: {exc}") from None
            out.append((f"{prefix}-{k:04d}", dataset, spec))
            index += 1
    return out
