"""Geodetic primitives: great-circle distance, bearing and a local tangent plane.

All downstream geometry runs in a planar frame centred on the encounter.  The
projection is the spherical orthographic (tangent-plane) projection, which has
an exact closed-form inverse and a scale error of roughly ``(d / R)**2 / 2``,
i.e. about 1e-8 at one kilometre from the origin.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import ProjectionDomainError, UndefinedBearingError

EARTH_RADIUS_M = 6_371_000.0
METERS_PER_DEG = EARTH_RADIUS_M * math.pi / 180.0
MAX_PROJECTION_RANGE_M = 10_000.0


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lon: float

    def __post_init__(self):
        if not (math.isfinite(self.lat) and math.isfinite(self.lon)):
            raise ValueError(f"non-finite coordinate: ({self.lat}, {self.lon})")
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude out of range: {self.lat}")
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"longitude out of range: {self.lon}")


@dataclass(frozen=True)
class PlanePoint:
    """Metres east (``x``) and north (``y``) of a projection origin."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite plane point: ({self.x}, {self.y})")

    def __sub__(self, other: PlanePoint) -> PlanePoint:
        return PlanePoint(self.x - other.x, self.y - other.y)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


@dataclass(frozen=True)
class ProjectionContext:
    """Tangent plane anchored at ``origin``.

    ``meters_per_deg_lat`` and ``meters_per_deg_lon`` are the local scale
    factors at the origin; they are informative and used for quick checks,
    the projection itself is exact spherical trigonometry.
    """

    origin: GeoPoint
    meters_per_deg_lat: float
    meters_per_deg_lon: float

    def __post_init__(self):
        if not self.meters_per_deg_lat > 0:
            raise ValueError("meters_per_deg_lat must be positive")
        if not self.meters_per_deg_lon >= 0:
            raise ValueError("meters_per_deg_lon must be non-negative")

    @classmethod
    def at(cls, origin: GeoPoint) -> ProjectionContext:
        return cls(
            origin=origin,
            meters_per_deg_lat=METERS_PER_DEG,
            meters_per_deg_lon=METERS_PER_DEG * max(math.cos(math.radians(origin.lat)), 0.0),
        )

    @classmethod
    def from_points(cls, lat: Iterable[float], lon: Iterable[float]) -> ProjectionContext:
        """Context centred on the centroid of the given coordinates."""
        lat = np.asarray(list(lat) if not isinstance(lat, np.ndarray) else lat, dtype=float)
        lon = np.asarray(list(lon) if not isinstance(lon, np.ndarray) else lon, dtype=float)
        if lat.size == 0:
            raise ValueError("cannot build a projection context from no points")
        return cls.at(GeoPoint(float(lat.mean()), float(lon.mean())))


def haversine_distance(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in metres on a sphere of radius 6,371 km."""
    return haversine_scalar(a.lat, a.lon, b.lat, b.lon)


def haversine_scalar(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    phi1, phi2 = math.radians(lat1), math.radians(lat2)
    dphi = phi2 - phi1
    dlam = math.radians(lon2 - lon1)
    h = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(math.sqrt(min(max(h, 0.0), 1.0)))


def haversine_array(lat1, lon1, lat2, lon2):
    """Vectorised haversine distance in metres; broadcasts like numpy."""
    phi1 = np.radians(lat1)
    phi2 = np.radians(lat2)
    dphi = phi2 - phi1
    dlam = np.radians(np.asarray(lon2) - np.asarray(lon1))
    h = np.sin(dphi / 2.0) ** 2 + np.cos(phi1) * np.cos(phi2) * np.sin(dlam / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * np.arcsin(np.sqrt(np.clip(h, 0.0, 1.0)))


def bearing(a: GeoPoint, b: GeoPoint) -> float:
    """Initial great-circle bearing from ``a`` to ``b`` in degrees, 0 = north, 90 = east."""
    if a == b:
        raise UndefinedBearingError(f"bearing undefined between coincident points {a}")
    phi1, phi2 = math.radians(a.lat), math.radians(b.lat)
    dlam = math.radians(b.lon - a.lon)
    y = math.sin(dlam) * math.cos(phi2)
    x = math.cos(phi1) * math.sin(phi2) - math.sin(phi1) * math.cos(phi2) * math.cos(dlam)
    if x == 0.0 and y == 0.0:
        raise UndefinedBearingError(f"bearing undefined between {a} and {b}")
    return float(wrap360(math.degrees(math.atan2(y, x))))


def project(ctx: ProjectionContext, lat, lon, check: bool = True):
    """Vectorised forward projection; returns ``(x, y)`` arrays in metres."""
    lat = np.asarray(lat, dtype=float)
    lon = np.asarray(lon, dtype=float)
    lat0, lon0 = ctx.origin.lat, ctx.origin.lon
    if check:
        dist = haversine_array(lat0, lon0, lat, lon)
        if np.any(dist >= MAX_PROJECTION_RANGE_M):
            worst = float(np.max(dist))
            raise ProjectionDomainError(
                f"point {worst:.0f} m from projection origin exceeds "
                f"{MAX_PROJECTION_RANGE_M:.0f} m encounter range"
            )
    phi = np.radians(lat)
    phi0 = math.radians(lat0)
    dlam = np.radians(lon - lon0)
    cos_phi = np.cos(phi)
    x = EARTH_RADIUS_M * cos_phi * np.sin(dlam)
    y = EARTH_RADIUS_M * (math.cos(phi0) * np.sin(phi) - math.sin(phi0) * cos_phi * np.cos(dlam))
    return x, y


def unproject(ctx: ProjectionContext, x, y):
    """Vectorised inverse of :func:`project`; returns ``(lat, lon)`` arrays in degrees."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    phi0 = math.radians(ctx.origin.lat)
    rho = np.hypot(x, y)
    c = np.arcsin(np.clip(rho / EARTH_RADIUS_M, 0.0, 1.0))
    sin_c, cos_c = np.sin(c), np.cos(c)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(rho > 0.0, y * sin_c / np.where(rho > 0.0, rho, 1.0), 0.0)
    phi = np.arcsin(np.clip(cos_c * math.sin(phi0) + ratio * math.cos(phi0), -1.0, 1.0))
    lam = np.arctan2(x * sin_c, rho * cos_c * math.cos(phi0) - y * sin_c * math.sin(phi0))
    lat = np.degrees(phi)
    lon = (ctx.origin.lon + np.degrees(lam) + 180.0) % 360.0 - 180.0
    return lat, lon


def to_plane(ctx: ProjectionContext, p: GeoPoint) -> PlanePoint:
    x, y = project(ctx, p.lat, p.lon)
    return PlanePoint(float(x), float(y))


def from_plane(ctx: ProjectionContext, q: PlanePoint) -> GeoPoint:
    lat, lon = unproject(ctx, q.x, q.y)
    return GeoPoint(float(lat), float(lon))


def wrap360(deg):
    """Wrap angle(s) into ``[0, 360)``; guards the ``-tiny % 360 == 360.0`` rounding case."""
    w = np.mod(deg, 360.0)
    return np.where(w >= 360.0, 0.0, w)


def planar_heading(dx, dy):
    """Compass heading (degrees, 0 = north, clockwise) of planar displacement(s)."""
    return wrap360(np.degrees(np.arctan2(dx, dy)))
