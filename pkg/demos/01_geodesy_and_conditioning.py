"""
From raw GPS fixes to a clean planar track
==========================================

A noisy 2 Hz fix stream with a teleport glitch and a dropout is
conditioned onto a 10 Hz grid in metres.
"""

import numpy as np

from scootsafe.geodesy import GeoPoint, ProjectionContext, bearing, haversine_distance, project, unproject
from scootsafe.trajectory import AgentKind, RawTrajectory, condition, remove_outliers

# distances and bearings work directly on latitude / longitude
a = GeoPoint(39.7684, -86.1581)
b = GeoPoint(39.7690, -86.1570)
print(f"a -> b: {haversine_distance(a, b):.2f} m at {bearing(a, b):.1f} deg")

# a tangent plane at a gives metres east / north
ctx = ProjectionContext.at(a)
x, y = project(ctx, b.lat, b.lon)
print(f"b in the plane: ({float(x):.2f}, {float(y):.2f}) m")

# a scooter heading north-east at 4 m/s, fixes every 0.5 s with 0.8 m jitter
rng = np.random.default_rng(7)
t = np.arange(0.0, 30.0, 0.5)
xy = np.outer(t, 4.0 * np.array([np.sin(np.radians(45)), np.cos(np.radians(45))]))
xy += rng.normal(0.0, 0.8, xy.shape)
xy[20] += (300.0, 0.0)  # one fix jumps 300 m east
keep = np.ones(len(t), bool)
keep[41] = False  # a one-second dropout, short enough to fill
lat, lon = unproject(ctx, xy[keep, 0], xy[keep, 1])
raw = RawTrajectory(AgentKind.ESCOOTER, t[keep], lat, lon)

# the glitch implies ~600 m/s and is dropped
print(f"{len(raw)} raw fixes, {len(remove_outliers(raw, 30.0))} after the speed filter")

# outlier removal, gap filling and smoothing in one call
clean = condition(raw, target_dt=0.1)
print(f"{len(clean)} conditioned fixes on [{clean.t[0]:.1f}, {clean.t[-1]:.1f}] s")

cx, cy = project(ctx, clean.lat, clean.lon)
step = np.hypot(np.diff(cx), np.diff(cy)) / np.diff(clean.t)
print(f"median conditioned speed {np.median(step):.2f} m/s (true 4.00)")
