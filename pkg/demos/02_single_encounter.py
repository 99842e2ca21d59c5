"""
Gap time and time-to-collision for one encounter
================================================

A vehicle and a scooter approach the same point on perpendicular paths.
Each frame projects both forward at constant velocity; the difference of
their arrival times at the crossing is the gap time.
"""

import numpy as np

from scootsafe.conflict import analyze_case, coast_intersection, CoastRay, instantaneous_ttc
from scootsafe.geodesy import PlanePoint
from scootsafe.geometry import GeometryClass
from scootsafe.kinematics import KinematicState, min_distance
from scootsafe.scenario import ScenarioSpec, generate_case

# two rays meeting at the origin
veh = CoastRay(PlanePoint(0.0, -50.0), heading=0.0, speed=10.0)
esc = CoastRay(PlanePoint(-30.0, 0.0), heading=90.0, speed=5.0)
hit = coast_intersection(veh, esc)
print(f"crossing at ({hit.point.x:.1f}, {hit.point.y:.1f}); arrivals {hit.arrival_a:.1f} s and {hit.arrival_b:.1f} s")

# head-on closure to a 2 m radius
a = KinematicState(0.0, PlanePoint(0.0, 0.0), 10.0, 90.0, True)
b = KinematicState(0.0, PlanePoint(30.0, 0.0), 5.0, 270.0, True)
print(f"head-on TTC {instantaneous_ttc(a, b, 2.0):.4f} s")

# a whole case: the scooter reaches the crossing 0.8 s before the vehicle
spec = ScenarioSpec(GeometryClass.CROSSING_FROM_LEFT, vehicle_speed=9.0, escooter_speed=4.5, designed_gap=-0.8)
case = generate_case(spec, case_id="demo")
prof = analyze_case(case)
print(f"{len(case)} frames, closest approach {min_distance(case):.2f} m")
print(f"minimum gap {prof.min_gap_time:.3f} s -> potential conflict: {prof.is_potential_conflict}")
print(f"mTTC {prof.mttc}, risk {prof.risk.value if prof.risk else None}")

# the gap series is flat for constant-velocity agents
g = prof.gap[~np.isnan(prof.gap)]
print(f"per-frame gaps span {g.min():.3f}..{g.max():.3f} s over {g.size} frames")
