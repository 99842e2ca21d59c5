"""
The four encounter geometries
=============================

Cases are classified from the mean relative heading over the four
seconds around closest approach.
"""

from scootsafe.geometry import GeometryClass, classify_geometry, interaction_phase, relative_heading
from scootsafe.scenario import ScenarioSpec, generate_case

for g in GeometryClass:
    for noise in (0.0, 0.5):
        case = generate_case(ScenarioSpec(g, 10.0, 4.0, designed_gap=1.0, noise_sigma=noise, seed=11))
        phase = interaction_phase(case)
        got = classify_geometry(case, phase)
        rel = relative_heading(case, phase)
        print(f"{g.value:30s} noise {noise:.1f} m: phase [{phase.t_start:5.1f}, {phase.t_end:5.1f}] s, "
              f"relative heading {rel:7.1f} deg -> {got.value}")
