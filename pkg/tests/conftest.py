import numpy as np
import pytest

from scootsafe.geodesy import GeoPoint, ProjectionContext
from scootsafe.trajectory import AgentKind, CleanTrajectory, Dataset, EncounterCase

INDY = GeoPoint(39.7684, -86.1581)
CTX = ProjectionContext.at(INDY)


def linear_track(start, velocity, n, dt=0.1, t0=0.0, t_ref=0.0):
    """Constant-velocity planar track sampled at ``t0 + k*dt``; ``start`` is the position at ``t_ref``."""
    t = t0 + np.arange(n) * dt
    return np.asarray(start, float) + np.outer(t - t_ref, np.asarray(velocity, float))


def planar_case(vehicle_xy, escooter_xy, dt=0.1, t0=0.0, case_id="fixture", dataset=Dataset.VEHICLE_CENTERED):
    return EncounterCase(
        case_id,
        dataset,
        CleanTrajectory(AgentKind.VEHICLE, t0, dt, vehicle_xy, CTX),
        CleanTrajectory(AgentKind.ESCOOTER, t0, dt, escooter_xy, CTX),
    )


def perpendicular_fixture(n=101, dt=0.1):
    """Vehicle from (0,-50) north at 10 m/s, e-scooter from (-30,0) east at 5 m/s.

    Arrivals at the origin: 5.0 s and 6.0 s, so the gap is 1.0 s.
    Closest approach at t = 5.2 s, separation sqrt(20) m.
    """
    return planar_case(linear_track((0, -50), (0, 10), n, dt), linear_track((-30, 0), (5, 0), n, dt), dt)


def parallel_fixture(n=101, dt=0.1, offset=5.0, speed=8.0):
    return planar_case(linear_track((0, 0), (0, speed), n, dt), linear_track((offset, 0), (0, speed), n, dt), dt)


@pytest.fixture
def perpendicular_case():
    return perpendicular_fixture()


@pytest.fixture
def parallel_case():
    return parallel_fixture()


ACCEPTANCE_RESULTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)
