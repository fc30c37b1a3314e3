import numpy as np
import pytest

from leoroute import geometry
from leoroute.geometry import ConstellationConfig, GroundStation
from leoroute.link_budget import LinkBudgetParams
from leoroute.topology import build_topology


@pytest.fixture(scope="session")
def stations():
    return geometry.load_ground_stations()


@pytest.fixture(scope="session")
def default_snapshot(stations):
    c = geometry.propagate(geometry.build_constellation(ConstellationConfig()), 123456.0)
    return build_topology(c, stations, LinkBudgetParams())


@pytest.fixture(scope="session")
def small_snapshot():
    """M=3, N_a=4 high constellation with four ground stations."""
    cfg = ConstellationConfig(num_planes=3, sats_per_plane=4, base_altitude_km=20000.0, altitude_step_km=50.0)
    c = geometry.propagate(geometry.build_constellation(cfg), 5000.0)
    gs = [GroundStation("n", 60.0, 10.0), GroundStation("s", -50.0, 120.0),
          GroundStation("e", 5.0, -70.0), GroundStation("w", 20.0, 170.0)]
    return build_topology(c, gs, LinkBudgetParams())


def rotated_snapshots(count, seed=0, stations=None, cfg=None, params=None):
    cfg = cfg or ConstellationConfig()
    stations = stations or geometry.load_ground_stations()
    params = params or LinkBudgetParams()
    rng = np.random.default_rng(seed)
    for _ in range(count):
        c = geometry.propagate(geometry.build_constellation(cfg), rng.uniform(1e4, 1e6))
        yield build_topology(c, stations, params)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
