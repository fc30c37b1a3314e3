import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leoroute import geometry
from leoroute.errors import UnreachableError
from leoroute.geometry import ConstellationConfig, GroundStation
from leoroute.link_budget import SPEED_OF_LIGHT, LinkBudgetParams
from leoroute.metrics import Metric, RouteQuery, edge_weights
from leoroute.routing import (Router, RoutePath, burst_latencies, burst_latency, routes_from, shortest_path,
                              single_packet_latency)
from leoroute.topology import Edge, LinkKind, TopologySnapshot

P = 1e6


def synthetic(num_sats, isl_edges, gs_sats):
    """Snapshot with hand-made edges on a one-plane constellation."""
    c = geometry.build_constellation(ConstellationConfig(num_planes=1, sats_per_plane=num_sats))
    gs = [GroundStation(f"g{i}", 0.0, 0.0) for i in range(len(gs_sats))]
    edges = [Edge(min(u, v), max(u, v), LinkKind.INTRA_ISL, float(l), float(r), (0, 0))
             for u, v, l, r in isl_edges]
    edges += [Edge(s, num_sats + g, LinkKind.GSL, 500.0, math.inf) for g, s in enumerate(gs_sats)]
    return TopologySnapshot(c, gs, LinkBudgetParams(), edges, gs_sats)


def all_simple_paths(snapshot, src, dst):
    out = []

    def walk(x, seen, edges):
        if x == dst:
            out.append(list(edges))
            return
        for y, k in snapshot.adjacency[x]:
            if y not in seen and (not snapshot.is_ground(y) or y == dst):
                seen.add(y)
                edges.append((x, k))
                walk(y, seen, edges)
                edges.pop()
                seen.discard(y)

    walk(src, {src}, [])
    return out


def brute_force_cost(snapshot, kind, u, v):
    gate = RouteQuery.for_pair(snapshot, u, v).gate if Metric.parse(kind).is_pathloss else 1.0
    w = edge_weights(snapshot, kind, gate=gate)
    best = math.inf
    for p in all_simple_paths(snapshot, snapshot.gs_vertex(u), snapshot.gs_vertex(v)):
        cost = sum(w[k, 0] if snapshot.edges[k].u == x else w[k, 1] for x, k in p)
        best = min(best, cost)
    return best


def test_triangle_latency_picks_direct():
    # direct 0-2 is 3000 km at 200 Mbit/s; via 1 is 2 x 1000 km at 400 Mbit/s
    s = synthetic(3, [(0, 2, 3000, 200e6), (0, 1, 1000, 400e6), (1, 2, 1000, 400e6)], [0, 2])
    p = shortest_path(s, Metric.LATENCY, 0, 1)
    via = 2 * (P / 400e6 + 1000e3 / SPEED_OF_LIGHT)
    direct = P / 200e6 + 3000e3 / SPEED_OF_LIGHT
    assert via < direct
    assert p.vertices == (3, 0, 1, 2, 4)
    assert p.cost == pytest.approx(via + 2 * 500e3 / SPEED_OF_LIGHT, rel=1e-12)
    assert shortest_path(s, Metric.HOP_COUNT, 0, 1, np.random.default_rng(0)).vertices == (3, 0, 2, 4)


def test_shared_gsl_satellite():
    s = synthetic(3, [(0, 1, 1000, 1e8), (1, 2, 1000, 1e8), (0, 2, 1000, 1e8)], [1, 1])
    for kind in Metric:
        p = shortest_path(s, kind, 0, 1, np.random.default_rng(0))
        assert p.hops == 2 and p.isl_hops == 0
        assert p.vertices == (3, 1, 4)


def test_unreachable():
    s = synthetic(4, [(0, 1, 1000, 1e8), (2, 3, 1000, 1e8)], [0, 3])
    with pytest.raises(UnreachableError) as info:
        shortest_path(s, Metric.LATENCY, 0, 1)
    assert (info.value.source, info.value.destination) == (0, 1)


@pytest.mark.parametrize("kind", [Metric.LATENCY, Metric.PATHLOSS, Metric.PATHLOSS_FULL])
def test_matches_brute_force_small(small_snapshot, kind):
    s = small_snapshot
    for u, v in itertools.permutations(range(s.num_ground_stations), 2):
        p = shortest_path(s, kind, u, v)
        assert p.cost == pytest.approx(brute_force_cost(s, kind, u, v), rel=1e-12, abs=1e-15)
        assert p.source == s.gs_vertex(u) and p.destination == s.gs_vertex(v)


def test_hop_matches_brute_force_small(small_snapshot):
    s = small_snapshot
    rng = np.random.default_rng(3)
    for u, v in itertools.permutations(range(s.num_ground_stations), 2):
        assert shortest_path(s, Metric.HOP_COUNT, u, v, rng).cost == brute_force_cost(s, Metric.HOP_COUNT, u, v)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_matches_brute_force_random_graphs(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 11))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.35]
    pairs += [(i, i + 1) for i in range(n - 1)]
    pairs = sorted(set(pairs))
    isl = [(i, j, rng.uniform(200, 5000), rng.uniform(50e6, 1e9)) for i, j in pairs]
    g = int(rng.integers(2, 5))
    s = synthetic(n, isl, [int(x) for x in rng.integers(0, n, g)])
    for kind in (Metric.LATENCY, Metric.HOP_COUNT):
        for u, v in itertools.permutations(range(g), 2):
            got = shortest_path(s, kind, u, v, rng).cost
            assert got == pytest.approx(brute_force_cost(s, kind, u, v), rel=1e-12)


def test_routes_from_agrees_with_shortest_path(default_snapshot):
    s = default_snapshot
    for kind in (Metric.PATHLOSS, Metric.LATENCY, Metric.PATHLOSS_FULL):
        tree = routes_from(s, kind, 4, range(5, 23))
        for v, p in tree.items():
            assert p == shortest_path(s, kind, 4, v)


def test_pathloss_same_plane_uses_no_inter_links(default_snapshot):
    s = default_snapshot
    for u, v in itertools.combinations(range(s.num_ground_stations), 2):
        if s.plane_of(s.gs_vertex(u)) == s.plane_of(s.gs_vertex(v)):
            p = shortest_path(s, Metric.PATHLOSS, u, v)
            assert LinkKind.INTER_ISL not in p.kinds
            assert math.isfinite(p.cost)


def test_hop_ties_vary(default_snapshot):
    rng = np.random.default_rng(0)
    varied = 0
    for u, v in itertools.combinations(range(8), 2):
        paths = [shortest_path(default_snapshot, Metric.HOP_COUNT, u, v, rng) for _ in range(10)]
        assert len({p.cost for p in paths}) == 1
        varied += len({p.edges for p in paths}) > 1
    assert varied > 0


def test_router_reuses_and_reverses(default_snapshot):
    r = Router(default_snapshot, Metric.LATENCY)
    a = r.route(3, 7)
    b = r.route(7, 3)
    assert b == a.reversed()
    assert r.route(3, 7) is a


def _path(lengths, rates):
    kinds = [LinkKind.GSL] + [LinkKind.INTRA_ISL] * (len(lengths) - 2) + [LinkKind.GSL]
    return RoutePath(tuple(range(len(lengths) + 1)), tuple(range(len(lengths))), tuple(lengths),
                     tuple(rates), tuple(kinds))


def test_single_packet_closed_form():
    p = _path([800.0, 2000.0, 1500.0, 700.0], [math.inf, 344e6, 200e6, math.inf])
    expect = P / 344e6 + P / 200e6 + 5000e3 / SPEED_OF_LIGHT
    assert burst_latency(p, 1, P) == pytest.approx(expect, abs=1e-15)
    assert single_packet_latency(p, P) == pytest.approx(expect, abs=1e-15)


def test_two_packets_one_isl():
    p = _path([1.0, 2000.0, 1.0], [math.inf, 344e6, math.inf])
    lat = burst_latencies(p, 2, P)
    prop = 2002e3 / SPEED_OF_LIGHT
    assert lat[0] == pytest.approx(P / 344e6 + prop, abs=1e-15)
    assert lat[1] == pytest.approx(2 * P / 344e6 + prop, abs=1e-15)


def test_pipelining_bottleneck():
    # n packets over two ISLs: (n - 1) p / R_min plus the single packet time
    p = _path([10.0, 1000.0, 1000.0, 10.0], [math.inf, 100e6, 400e6, math.inf])
    n = 7
    lat = burst_latency(p, n, P)
    assert lat == pytest.approx(single_packet_latency(p, P) + (n - 1) * P / 100e6, abs=1e-12)
    assert lat < n * single_packet_latency(p, P)


def test_waiting_enters_additively():
    p = _path([10.0, 1000.0, 10.0], [math.inf, 100e6, math.inf])
    w = np.array([[0.0, 0.003, 0.0]])
    assert burst_latency(p, 1, P, w) == pytest.approx(burst_latency(p, 1, P) + 0.003, abs=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_monotone_in_size_and_rate(seed):
    rng = np.random.default_rng(seed)
    h = int(rng.integers(1, 6))
    lengths = [100.0] + list(rng.uniform(500, 4000, h)) + [100.0]
    rates = [math.inf] + list(rng.uniform(50e6, 1e9, h)) + [math.inf]
    p = _path(lengths, rates)
    lat = burst_latencies(p, 10, P)
    assert np.all(np.diff(lat) > 0)
    faster = _path(lengths, [r * 2 for r in rates])
    assert np.all(burst_latencies(faster, 10, P) <= lat)


def test_invalid_inputs():
    p = _path([10.0, 1000.0, 10.0], [math.inf, 100e6, math.inf])
    with pytest.raises(ValueError):
        burst_latencies(p, 0, P)
    with pytest.raises(ValueError):
        burst_latencies(_path([10.0, 1000.0, 10.0], [math.inf, 0.0, math.inf]), 1, P)
    with pytest.raises(ValueError):
        burst_latencies(p, 2, P, np.zeros((1, 3)))
