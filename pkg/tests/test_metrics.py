import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leoroute import geometry
from leoroute.geometry import ConstellationConfig, GroundStation
from leoroute.link_budget import LinkBudgetParams
from leoroute.metrics import Metric, RouteQuery, edge_weights, plane_gate, simplified_pathloss_ratio, weight
from leoroute.topology import LinkKind, build_topology

GS2 = [GroundStation("a", 0.0, 0.0), GroundStation("b", 40.0, 100.0)]


def test_plane_gate():
    assert plane_gate(2, 2) == math.inf
    assert plane_gate(1, 3) == 1.0
    assert plane_gate(3, 1) == plane_gate(1, 3)


def test_metric_parse():
    assert Metric.parse("hop") is Metric.HOP_COUNT
    assert Metric.parse("pathloss-full") is Metric.PATHLOSS_FULL
    with pytest.raises(ValueError):
        Metric.parse("bogus")


def test_hop_weights_all_one(default_snapshot):
    for k in range(default_snapshot.num_edges):
        assert weight(default_snapshot, k, Metric.HOP_COUNT) == 1.0


def test_simplified_at_pole_is_zero():
    assert simplified_pathloss_ratio(math.pi / 2, 5, 40) == pytest.approx(0.0, abs=1e-30)


def test_simplified_at_equator():
    # (1 - cos 36 deg) / (1 - cos 9 deg), direct substitution
    expect = (1 - math.cos(math.radians(36))) / (1 - math.cos(math.radians(9)))
    assert simplified_pathloss_ratio(0.0, 5, 40) == pytest.approx(expect, rel=1e-14)
    assert expect == pytest.approx(15.51236915712823, rel=1e-12)


def test_latency_weight_example(default_snapshot):
    # p / R + l / c for p = 1 Mbit, R = 344 Mbit/s, l = 2000 km
    assert 1e6 / 344e6 + 2000e3 / 299792458.0 == pytest.approx(9.58e-3, abs=5e-6)
    s = default_snapshot
    k = s.edges_of_kind(LinkKind.INTER_ISL)[0]
    e = s.edges[k]
    assert weight(s, k, Metric.LATENCY) == pytest.approx(1e6 / e.rate_bps + e.length_km * 1e3 / 299792458.0)


def test_gsl_weights(default_snapshot):
    s = default_snapshot
    k = s.edges_of_kind(LinkKind.GSL)[0]
    e = s.edges[k]
    assert weight(s, k, Metric.PATHLOSS) == 0.0
    assert weight(s, k, Metric.PATHLOSS_FULL) == 0.0
    assert weight(s, k, Metric.HOP_COUNT) == 1.0
    assert weight(s, k, Metric.LATENCY) == e.length_km * 1e3 / 299792458.0


def test_intra_pathloss_is_one(default_snapshot):
    s = default_snapshot
    for k in s.edges_of_kind(LinkKind.INTRA_ISL)[:10]:
        assert weight(s, k, Metric.PATHLOSS) == weight(s, k, Metric.PATHLOSS_FULL) == 1.0


def test_full_is_distance_ratio(default_snapshot):
    s = default_snapshot
    cfg = s.constellation.config
    k = s.edges_of_kind(LinkKind.INTER_ISL)[3]
    e = s.edges[k]
    a = int(s.constellation.plane_of[e.v])
    spacing = 2 * (6371 + cfg.altitude_km(a)) * math.sin(math.pi / 40)
    assert weight(s, k, Metric.PATHLOSS_FULL, tail=e.v) == pytest.approx((e.length_km / spacing) ** 2, rel=1e-12)


def test_same_plane_gate_blocks_inter(default_snapshot):
    s = default_snapshot
    q = RouteQuery(0, 1, 2, 2)
    for k in s.edges_of_kind(LinkKind.INTER_ISL):
        assert weight(s, k, Metric.PATHLOSS, query=q) == math.inf
    w = edge_weights(s, Metric.PATHLOSS, gate=math.inf)
    inter = s.edge_kind == LinkKind.INTER_ISL
    assert np.all(np.isinf(w[inter]))
    assert np.all(np.isfinite(w[~inter]))


@pytest.mark.parametrize("kind", list(Metric))
def test_vectorised_matches_scalar(default_snapshot, kind):
    s = default_snapshot
    w = edge_weights(s, kind)
    for k in range(s.num_edges):
        e = s.edges[k]
        assert w[k, 0] == weight(s, k, kind, tail=e.u)
        assert w[k, 1] == weight(s, k, kind, tail=e.v)


def test_weights_nonnegative_and_pure(default_snapshot):
    for kind in Metric:
        a = edge_weights(default_snapshot, kind)
        assert np.all(a >= 0)
        np.testing.assert_array_equal(a, edge_weights(default_snapshot, kind))


@settings(max_examples=50, deadline=None)
@given(st.floats(0, math.pi / 2 - 1e-6), st.floats(1e-6, 0.5))
def test_pathloss_decreasing_toward_pole(theta, step):
    t2 = min(theta + step, math.pi / 2)
    assert simplified_pathloss_ratio(t2, 5, 40) <= simplified_pathloss_ratio(theta, 5, 40)


@pytest.mark.parametrize("m,n", list(itertools.product((3, 5, 7), (10, 40))))
def test_simplified_equals_full_when_aligned(m, n):
    cfg = ConstellationConfig(num_planes=m, sats_per_plane=n, altitude_step_km=0.0)
    for offset in np.linspace(0, 2 * math.pi, 13):
        c = geometry.build_constellation(cfg, np.full(m, offset))
        s = build_topology(c, GS2, LinkBudgetParams())
        full = edge_weights(s, Metric.PATHLOSS_FULL)
        simp = edge_weights(s, Metric.PATHLOSS)
        inter = s.edge_kind == LinkKind.INTER_ISL
        assert inter.sum() == (m - 1) * n
        # compare where the ratio is not vanishing (cos theta ~ 0 gives 0 vs ~1e-32)
        big = inter[:, None] & (simp > 1e-8)
        np.testing.assert_allclose(full[big], simp[big], rtol=1e-9)
        np.testing.assert_allclose(full[inter], simp[inter], atol=1e-12)
