"""Quick invariant checks behind ``leoroute validate``."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import geometry
from .capacity import census, lambda_max
from .geometry import ConstellationConfig
from .link_budget import LinkBudgetParams, data_rate
from .metrics import Metric, edge_weights, simplified_pathloss_ratio
from .routing import RoutePath, burst_latencies
from .simulator import BurstEvent, simulate
from .topology import LinkKind, build_topology


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def check_chords(cfg: ConstellationConfig | None = None, rotations: int = 5, seed: int = 0) -> CheckResult:
    cfg = cfg or ConstellationConfig()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(rotations):
        c = geometry.propagate(geometry.build_constellation(cfg), rng.uniform(1e4, 1e6))
        pos = c.satellite_positions()
        n = cfg.sats_per_plane
        for a in range(cfg.num_planes):
            expect = 2 * (cfg.earth_radius_km + cfg.altitude_km(a)) * math.sin(math.pi / n)
            for k in range(n):
                i, j = a * n + k, a * n + (k + 1) % n
                worst = max(worst, abs(np.linalg.norm(pos[i] - pos[j]) - expect) / expect)
    return CheckResult("intra-plane chord length", worst < 1e-9, f"max rel err {worst:.2e}")


def check_link_budget() -> CheckResult:
    p = LinkBudgetParams()
    # independent dB-domain recomputation
    fspl_db = 20 * math.log10(4 * math.pi * 2000e3 * 20e9 / 299792458.0)
    pr_db = 4 + 10 * math.log10(400) + 38.5 - fspl_db
    n_db = 10 * math.log10(1.380649e-23 * 354.81 * 400e6)
    r = 400e6 * math.log2(1 + 10 ** ((pr_db - n_db - 2) / 10))
    got = data_rate(p, 2000.0)
    err = abs(got - r) / r
    return CheckResult("link budget 2000 km / 400 MHz", err < 1e-3 and abs(got - 344e6) / 344e6 < 1e-3,
                       f"{got / 1e6:.2f} Mbit/s")


def check_pathloss_identity() -> CheckResult:
    worst = 0.0
    for m, n in itertools.product((3, 5, 7), (10, 40)):
        cfg = ConstellationConfig(num_planes=m, sats_per_plane=n, altitude_step_km=0.0)
        for off in np.linspace(0, 2 * math.pi / n, 7, endpoint=False):
            c = geometry.build_constellation(cfg, np.full(m, off))
            snap = build_topology(c, [geometry.GroundStation("a", 0, 0), geometry.GroundStation("b", 10, 10)],
                                  LinkBudgetParams())
            full = edge_weights(snap, Metric.PATHLOSS_FULL)
            simp = edge_weights(snap, Metric.PATHLOSS)
            inter = snap.edge_kind == LinkKind.INTER_ISL
            keep = inter[:, None] & (simp > 1e-6)
            if keep.any():
                worst = max(worst, float(np.max(np.abs(full[keep] - simp[keep]) / simp[keep])))
    return CheckResult("simplified pathloss identity", worst < 1e-9, f"max rel err {worst:.2e}")


def _random_path(rng, hops):
    kinds = [LinkKind.GSL] + [LinkKind.INTRA_ISL] * hops + [LinkKind.GSL]
    lengths = [float(rng.uniform(500, 2500))] + list(rng.uniform(500, 5000, hops)) + [float(rng.uniform(500, 2500))]
    rates = [math.inf] + list(rng.uniform(20e6, 1e9, hops)) + [math.inf]
    return RoutePath(tuple(range(hops + 3)), tuple(range(hops + 2)), tuple(map(float, lengths)),
                     tuple(map(float, rates)), tuple(kinds))


def check_recursion(cases: int = 200, seed: int = 0) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(cases):
        path = _random_path(rng, int(rng.integers(1, 7)))
        n = int(rng.integers(1, 21))
        res = simulate([BurstEvent(0, 0, 1, 0.0, n, path)], 1e6, t_end=math.inf)
        sim = np.array([r.latency for r in sorted(res.records, key=lambda r: r.packet_index)])
        worst = max(worst, float(np.max(np.abs(sim - burst_latencies(path, n, 1e6)))))
    return CheckResult("burst recursion vs simulation", worst < 1e-9, f"max abs err {worst:.2e} s")


def check_capacity_toy() -> CheckResult:
    # one ISL between two satellites, each GS on one of them
    cfg = ConstellationConfig(num_planes=1, sats_per_plane=3, base_altitude_km=30000.0)
    c = geometry.build_constellation(cfg)
    gs = [geometry.GroundStation("a", 0.0, 0.0), geometry.GroundStation("b", 60.0, 0.0)]
    snap = build_topology(c, gs, LinkBudgetParams())
    cs = census(snap, Metric.HOP_COUNT, np.random.default_rng(0))
    lm = lambda_max(cs, snap)
    loaded = [k for k in range(snap.num_edges) if cs.edge_counts[k] and snap.edge_kind[k] != LinkKind.GSL]
    expect = min(snap.edge_rate[k] * 1 / cs.edge_counts[k] for k in loaded)
    return CheckResult("lambda_max on two-GS toy", lm == expect, f"{lm / 1e6:.2f} Mbit/s")


ALL_CHECKS = (check_chords, check_link_budget, check_pathloss_identity, check_recursion, check_capacity_toy)


def run_all() -> list[CheckResult]:
    return [check() for check in ALL_CHECKS]
