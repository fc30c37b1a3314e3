"""Snapshot graph of the constellation plus ground segment.

Vertex ids ``0 .. N-1`` are satellites (same numbering as the
:class:`~leoroute.geometry.Constellation`), ``N .. N+G-1`` are ground
stations in input order.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path
from typing import Sequence

import numpy as np

from . import geometry
from .errors import ConfigurationError
from .geometry import Constellation, GroundStation
from .link_budget import LinkBudgetParams, data_rate

INFINITE_CAPACITY = math.inf

_TIE_TOL = 1e-12


class LinkKind(IntEnum):
    INTRA_ISL = 0
    INTER_ISL = 1
    GSL = 2


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    kind: LinkKind
    length_km: float
    rate_bps: float
    planes: tuple[int, int] | None = None

    def other(self, vertex: int) -> int:
        return self.v if vertex == self.u else self.u


class TopologySnapshot:
    """Undirected multipartite graph at one instant. Treat as read-only."""

    def __init__(self, constellation: Constellation, ground_stations: Sequence[GroundStation],
                 params: LinkBudgetParams, edges: list[Edge], gs_satellite: Sequence[int]):
        self.constellation = constellation
        self.ground_stations = tuple(ground_stations)
        self.params = params
        self.edges = tuple(edges)
        self.gs_satellite = tuple(int(s) for s in gs_satellite)
        self.num_satellites = constellation.num_satellites
        self.num_vertices = self.num_satellites + len(self.ground_stations)

        adjacency: list[list[tuple[int, int]]] = [[] for _ in range(self.num_vertices)]
        self._index: dict[tuple[int, int], int] = {}
        for k, e in enumerate(self.edges):
            adjacency[e.u].append((e.v, k))
            adjacency[e.v].append((e.u, k))
            self._index[(min(e.u, e.v), max(e.u, e.v))] = k
        self.adjacency = tuple(tuple(sorted(a)) for a in adjacency)

        self.edge_u = np.array([e.u for e in self.edges], dtype=int)
        self.edge_v = np.array([e.v for e in self.edges], dtype=int)
        self.edge_kind = np.array([int(e.kind) for e in self.edges], dtype=int)
        self.edge_length = np.array([e.length_km for e in self.edges], dtype=float)
        self.edge_rate = np.array([e.rate_bps for e in self.edges], dtype=float)
        for a in (self.edge_u, self.edge_v, self.edge_kind, self.edge_length, self.edge_rate):
            a.setflags(write=False)

    @property
    def num_ground_stations(self) -> int:
        return len(self.ground_stations)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def gs_vertex(self, gs: int) -> int:
        return self.num_satellites + gs

    def is_ground(self, vertex: int) -> bool:
        return vertex >= self.num_satellites

    def plane_of(self, vertex: int) -> int:
        """Orbital plane of a satellite, or of a ground station's GSL satellite."""
        if self.is_ground(vertex):
            vertex = self.gs_satellite[vertex - self.num_satellites]
        return int(self.constellation.plane_of[vertex])

    def edge_between(self, i: int, j: int) -> int | None:
        return self._index.get((min(i, j), max(i, j)))

    def edges_of_kind(self, kind: LinkKind) -> list[int]:
        return [k for k, e in enumerate(self.edges) if e.kind == kind]

    def degree(self, vertex: int, kind: LinkKind | None = None) -> int:
        if kind is None:
            return len(self.adjacency[vertex])
        return sum(1 for _, k in self.adjacency[vertex] if self.edges[k].kind == kind)

    def vertex_label(self, vertex: int) -> str:
        if self.is_ground(vertex):
            return self.ground_stations[vertex - self.num_satellites].name
        n = self.constellation.config.sats_per_plane
        return f"sat{vertex // n}-{vertex % n}"

    def dump_edges(self, path: str | Path) -> None:
        """Write the edge table as CSV (u, v, kind, length_km, rate_bps)."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["u", "v", "u_label", "v_label", "kind", "length_km", "rate_bps"])
            for e in self.edges:
                w.writerow([e.u, e.v, self.vertex_label(e.u), self.vertex_label(e.v),
                            e.kind.name, repr(e.length_km), repr(e.rate_bps)])


def _angular_distance(a, b):
    d = np.mod(np.asarray(a) - b, geometry.TWO_PI)
    return np.minimum(d, geometry.TWO_PI - d)


def inter_plane_neighbor(i: int, plane: int, c: Constellation) -> int | None:
    """Satellite of ``plane`` closest in polar angle to satellite ``i``.

    Near-exact ties go to the lower satellite index. ``None`` is returned only
    if no candidate lies within one slot (``2 pi / N_b``) of ``i``.
    """
    members = c.plane_members(plane)
    d = _angular_distance(c.anomalies[members], c.anomalies[i])
    best = float(d.min())
    if best > geometry.TWO_PI / len(members) + _TIE_TOL:
        return None
    return int(members[np.flatnonzero(d <= best + _TIE_TOL)[0]])


def closest_satellite(gs: GroundStation, c: Constellation, sat_positions: np.ndarray | None = None) -> int:
    if sat_positions is None:
        sat_positions = c.satellite_positions()
    d = np.linalg.norm(sat_positions - c.ground_position(gs), axis=1)
    return int(np.argmin(d))


def adjacent_plane_pairs(num_planes: int, seam_links: bool = False) -> list[tuple[int, int]]:
    pairs = [(a, a + 1) for a in range(num_planes - 1)]
    if seam_links and num_planes > 2:
        pairs.append((0, num_planes - 1))
    return pairs


def build_topology(c: Constellation, ground_stations: Sequence[GroundStation], params: LinkBudgetParams,
                   seam_links: bool = False, occlusion_margin_km: float = 0.0) -> TopologySnapshot:
    """Intra-plane rings, mutual-nearest inter-plane ISLs and closest-satellite GSLs."""
    if not ground_stations:
        raise ConfigurationError("at least one ground station is required")
    cfg = c.config
    n = cfg.sats_per_plane
    r_e = cfg.earth_radius_km
    pos = c.satellite_positions()
    edges: list[Edge] = []

    def isl(i, j, kind, planes):
        lo, hi = min(i, j), max(i, j)
        length = geometry.slant_range(pos[lo], pos[hi], r_e, occlusion_margin_km)
        if math.isinf(length):
            return
        edges.append(Edge(lo, hi, kind, length, data_rate(params, length), planes))

    for a in range(cfg.num_planes):
        base = a * n
        for k in range(n):
            isl(base + k, base + (k + 1) % n, LinkKind.INTRA_ISL, (a, a))

    for a, b in adjacent_plane_pairs(cfg.num_planes, seam_links):
        for i in c.plane_members(a):
            j = inter_plane_neighbor(int(i), b, c)
            if j is None:
                continue
            if inter_plane_neighbor(j, a, c) != i:
                continue
            isl(int(i), j, LinkKind.INTER_ISL, (a, b))

    gs_sat = []
    for g, gs in enumerate(ground_stations):
        s = closest_satellite(gs, c, pos)
        gs_sat.append(s)
        length = float(np.linalg.norm(pos[s] - c.ground_position(gs)))
        edges.append(Edge(s, c.num_satellites + g, LinkKind.GSL, length, INFINITE_CAPACITY, None))

    return TopologySnapshot(c, ground_stations, params, edges, gs_sat)
