"""Edge weights for the hop-count, latency and pathloss routing metrics.

Weights are directional: traversing an inter-plane ISL from satellite ``i``
is priced with ``i``'s polar angle and intra-plane spacing. Column 0 of the
arrays returned by :func:`edge_weights` prices ``edge.u -> edge.v``, column 1
the reverse direction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .topology import LinkKind, TopologySnapshot

DEFAULT_PACKET_BITS = 1e6


class Metric(str, Enum):
    HOP_COUNT = "hop"
    LATENCY = "latency"
    PATHLOSS = "pathloss"
    PATHLOSS_FULL = "pathloss-full"

    @classmethod
    def parse(cls, name: "str | Metric") -> "Metric":
        if isinstance(name, Metric):
            return name
        aliases = {"hop-count": "hop", "hopcount": "hop", "pathloss-simplified": "pathloss"}
        key = aliases.get(name.strip().lower(), name.strip().lower())
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown metric {name!r}; choose from {[m.value for m in cls]}") from None

    @property
    def is_pathloss(self) -> bool:
        return self in (Metric.PATHLOSS, Metric.PATHLOSS_FULL)

    @property
    def randomized_ties(self) -> bool:
        return self is Metric.HOP_COUNT


@dataclass(frozen=True)
class RouteQuery:
    source: int
    destination: int
    source_plane: int
    destination_plane: int

    def __post_init__(self):
        if self.source == self.destination:
            raise ValueError("source and destination must differ")

    @classmethod
    def for_pair(cls, snapshot: TopologySnapshot, source: int, destination: int) -> "RouteQuery":
        return cls(source, destination,
                   snapshot.plane_of(snapshot.gs_vertex(source)),
                   snapshot.plane_of(snapshot.gs_vertex(destination)))

    @property
    def gate(self) -> float:
        return plane_gate(self.source_plane, self.destination_plane)


def plane_gate(a: int, d: int) -> float:
    """1 when source and destination planes differ, infinity otherwise."""
    return 1.0 if a != d else math.inf


def simplified_pathloss_ratio(theta, num_planes: int, sats_per_plane: int):
    """Inter- to intra-plane pathloss ratio for aligned equal-altitude planes."""
    return (np.cos(theta) ** 2 * (1.0 - math.cos(math.pi / num_planes))
            / (1.0 - math.cos(2.0 * math.pi / sats_per_plane)))


def _tail_values(snapshot: TopologySnapshot):
    c = snapshot.constellation
    cfg = c.config
    spacing = np.array([2.0 * (cfg.earth_radius_km + h) * math.sin(math.pi / cfg.sats_per_plane)
                        for h in cfg.altitudes_km()])
    return c, spacing


def _gate_multiply(w, gate: float):
    # inf * 0 is nan; a = d must forbid every inter-plane hop, polar ones included
    if math.isinf(gate):
        return np.full_like(w, math.inf) if np.ndim(w) else math.inf
    return w * gate


def weight(snapshot: TopologySnapshot, edge: int, kind: Metric, tail: int | None = None,
           query: RouteQuery | None = None, packet_size: float = DEFAULT_PACKET_BITS) -> float:
    """Cost of traversing ``edge`` starting from vertex ``tail``.

    ``tail`` defaults to the edge's lower endpoint. ``query`` supplies the
    plane gate for the pathloss metrics; without one the gate is 1.
    """
    kind = Metric.parse(kind)
    e = snapshot.edges[edge]
    if tail is None:
        tail = e.u
    if kind is Metric.HOP_COUNT:
        return 1.0
    if kind is Metric.LATENCY:
        prop = e.length_km * 1e3 / snapshot.params.speed_of_light
        if e.kind == LinkKind.GSL:
            return prop
        return packet_size / e.rate_bps + prop
    if e.kind == LinkKind.GSL:
        return 0.0
    if e.kind == LinkKind.INTRA_ISL:
        return 1.0
    gate = 1.0 if query is None else query.gate
    c, spacing = _tail_values(snapshot)
    if kind is Metric.PATHLOSS_FULL:
        w = (e.length_km / spacing[c.plane_of[tail]]) ** 2
    else:
        w = float(simplified_pathloss_ratio(c.anomalies[tail], c.num_planes, c.config.sats_per_plane))
    return _gate_multiply(w, gate)


def edge_weights(snapshot: TopologySnapshot, kind: Metric, gate: float = 1.0,
                 packet_size: float = DEFAULT_PACKET_BITS) -> np.ndarray:
    """Directional weights of every edge, shape ``(E, 2)``.

    Matches :func:`weight` element-wise; vectorised for route computation.
    """
    kind = Metric.parse(kind)
    n_e = snapshot.num_edges
    kinds = snapshot.edge_kind
    gsl = kinds == LinkKind.GSL
    inter = kinds == LinkKind.INTER_ISL
    out = np.empty((n_e, 2))
    if kind is Metric.HOP_COUNT:
        out[:] = 1.0
        return out
    if kind is Metric.LATENCY:
        prop = snapshot.edge_length * 1e3 / snapshot.params.speed_of_light
        with np.errstate(divide="ignore"):
            tx = np.where(gsl, 0.0, packet_size / snapshot.edge_rate)
        out[:] = (tx + prop)[:, None]
        return out
    out[:] = 1.0
    out[gsl] = 0.0
    c, spacing = _tail_values(snapshot)
    for col, tails in enumerate((snapshot.edge_u, snapshot.edge_v)):
        t = tails[inter]
        if kind is Metric.PATHLOSS_FULL:
            w = (snapshot.edge_length[inter] / spacing[c.plane_of[t]]) ** 2
        else:
            w = simplified_pathloss_ratio(c.anomalies[t], c.num_planes, c.config.sats_per_plane)
        out[inter, col] = _gate_multiply(w, gate)
    return out
