"""Maximum supported per-GS traffic load under unipath routing."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateError, UnreachableError
from .metrics import DEFAULT_PACKET_BITS, Metric
from .routing import RoutePath, routes_from
from .topology import LinkKind, TopologySnapshot


@dataclass
class PathCensus:
    """One selected route per unordered GS pair and the resulting edge loads.

    ``paths`` is keyed by ``(u, v)`` with ``u < v``; each path is oriented
    from ``u`` to ``v``.
    """

    num_ground_stations: int
    paths: dict[tuple[int, int], RoutePath]
    edge_counts: np.ndarray = field(repr=False)
    kind: Metric | None = None

    @classmethod
    def from_paths(cls, num_edges: int, num_ground_stations: int, paths, kind=None) -> "PathCensus":
        counts = np.zeros(num_edges, dtype=int)
        for p in paths.values():
            # undirected accounting: a path loads each of its edges once
            for k in set(p.edges):
                counts[k] += 1
        return cls(num_ground_stations, dict(paths), counts, kind)

    @property
    def total_hops(self) -> int:
        return sum(p.hops for p in self.paths.values())

    def per_path_load(self, lam: float) -> float:
        """Traffic carried by each path when every GS offers ``lam`` bit/s."""
        return 2.0 * lam / (self.num_ground_stations - 1)


def census(snapshot: TopologySnapshot, kind: Metric | str, rng: np.random.Generator | None = None,
           packet_size: float = DEFAULT_PACKET_BITS) -> PathCensus:
    """Route every unordered GS pair once under ``kind``."""
    kind = Metric.parse(kind)
    g = snapshot.num_ground_stations
    if g < 2:
        raise DegenerateError("a census needs at least two ground stations")
    if kind.randomized_ties and rng is None:
        rng = np.random.default_rng()
    paths = {}
    for u in range(g - 1):
        targets = list(range(u + 1, g))
        try:
            found = routes_from(snapshot, kind, u, targets, rng, packet_size)
        except UnreachableError as exc:
            name_u = snapshot.ground_stations[exc.source].name
            name_v = snapshot.ground_stations[exc.destination].name
            raise UnreachableError(exc.source, exc.destination,
                                   f"no finite-cost {kind.value} route between {name_u} and {name_v}") from None
        for v, p in found.items():
            paths[(u, v)] = p
    return PathCensus.from_paths(snapshot.num_edges, g, paths, kind)


def _servers_per_edge(duplex: str) -> int:
    if duplex not in ("full", "half"):
        raise ValueError(f"duplex must be 'full' or 'half', got {duplex!r}")
    return 2 if duplex == "full" else 1


def edge_limits(census: PathCensus, snapshot: TopologySnapshot, duplex: str = "full") -> np.ndarray:
    """Per-edge load limit ``R (N_GS - 1) / N_P``; inf for GSLs and unloaded edges.

    With ``duplex="half"`` both directions share one server and the limit halves.
    """
    servers = _servers_per_edge(duplex)
    counts = census.edge_counts
    limits = np.full(snapshot.num_edges, math.inf)
    loaded = (counts > 0) & (snapshot.edge_kind != LinkKind.GSL)
    limits[loaded] = servers * snapshot.edge_rate[loaded] * (census.num_ground_stations - 1) / (2 * counts[loaded])
    return limits


def lambda_max(census: PathCensus, snapshot: TopologySnapshot, duplex: str = "full") -> float:
    """Largest per-GS load (bit/s) keeping every loaded ISL queue stable."""
    limits = edge_limits(census, snapshot, duplex)
    if not np.isfinite(limits).any():
        raise DegenerateError("no ISL carries any selected path")
    return float(limits.min())


def bottleneck_edge(census: PathCensus, snapshot: TopologySnapshot, duplex: str = "full") -> int:
    limits = edge_limits(census, snapshot, duplex)
    if not np.isfinite(limits).any():
        raise DegenerateError("no ISL carries any selected path")
    return int(np.argmin(limits))


def is_stable(census: PathCensus, snapshot: TopologySnapshot, lam: float, duplex: str = "full") -> bool:
    """Check that no ISL server is offered more than its rate at per-GS load ``lam``."""
    u = edge_utilization(census, snapshot, lam, duplex)
    return bool(np.all(u[snapshot.edge_kind != LinkKind.GSL] <= 1.0))


def edge_utilization(census: PathCensus, snapshot: TopologySnapshot, lam: float,
                     duplex: str = "full") -> np.ndarray:
    """Offered load over rate per ISL server; 0 on GSLs.

    A path pair offers ``lambda_P / 2`` to each direction, so in full duplex a
    direction queue sees half of ``N_P * lambda_P``.
    """
    load = census.edge_counts * census.per_path_load(lam) / _servers_per_edge(duplex)
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(snapshot.edge_kind == LinkKind.GSL, 0.0, load / snapshot.edge_rate)
    return u
