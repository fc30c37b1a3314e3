"""Shortest-path route selection and the burst latency recursion."""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .errors import UnreachableError
from .link_budget import SPEED_OF_LIGHT
from .metrics import DEFAULT_PACKET_BITS, Metric, RouteQuery, edge_weights
from .topology import LinkKind, TopologySnapshot

TIE_PERTURBATION = 1e-9


@dataclass(frozen=True)
class RoutePath:
    """A directed route: ``vertices[m] -> vertices[m+1]`` over ``edges[m]``."""

    vertices: tuple[int, ...]
    edges: tuple[int, ...]
    lengths_km: tuple[float, ...]
    rates_bps: tuple[float, ...]
    kinds: tuple[LinkKind, ...]
    cost: float = 0.0

    def __post_init__(self):
        if len(self.edges) < 1:
            raise ValueError("a route needs at least one edge")
        if not (len(self.vertices) == len(self.edges) + 1 == len(self.lengths_km) + 1
                == len(self.rates_bps) + 1 == len(self.kinds) + 1):
            raise ValueError("inconsistent route field lengths")

    @property
    def source(self) -> int:
        return self.vertices[0]

    @property
    def destination(self) -> int:
        return self.vertices[-1]

    @property
    def hops(self) -> int:
        return len(self.edges)

    @property
    def isl_hops(self) -> int:
        return sum(1 for k in self.kinds if k != LinkKind.GSL)

    def reversed(self) -> "RoutePath":
        return RoutePath(self.vertices[::-1], self.edges[::-1], self.lengths_km[::-1],
                         self.rates_bps[::-1], self.kinds[::-1], self.cost)

    @classmethod
    def from_edges(cls, snapshot: TopologySnapshot, vertices, edges, cost=0.0) -> "RoutePath":
        es = [snapshot.edges[k] for k in edges]
        return cls(tuple(int(v) for v in vertices), tuple(int(k) for k in edges),
                   tuple(e.length_km for e in es), tuple(e.rate_bps for e in es),
                   tuple(e.kind for e in es), float(cost))


def dijkstra(snapshot: TopologySnapshot, weights: np.ndarray, source: int):
    """Single-source shortest paths over directional ``weights`` (E, 2).

    Returns ``(dist, pred_edge)`` arrays over vertices. Relaxation is strict,
    so among equal-cost alternatives the first one settled wins; settling
    order breaks distance ties by lower vertex id.
    """
    n = snapshot.num_vertices
    dist = [math.inf] * n
    pred = [-1] * n
    done = [False] * n
    edge_u = snapshot.edge_u
    w_fwd = weights[:, 0].tolist()
    w_bwd = weights[:, 1].tolist()
    eu = edge_u.tolist()
    adjacency = snapshot.adjacency
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, x = heapq.heappop(heap)
        if done[x]:
            continue
        done[x] = True
        for y, k in adjacency[x]:
            if done[y]:
                continue
            w = w_fwd[k] if eu[k] == x else w_bwd[k]
            nd = d + w
            if nd < dist[y]:
                dist[y] = nd
                pred[y] = k
                heapq.heappush(heap, (nd, y))
    return np.array(dist), np.array(pred, dtype=int)


def extract_path(snapshot: TopologySnapshot, dist, pred, source: int, target: int) -> RoutePath:
    if not math.isfinite(dist[target]):
        raise UnreachableError(source, target)
    vertices = [target]
    edges = []
    x = target
    while x != source:
        k = int(pred[x])
        edges.append(k)
        x = snapshot.edges[k].other(x)
        vertices.append(x)
    return RoutePath.from_edges(snapshot, vertices[::-1], edges[::-1], dist[target])


def _perturbed(weights: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    eps = rng.uniform(0.0, TIE_PERTURBATION, size=weights.shape[0])
    # strictly inside (0, 1e-9)
    eps = np.where(eps == 0.0, 0.5 * TIE_PERTURBATION, eps)
    return weights + eps[:, None]


def shortest_path(snapshot: TopologySnapshot, kind: Metric | str, u: int, v: int,
                  rng: np.random.Generator | None = None,
                  packet_size: float = DEFAULT_PACKET_BITS) -> RoutePath:
    """Minimum-cost route from ground station ``u`` to ground station ``v``.

    ``u``/``v`` are ground-station indices. Hop-count ties are broken at
    random through ``rng``; ``cost`` on the result is the unperturbed cost.
    """
    kind = Metric.parse(kind)
    query = RouteQuery.for_pair(snapshot, u, v)
    w = edge_weights(snapshot, kind, gate=query.gate if kind.is_pathloss else 1.0, packet_size=packet_size)
    search = w
    if kind.randomized_ties:
        search = _perturbed(w, rng if rng is not None else np.random.default_rng())
    src, dst = snapshot.gs_vertex(u), snapshot.gs_vertex(v)
    dist, pred = dijkstra(snapshot, search, src)
    try:
        path = extract_path(snapshot, dist, pred, src, dst)
    except UnreachableError:
        raise UnreachableError(u, v) from None
    return _with_cost(path, snapshot, w)


def path_cost(snapshot: TopologySnapshot, path: RoutePath, weights: np.ndarray) -> float:
    total = 0.0
    for x, k in zip(path.vertices, path.edges):
        total += weights[k, 0] if snapshot.edges[k].u == x else weights[k, 1]
    return float(total)


def _with_cost(path: RoutePath, snapshot, weights) -> RoutePath:
    return RoutePath(path.vertices, path.edges, path.lengths_km, path.rates_bps, path.kinds,
                     path_cost(snapshot, path, weights))


def routes_from(snapshot: TopologySnapshot, kind: Metric | str, u: int, targets,
                rng: np.random.Generator | None = None,
                packet_size: float = DEFAULT_PACKET_BITS) -> dict[int, RoutePath]:
    """Routes from ground station ``u`` to each of ``targets`` with one tree per gate value.

    Equivalent to calling :func:`shortest_path` per target for deterministic
    metrics. For hop-count one tie-break draw is shared by all targets.
    """
    kind = Metric.parse(kind)
    src = snapshot.gs_vertex(u)
    groups: dict[float, list[int]] = {}
    for v in targets:
        gate = RouteQuery.for_pair(snapshot, u, v).gate if kind.is_pathloss else 1.0
        groups.setdefault(gate, []).append(v)
    out = {}
    for gate, vs in groups.items():
        w = edge_weights(snapshot, kind, gate=gate, packet_size=packet_size)
        search = w
        if kind.randomized_ties:
            search = _perturbed(w, rng if rng is not None else np.random.default_rng())
        dist, pred = dijkstra(snapshot, search, src)
        for v in vs:
            try:
                path = extract_path(snapshot, dist, pred, src, snapshot.gs_vertex(v))
            except UnreachableError:
                raise UnreachableError(u, v) from None
            out[v] = _with_cost(path, snapshot, w)
    return out


class Router:
    """Per-burst route selection on a fixed snapshot.

    Deterministic metrics route each unordered GS pair once, from the lower
    index, and reuse that path (reversed when needed) for every burst.
    Hop-count draws a fresh random tie-break for each burst.
    """

    def __init__(self, snapshot: TopologySnapshot, kind: Metric | str,
                 rng: np.random.Generator | None = None, packet_size: float = DEFAULT_PACKET_BITS):
        self.snapshot = snapshot
        self.kind = Metric.parse(kind)
        self.rng = rng if rng is not None else np.random.default_rng()
        self.packet_size = packet_size
        self._cache: dict[tuple[int, int], RoutePath] = {}

    def route(self, u: int, v: int) -> RoutePath:
        if self.kind.randomized_ties:
            return shortest_path(self.snapshot, self.kind, u, v, self.rng, self.packet_size)
        key = (min(u, v), max(u, v))
        path = self._cache.get(key)
        if path is None:
            path = shortest_path(self.snapshot, self.kind, key[0], key[1], None, self.packet_size)
            self._cache[key] = path
        return path if u == key[0] else path.reversed()


def hop_times(path: RoutePath, packet_size: float, c: float = SPEED_OF_LIGHT):
    """Per-edge transmission and propagation times in seconds."""
    tx = []
    for k, r in zip(path.kinds, path.rates_bps):
        if k == LinkKind.GSL:
            tx.append(0.0)
            continue
        if not r > 0:
            raise ValueError(f"ISL rate must be > 0, got {r}")
        tx.append(packet_size / r)
    prop = [l * 1e3 / c for l in path.lengths_km]
    return np.array(tx), np.array(prop)


def burst_latencies(path: RoutePath, n: int, packet_size: float, waiting=None,
                    c: float = SPEED_OF_LIGHT) -> np.ndarray:
    """Latency of packets ``1..n`` of a burst, measured from injection.

    ``waiting[k-1, m-1]`` is the cross-traffic wait of packet ``k`` at edge
    ``m``; omitted means zero. Packet indices below 1 and the empty prefix
    contribute zero latency.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if packet_size <= 0:
        raise ValueError("packet size must be > 0")
    tx, prop = hop_times(path, packet_size, c)
    hops = path.hops
    tw = np.zeros((n, hops)) if waiting is None else np.asarray(waiting, dtype=float)
    if tw.shape != (n, hops):
        raise ValueError(f"waiting table must have shape {(n, hops)}, got {tw.shape}")
    # row k, column m: latency of packet k through the first m edges
    table = np.zeros((n + 1, hops + 1))
    for k in range(1, n + 1):
        for m in range(1, hops + 1):
            own = table[k, m - 1]
            prev = table[k - 1, m] - prop[m - 1]
            table[k, m] = max(own, prev) + tw[k - 1, m - 1] + tx[m - 1] + prop[m - 1]
    return table[1:, hops].copy()


def burst_latency(path: RoutePath, n: int, packet_size: float, waiting=None,
                  c: float = SPEED_OF_LIGHT) -> float:
    """Latency of the ``n``-th packet of a burst over ``path``."""
    return float(burst_latencies(path, n, packet_size, waiting, c)[-1])


def single_packet_latency(path: RoutePath, packet_size: float, waiting=None, c: float = SPEED_OF_LIGHT) -> float:
    """Closed-form latency of the first packet: sum of wait, tx and prop."""
    tx, prop = hop_times(path, packet_size, c)
    tw = np.zeros(path.hops) if waiting is None else np.asarray(waiting, dtype=float)
    return float(np.sum(tw + tx + prop))
