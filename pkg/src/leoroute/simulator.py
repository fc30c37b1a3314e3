"""Event-driven simulation of burst traffic over a static snapshot.

Each ISL direction is served by its own FIFO queue by default; the
``"half"`` duplex mode shares one queue and server between both directions.
GSLs have unlimited capacity: they add propagation delay only.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, DegenerateError
from .link_budget import SPEED_OF_LIGHT
from .metrics import Metric
from .routing import RoutePath, Router
from .topology import LinkKind, TopologySnapshot

DUPLEX_MODES = ("full", "half")


@dataclass(frozen=True)
class TrafficConfig:
    arrival_rate_bps: float = 10e6
    packet_size_bits: float = 1e6
    max_burst: int = 20
    t_sim_s: float = 60.0
    warmup_s: float = 6.0
    duplex: str = "full"

    def __post_init__(self):
        if self.duplex not in DUPLEX_MODES:
            raise ConfigurationError(f"duplex must be one of {DUPLEX_MODES}, got {self.duplex!r}")
        if self.max_burst < 1:
            raise ConfigurationError("max_burst must be >= 1")
        if self.packet_size_bits <= 0:
            raise ConfigurationError("packet_size_bits must be > 0")
        if self.arrival_rate_bps < 0 or self.t_sim_s < 0 or self.warmup_s < 0:
            raise ConfigurationError("arrival rate, t_sim and warmup must be >= 0")

    @property
    def mean_burst(self) -> float:
        """Mean of the discrete uniform burst length on ``{0, ..., max_burst}``."""
        return self.max_burst / 2.0

    @property
    def burst_rate(self) -> float:
        """Bursts per second per GS so that ``rate * mean_burst * p`` equals the load."""
        return self.arrival_rate_bps / (self.mean_burst * self.packet_size_bits)


@dataclass(frozen=True)
class BurstEvent:
    burst_id: int
    source: int
    destination: int
    time: float
    n: int
    route: RoutePath | None = None


@dataclass(frozen=True)
class PacketRecord:
    burst_id: int
    packet_index: int
    source: int
    destination: int
    hops: int
    waiting: float
    transmission: float
    propagation: float
    latency: float
    hop_waits: tuple[float, ...] = ()


@dataclass
class SimulationResult:
    records: list[PacketRecord]
    # (queue, packet arrival, service start, service end, burst id, packet index);
    # queue is the edge id, or (edge id, traversed from lower endpoint) in full duplex
    trace: list[tuple] | None = None
    t_end: float = 0.0
    generated_packets: int = 0


def generate_traffic(num_ground_stations: int | Sequence, cfg: TrafficConfig,
                     rng: np.random.Generator) -> list[BurstEvent]:
    """Independent Poisson burst arrivals at every GS over ``[0, t_sim)``.

    Zero-length bursts are discarded. Returned bursts are time ordered and
    numbered in that order.
    """
    g = num_ground_stations if isinstance(num_ground_stations, int) else len(num_ground_stations)
    if g < 2:
        raise ConfigurationError("traffic needs at least two ground stations")
    rate = cfg.burst_rate
    raw = []
    for src in range(g):
        count = rng.poisson(rate * cfg.t_sim_s) if rate > 0 and cfg.t_sim_s > 0 else 0
        times = np.sort(rng.uniform(0.0, cfg.t_sim_s, count))
        sizes = rng.integers(0, cfg.max_burst + 1, count)
        dests = rng.integers(0, g - 1, count)
        dests = dests + (dests >= src)
        for t, n, d in zip(times, sizes, dests):
            if n > 0:
                raw.append((float(t), src, int(d), int(n)))
    raw.sort()
    return [BurstEvent(i, s, d, t, n) for i, (t, s, d, n) in enumerate(raw)]


def assign_routes(bursts: Sequence[BurstEvent], router: Router) -> list[BurstEvent]:
    return [BurstEvent(b.burst_id, b.source, b.destination, b.time, b.n, router.route(b.source, b.destination))
            for b in bursts]


def simulate(bursts: Sequence[BurstEvent], packet_size: float, t_end: float, warmup: float = 0.0,
             trace: bool = False, c: float = SPEED_OF_LIGHT, duplex: str = "full") -> SimulationResult:
    """Run routed ``bursts`` through FIFO link queues until ``t_end``.

    ``duplex="full"`` gives every ISL one queue per direction;
    ``duplex="half"`` makes both directions share a single queue and server.
    Records are kept for packets of bursts generated at or after ``warmup``
    that reach their destination before ``t_end``.
    """
    if duplex not in DUPLEX_MODES:
        raise ConfigurationError(f"duplex must be one of {DUPLEX_MODES}, got {duplex!r}")
    half = duplex == "half"
    routes = []
    queue_keys = []
    tx_tab = []
    prop_tab = []
    for b in bursts:
        if b.route is None:
            raise ValueError(f"burst {b.burst_id} has no route")
        r = b.route
        routes.append(r)
        vs = r.vertices
        queue_keys.append([e if half else (e, vs[m] < vs[m + 1]) for m, e in enumerate(r.edges)])
        tx_tab.append([0.0 if k == LinkKind.GSL else packet_size / rate
                       for k, rate in zip(r.kinds, r.rates_bps)])
        prop_tab.append([l * 1e3 / c for l in r.lengths_km])

    free_at: dict = {}
    heap: list = []
    seq = 0
    # per-packet state: [waiting, transmission, propagation, hop waits]
    state: dict[tuple[int, int], list] = {}
    records: list[PacketRecord] = []
    events: list | None = [] if trace else None

    def advance_gsl(bi, hop, t, st):
        # consume consecutive GSL edges without queueing
        r = routes[bi]
        while hop < r.hops and r.kinds[hop] == LinkKind.GSL:
            p = prop_tab[bi][hop]
            st[2] += p
            t += p
            hop += 1
        return hop, t

    def finish(bi, k, t, st):
        b = bursts[bi]
        if t < t_end and b.time >= warmup:
            records.append(PacketRecord(b.burst_id, k, b.source, b.destination, routes[bi].hops,
                                        st[0], st[1], st[2], t - b.time, tuple(st[3])))

    generated = 0
    for bi, b in enumerate(bursts):
        if b.time >= t_end:
            continue
        for k in range(b.n):
            generated += 1
            st = [0.0, 0.0, 0.0, []]
            hop, t = advance_gsl(bi, 0, b.time, st)
            if hop == routes[bi].hops:
                finish(bi, k, t, st)
                continue
            state[(bi, k)] = st
            heapq.heappush(heap, (t, seq, bi, k, hop))
            seq += 1

    while heap:
        t, _, bi, k, hop = heapq.heappop(heap)
        if t >= t_end:
            break
        st = state[(bi, k)]
        e = routes[bi].edges[hop]
        q = queue_keys[bi][hop]
        tx = tx_tab[bi][hop]
        start = max(t, free_at.get(q, 0.0))
        end = start + tx
        free_at[q] = end
        wait = start - t
        st[0] += wait
        st[1] += tx
        st[3].append(wait)
        p = prop_tab[bi][hop]
        st[2] += p
        if events is not None:
            events.append((q, t, start, end, bursts[bi].burst_id, k))
        nxt, t_next = advance_gsl(bi, hop + 1, end + p, st)
        if nxt == routes[bi].hops:
            del state[(bi, k)]
            finish(bi, k, t_next, st)
        else:
            heapq.heappush(heap, (t_next, seq, bi, k, nxt))
            seq += 1

    return SimulationResult(records, events, t_end, generated)


def simulate_metric(snapshot: TopologySnapshot, kind: Metric | str, bursts: Sequence[BurstEvent],
                    cfg: TrafficConfig, tie_rng: np.random.Generator | None = None,
                    trace: bool = False) -> SimulationResult:
    router = Router(snapshot, kind, tie_rng, cfg.packet_size_bits)
    routed = assign_routes(bursts, router)
    return simulate(routed, cfg.packet_size_bits, cfg.t_sim_s, cfg.warmup_s, trace,
                    snapshot.params.speed_of_light, cfg.duplex)


def run_snapshot(snapshot: TopologySnapshot, kind: Metric | str, cfg: TrafficConfig,
                 seed: int | np.random.SeedSequence | None = None) -> list[PacketRecord]:
    """Generate traffic from ``seed`` and simulate it under ``kind``.

    The traffic trace depends only on ``seed``, so calls with different
    metrics and the same seed see identical bursts.
    """
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    traffic_ss, tie_ss = ss.spawn(2)
    bursts = generate_traffic(snapshot.num_ground_stations, cfg, np.random.default_rng(traffic_ss))
    return simulate_metric(snapshot, kind, bursts, cfg, np.random.default_rng(tie_ss)).records


def ecdf(samples) -> tuple[np.ndarray, np.ndarray]:
    """Empirical CDF as sorted values and cumulative fractions."""
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size == 0:
        raise DegenerateError("empirical CDF of an empty sample")
    return x, np.arange(1, x.size + 1) / x.size


def ecdf_at(samples, grid) -> np.ndarray:
    """Right-continuous empirical CDF of ``samples`` evaluated on ``grid``."""
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size == 0:
        raise DegenerateError("empirical CDF of an empty sample")
    return np.searchsorted(x, np.asarray(grid, dtype=float), side="right") / x.size


@dataclass
class LatencyStats:
    latency_cdf: tuple[np.ndarray, np.ndarray]
    waiting_cdf: tuple[np.ndarray, np.ndarray]
    mean_latency: float
    mean_waiting: float
    mean_transmission: float
    mean_propagation: float
    count: int
    hop_waits: np.ndarray = field(repr=False, default_factory=lambda: np.zeros(0))

    def latency_quantile(self, q: float) -> float:
        return float(np.quantile(self.latency_cdf[0], q))

    def waiting_fraction_below(self, threshold_s: float) -> float:
        return float(np.mean(self.hop_waits < threshold_s))


def hop_wait_samples(records: Sequence[PacketRecord]) -> np.ndarray:
    return np.fromiter((w for r in records for w in r.hop_waits), dtype=float)


def collect_stats(records: Sequence[PacketRecord]) -> LatencyStats:
    """Latency and per-hop waiting CDFs plus component means."""
    if not records:
        raise DegenerateError("no packet records to summarise")
    lat = np.array([r.latency for r in records])
    waits = hop_wait_samples(records)
    return LatencyStats(
        latency_cdf=ecdf(lat),
        waiting_cdf=ecdf(waits) if waits.size else (np.zeros(0), np.zeros(0)),
        mean_latency=float(lat.mean()),
        mean_waiting=float(np.mean([r.waiting for r in records])),
        mean_transmission=float(np.mean([r.transmission for r in records])),
        mean_propagation=float(np.mean([r.propagation for r in records])),
        count=len(records),
        hop_waits=waits,
    )


def backlog_slopes(result: SimulationResult, t_from: float, t_to: float | None = None,
                   min_samples: int = 20) -> dict[int, float]:
    """Per-edge trend of the unfinished work seen by arriving packets.

    Fits waiting time against queue-arrival time by least squares over packets
    arriving in ``[t_from, t_to)``. A stable queue has slope near 0; an
    overloaded one approaches ``utilisation - 1``.
    """
    if result.trace is None:
        raise ValueError("simulation was run without trace=True")
    t_to = result.t_end if t_to is None else t_to
    per_edge: dict[int, tuple[list, list]] = {}
    for e, arrival, start, _end, _b, _k in result.trace:
        if t_from <= arrival < t_to:
            xs, ys = per_edge.setdefault(e, ([], []))
            xs.append(arrival)
            ys.append(start - arrival)
    slopes = {}
    for e, (xs, ys) in per_edge.items():
        if len(xs) < min_samples:
            continue
        x = np.asarray(xs)
        if np.ptp(x) == 0:
            continue
        slopes[e] = float(np.polyfit(x, np.asarray(ys), 1)[0])
    return slopes
