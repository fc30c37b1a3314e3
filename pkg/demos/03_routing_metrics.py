"""Compare the routes chosen by the metrics between two ground stations."""
import numpy as np

from leoroute import geometry
from leoroute.geometry import ConstellationConfig
from leoroute.link_budget import LinkBudgetParams
from leoroute.metrics import Metric
from leoroute.routing import burst_latency, shortest_path
from leoroute.topology import LinkKind, build_topology

stations = geometry.load_ground_stations()
c = geometry.propagate(geometry.build_constellation(ConstellationConfig()), 2.5e5)
snap = build_topology(c, stations, LinkBudgetParams())
print(snap.num_vertices, "vertices,", snap.num_edges, "edges")

u = next(i for i, s in enumerate(stations) if s.name == "Svalbard")
v = next(i for i, s in enumerate(stations) if s.name == "Singapore")
rng = np.random.default_rng(0)
for kind in Metric:
    p = shortest_path(snap, kind, u, v, rng)
    inter = sum(1 for k in p.kinds if k == LinkKind.INTER_ISL)
    lat = burst_latency(p, 10, 1e6)
    print(f"{kind.value:>13}: {p.isl_hops:2d} ISL hops ({inter} inter-plane), "
          f"bottleneck {min(p.rates_bps) / 1e6:.0f} Mbit/s, 10-packet burst {lat * 1e3:.1f} ms")
