"""Maximum per-station load for a few random rotations."""
import numpy as np

from leoroute.capacity import bottleneck_edge, census, lambda_max
from leoroute.experiments import ExperimentConfig, rotation_seed, rotation_snapshot, tie_break_rng
from leoroute.metrics import Metric

cfg = ExperimentConfig()
stations = cfg.ground_stations()
for r in range(5):
    seed = rotation_seed(cfg.seed, r)
    snap = rotation_snapshot(cfg, seed, 400.0, stations)
    row = []
    for m in cfg.metrics:
        cs = census(snap, m, tie_break_rng(seed, m))
        k = bottleneck_edge(cs, snap)
        row.append(f"{m.value} {lambda_max(cs, snap) / 1e6:6.1f} (edge {snap.vertex_label(snap.edges[k].u)}-"
                   f"{snap.vertex_label(snap.edges[k].v)}, {cs.edge_counts[k]} paths)")
    print(f"rotation {r}: " + "; ".join(row))
