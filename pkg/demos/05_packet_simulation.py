"""Simulate ten seconds of bursty traffic on one snapshot."""
import numpy as np

from leoroute.experiments import ExperimentConfig, rotation_seed, rotation_snapshot
from leoroute.metrics import Metric
from leoroute.simulator import TrafficConfig, collect_stats, generate_traffic, simulate_metric

cfg = ExperimentConfig()
snap = rotation_snapshot(cfg, rotation_seed(0, 0), 400.0)
traffic = TrafficConfig(t_sim_s=10.0, warmup_s=1.0)
bursts = generate_traffic(snap.num_ground_stations, traffic, np.random.default_rng(1))
print(len(bursts), "bursts,", sum(b.n for b in bursts), "packets")

for m in (Metric.HOP_COUNT, Metric.PATHLOSS, Metric.LATENCY):
    st = collect_stats(simulate_metric(snap, m, bursts, traffic, np.random.default_rng(2)).records)
    print(f"{m.value:>9}: p90 {st.latency_quantile(0.9) * 1e3:6.1f} ms, "
          f"mean wait/tx/prop {st.mean_waiting * 1e3:.2f}/{st.mean_transmission * 1e3:.2f}/"
          f"{st.mean_propagation * 1e3:.2f} ms, waits < 0.1 ms: {st.waiting_fraction_below(1e-4):.0%}")
