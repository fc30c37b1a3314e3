"""A small seeded Monte-Carlo run writing the same files as the CLI."""
import tempfile
from pathlib import Path

from leoroute.experiments import ExperimentConfig, read_cdf_table, run_capacity_study

out = Path(tempfile.mkdtemp())
cfg = ExperimentConfig(rotations=20, seed=7, out_dir=str(out), bandwidths_mhz=(100.0, 400.0))
study = run_capacity_study(cfg)
print("files:", sorted(p.name for p in out.iterdir()))
table = read_cdf_table(out / "cdf_max_flow_400MHz.txt")
print("columns:", list(table))
for m in cfg.metrics:
    for b in cfg.bandwidths_mhz:
        v = study.values(m, b) / 1e6
        print(f"{m.value:>9} B={b:g}: median {sorted(v)[len(v) // 2]:.1f} Mbit/s")
