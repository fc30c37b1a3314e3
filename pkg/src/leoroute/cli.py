"""Command line entry point: ``leoroute {capacity,latency,snapshot,validate}``."""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import experiments, validation
from .errors import ConfigurationError
from .metrics import Metric


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="INI experiment file")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--rotations", type=int, help="number of random rotations")
    p.add_argument("--metric", help="comma-separated metrics (hop, latency, pathloss, pathloss-full)")
    p.add_argument("--bandwidth-mhz", help="comma-separated ISL bandwidths in MHz")
    p.add_argument("--out", help="output directory")
    p.add_argument("--gs-file", help="ground station CSV (name, lat, lon)")
    p.add_argument("--workers", type=int, help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="leoroute", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("capacity", help="lambda_max samples over random rotations"))
    _common(sub.add_parser("latency", help="packet simulation over random rotations"))
    snap = sub.add_parser("snapshot", help="dump the edge table of one rotation")
    _common(snap)
    snap.add_argument("--rotation", type=int, default=0, help="rotation index to dump")
    sub.add_parser("validate", help="run the built-in invariant checks")
    return parser


def resolve_config(args: argparse.Namespace) -> experiments.ExperimentConfig:
    cfg = experiments.load_config(args.config)
    over = {}
    if args.seed is not None:
        over["seed"] = args.seed
    if args.rotations is not None:
        over["rotations"] = args.rotations
    if args.metric:
        over["metrics"] = tuple(Metric.parse(m) for m in args.metric.split(","))
    if args.bandwidth_mhz:
        over["bandwidths_mhz"] = tuple(float(b) for b in args.bandwidth_mhz.split(","))
    if args.out:
        over["out_dir"] = args.out
    if args.gs_file:
        over["gs_file"] = args.gs_file
    if args.workers is not None:
        over["workers"] = args.workers
    return replace(cfg, **over)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "validate":
        results = validation.run_all()
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
        return 0 if all(r.passed for r in results) else 1
    try:
        cfg = resolve_config(args)
    except (ConfigurationError, ValueError) as exc:
        print(f"leoroute: {exc}", file=sys.stderr)
        return 2

    if args.command == "capacity":
        study = experiments.run_capacity_study(cfg)
        for b in cfg.bandwidths_mhz:
            for m in cfg.metrics:
                v = study.values(m, b) / 1e6
                if v.size:
                    print(f"B={b:g} MHz {m.value:>13}: n={v.size} min={v.min():.2f} "
                          f"median={np.median(v):.2f} max={v.max():.2f} Mbit/s")
        print(f"failed rotations: {len(study.failures)}; outputs in {cfg.out_dir}")
    elif args.command == "latency":
        study = experiments.run_latency_study(cfg)
        for b in cfg.bandwidths_mhz:
            for m in cfg.metrics:
                if not study.records[(m, b)]:
                    continue
                st = study.stats(m, b)
                print(f"B={b:g} MHz {m.value:>13}: packets={st.count} p90={st.latency_quantile(0.9) * 1e3:.1f} ms "
                      f"mean wait/tx/prop = {st.mean_waiting * 1e3:.2f}/{st.mean_transmission * 1e3:.2f}/"
                      f"{st.mean_propagation * 1e3:.2f} ms")
        print(f"failed rotations: {len(study.failures)}; outputs in {cfg.out_dir}")
    elif args.command == "snapshot":
        seed = experiments.rotation_seed(cfg.seed, args.rotation)
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for b in cfg.bandwidths_mhz:
            snap = experiments.rotation_snapshot(cfg, seed, b)
            path = out / f"snapshot_r{args.rotation}_{b:g}MHz.csv"
            snap.dump_edges(path)
            print(f"wrote {snap.num_edges} edges to {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
