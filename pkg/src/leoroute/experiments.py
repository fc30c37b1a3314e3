"""Monte-Carlo studies over random constellation rotations.

Seeding: the master seed and a rotation index give a 32-bit rotation seed
(recorded in every output row). That seed alone reproduces the rotation:
``SeedSequence(rotation_seed)`` spawns the rotation offset, traffic and
per-metric tie-break streams.
"""
from __future__ import annotations

import configparser
import csv
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from . import geometry
from .capacity import census, lambda_max
from .errors import ConfigurationError, UnreachableError
from .geometry import ConstellationConfig, GroundStation
from .link_budget import LinkBudgetParams
from .metrics import Metric
from .simulator import (LatencyStats, PacketRecord, TrafficConfig, collect_stats, ecdf_at,
                        generate_traffic, hop_wait_samples, simulate_metric)
from .topology import TopologySnapshot, build_topology

log = logging.getLogger(__name__)

METRIC_CODES = {Metric.HOP_COUNT: 0, Metric.PATHLOSS: 1, Metric.LATENCY: 2, Metric.PATHLOSS_FULL: 3}
DEFAULT_METRICS = (Metric.HOP_COUNT, Metric.PATHLOSS, Metric.LATENCY)


@dataclass(frozen=True)
class ExperimentConfig:
    constellation: ConstellationConfig = field(default_factory=ConstellationConfig)
    link: LinkBudgetParams = field(default_factory=LinkBudgetParams)
    traffic: TrafficConfig = field(default_factory=TrafficConfig)
    metrics: tuple[Metric, ...] = DEFAULT_METRICS
    bandwidths_mhz: tuple[float, ...] = (400.0,)
    rotations: int = 1000
    dt_min_s: float = 1e4
    dt_max_s: float = 1e6
    seed: int = 0
    gs_file: str | None = None
    out_dir: str = "results"
    seam_links: bool = False
    earth_rotation: bool = True
    occlusion_margin_km: float = 0.0
    workers: int = 1

    def __post_init__(self):
        if self.rotations < 1:
            raise ConfigurationError(f"rotations must be >= 1, got {self.rotations}")
        if not 0 < self.dt_min_s <= self.dt_max_s:
            raise ConfigurationError("need 0 < dt_min_s <= dt_max_s")
        if not self.metrics:
            raise ConfigurationError("at least one metric is required")
        if not self.bandwidths_mhz or any(b <= 0 for b in self.bandwidths_mhz):
            raise ConfigurationError("bandwidths must be positive")
        object.__setattr__(self, "metrics", tuple(Metric.parse(m) for m in self.metrics))
        object.__setattr__(self, "bandwidths_mhz", tuple(float(b) for b in self.bandwidths_mhz))

    def ground_stations(self) -> list[GroundStation]:
        return geometry.load_ground_stations(self.gs_file)

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["metrics"] = [m.value for m in self.metrics]
        return d


# config file keys -> (section, dataclass field, converter)
_SECTIONS = {
    "constellation": {
        "num_planes": ("constellation", "num_planes", int),
        "sats_per_plane": ("constellation", "sats_per_plane", int),
        "base_altitude_km": ("constellation", "base_altitude_km", float),
        "altitude_step_km": ("constellation", "altitude_step_km", float),
        "earth_radius_km": ("constellation", "earth_radius_km", float),
        "seam_links": ("experiment", "seam_links", "bool"),
        "earth_rotation": ("experiment", "earth_rotation", "bool"),
        "occlusion_margin_km": ("experiment", "occlusion_margin_km", float),
    },
    "link": {
        "carrier_frequency_ghz": ("link", "carrier_frequency_hz", lambda s: float(s) * 1e9),
        "eirp_density_dbw_per_mhz": ("link", "eirp_density_dbw_per_mhz", float),
        "tx_gain_db": ("link", "tx_gain_db", float),
        "rx_gain_db": ("link", "rx_gain_db", float),
        "bandwidth_mhz": ("experiment", "bandwidths_mhz", lambda s: tuple(float(x) for x in s.split(","))),
        "system_noise_temp_k": ("link", "system_noise_temp_k", float),
        "snr_margin_db": ("link", "snr_margin_db", float),
    },
    "traffic": {
        "arrival_rate_mbps": ("traffic", "arrival_rate_bps", lambda s: float(s) * 1e6),
        "packet_size_mbit": ("traffic", "packet_size_bits", lambda s: float(s) * 1e6),
        "max_burst": ("traffic", "max_burst", int),
        "t_sim_s": ("traffic", "t_sim_s", float),
        "warmup_s": ("traffic", "warmup_s", float),
        "duplex": ("traffic", "duplex", str),
    },
    "experiment": {
        "metrics": ("experiment", "metrics", lambda s: tuple(Metric.parse(x) for x in s.split(","))),
        "metric": ("experiment", "metrics", lambda s: tuple(Metric.parse(x) for x in s.split(","))),
        "rotations": ("experiment", "rotations", int),
        "dt_min_s": ("experiment", "dt_min_s", float),
        "dt_max_s": ("experiment", "dt_max_s", float),
        "seed": ("experiment", "seed", int),
        "gs_file": ("experiment", "gs_file", str),
        "out": ("experiment", "out_dir", str),
        "workers": ("experiment", "workers", int),
    },
}


def _parse_bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"not a boolean: {s!r}")


def config_from_mapping(sections: dict[str, dict[str, str]], base: ExperimentConfig | None = None,
                        source: str = "<config>") -> ExperimentConfig:
    """Build an :class:`ExperimentConfig` from ``{section: {key: text}}``."""
    base = base or ExperimentConfig()
    updates: dict[str, dict[str, Any]] = {"constellation": {}, "link": {}, "traffic": {}, "experiment": {}}
    for section, entries in sections.items():
        known = _SECTIONS.get(section)
        if known is None:
            raise ConfigurationError(f"{source}: unknown section [{section}]")
        for key, text in entries.items():
            if key not in known:
                raise ConfigurationError(f"{source}: unknown key {key!r} in [{section}]")
            target, name, conv = known[key]
            try:
                value = _parse_bool(text) if conv == "bool" else conv(text.strip())
            except ValueError as exc:
                raise ConfigurationError(f"{source}: bad value for {key}: {exc}") from None
            updates[target][name] = value
    return replace(
        base,
        constellation=replace(base.constellation, **updates["constellation"]),
        link=replace(base.link, **updates["link"]),
        traffic=replace(base.traffic, **updates["traffic"]),
        **updates["experiment"],
    )


def load_config(path: str | Path | None = None) -> ExperimentConfig:
    """Read an INI-style experiment file; ``None`` returns the defaults."""
    if path is None:
        return ExperimentConfig()
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    with open(path) as fh:
        parser.read_file(fh)
    sections = {s: dict(parser.items(s)) for s in parser.sections()}
    return config_from_mapping(sections, source=str(path))


# --- seeding ---------------------------------------------------------------

def rotation_seed(master_seed: int, rotation: int) -> int:
    ss = np.random.SeedSequence(master_seed, spawn_key=(rotation,))
    return int(ss.generate_state(1, np.uint32)[0])


def rotation_offset(rot_seed: int, dt_min: float, dt_max: float) -> float:
    rng = np.random.default_rng(np.random.SeedSequence(rot_seed, spawn_key=(0,)))
    return float(rng.uniform(dt_min, dt_max))


def traffic_rng(rot_seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(rot_seed, spawn_key=(1,)))


def tie_break_rng(rot_seed: int, metric: Metric, purpose: int = 0) -> np.random.Generator:
    """Tie-break stream for one metric; ``purpose`` separates census from simulation."""
    return np.random.default_rng(np.random.SeedSequence(rot_seed, spawn_key=(2, METRIC_CODES[metric], purpose)))


def rotation_snapshot(cfg: ExperimentConfig, rot_seed: int, bandwidth_mhz: float,
                      stations: Sequence[GroundStation] | None = None) -> TopologySnapshot:
    stations = cfg.ground_stations() if stations is None else stations
    dt = rotation_offset(rot_seed, cfg.dt_min_s, cfg.dt_max_s)
    c = geometry.propagate(geometry.build_constellation(cfg.constellation), dt, cfg.earth_rotation)
    params = cfg.link.with_bandwidth(bandwidth_mhz * 1e6)
    return build_topology(c, stations, params, cfg.seam_links, cfg.occlusion_margin_km)


# --- capacity study --------------------------------------------------------

@dataclass(frozen=True)
class CapacitySample:
    rotation: int
    rotation_seed: int
    metric: Metric
    bandwidth_mhz: float
    lambda_max_bps: float


@dataclass(frozen=True)
class RotationFailure:
    rotation: int
    rotation_seed: int
    reason: str


@dataclass
class CapacityStudy:
    samples: list[CapacitySample]
    failures: list[RotationFailure]

    def values(self, metric: Metric | str, bandwidth_mhz: float) -> np.ndarray:
        metric = Metric.parse(metric)
        return np.array([s.lambda_max_bps for s in self.samples
                         if s.metric is metric and s.bandwidth_mhz == bandwidth_mhz])


def _capacity_rotation(args):
    cfg, stations, rotation = args
    seed = rotation_seed(cfg.seed, rotation)
    samples = []
    try:
        for b in cfg.bandwidths_mhz:
            snap = rotation_snapshot(cfg, seed, b, stations)
            for m in cfg.metrics:
                cs = census(snap, m, tie_break_rng(seed, m), cfg.traffic.packet_size_bits)
                samples.append(CapacitySample(rotation, seed, m, b, lambda_max(cs, snap, cfg.traffic.duplex)))
    except UnreachableError as exc:
        return [], RotationFailure(rotation, seed, str(exc))
    return samples, None


def _map(fn, items: Iterable, workers: int):
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def run_capacity_study(cfg: ExperimentConfig, write: bool = True) -> CapacityStudy:
    """lambda_max for every rotation, metric and bandwidth."""
    stations = cfg.ground_stations()
    results = _map(_capacity_rotation, [(cfg, stations, r) for r in range(cfg.rotations)], cfg.workers)
    samples, failures = [], []
    for s, f in results:
        samples.extend(s)
        if f is not None:
            failures.append(f)
            log.warning("rotation %d failed: %s", f.rotation, f.reason)
    study = CapacityStudy(samples, failures)
    if write:
        write_capacity_outputs(study, cfg)
    return study


def write_capacity_outputs(study: CapacityStudy, cfg: ExperimentConfig) -> None:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "lambda_max_samples.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["rotation", "rotation_seed", "metric", "bandwidth_mhz", "lambda_max_bps"])
        for s in study.samples:
            w.writerow([s.rotation, s.rotation_seed, s.metric.value, _fmt(s.bandwidth_mhz), repr(s.lambda_max_bps)])
    for b in cfg.bandwidths_mhz:
        cols = {m: study.values(m, b) / 1e6 for m in cfg.metrics}
        write_cdf_table(out / f"cdf_max_flow_{_fmt(b)}MHz.txt", "value_mbps", cols)
    write_manifest(out / "capacity_manifest.json", cfg, study.failures, len(study.samples))


# --- latency study ---------------------------------------------------------

@dataclass
class LatencyStudy:
    records: dict[tuple[Metric, float], list[tuple[int, PacketRecord]]]
    failures: list[RotationFailure]

    def stats(self, metric: Metric | str, bandwidth_mhz: float) -> LatencyStats:
        return collect_stats([r for _, r in self.records[(Metric.parse(metric), bandwidth_mhz)]])


def _latency_rotation(args):
    cfg, stations, rotation = args
    seed = rotation_seed(cfg.seed, rotation)
    out = {}
    try:
        bursts = generate_traffic(len(stations), cfg.traffic, traffic_rng(seed))
        for b in cfg.bandwidths_mhz:
            snap = rotation_snapshot(cfg, seed, b, stations)
            for m in cfg.metrics:
                res = simulate_metric(snap, m, bursts, cfg.traffic, tie_break_rng(seed, m, 1))
                out[(m, b)] = res.records
    except UnreachableError as exc:
        return rotation, {}, RotationFailure(rotation, seed, str(exc))
    return rotation, out, None


def run_latency_study(cfg: ExperimentConfig, write: bool = True) -> LatencyStudy:
    """Simulate every metric on each rotation's snapshot with a shared burst trace."""
    stations = cfg.ground_stations()
    results = _map(_latency_rotation, [(cfg, stations, r) for r in range(cfg.rotations)], cfg.workers)
    records: dict[tuple[Metric, float], list] = {(m, b): [] for m in cfg.metrics for b in cfg.bandwidths_mhz}
    failures = []
    for rotation, per_key, fail in sorted(results, key=lambda x: x[0]):
        if fail is not None:
            failures.append(fail)
            log.warning("rotation %d failed: %s", rotation, fail.reason)
            continue
        for key, recs in per_key.items():
            records[key].extend((rotation, r) for r in recs)
    study = LatencyStudy(records, failures)
    if write:
        write_latency_outputs(study, cfg)
    return study


RECORD_COLUMNS = ["rotation", "burst_id", "packet_idx", "src", "dst", "hops",
                  "waiting_s", "transmission_s", "propagation_s", "latency_s"]


def write_records(path: Path, rows: Sequence[tuple[int, PacketRecord]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RECORD_COLUMNS)
        for rotation, r in rows:
            w.writerow([rotation, r.burst_id, r.packet_index, r.source, r.destination, r.hops,
                        repr(r.waiting), repr(r.transmission), repr(r.propagation), repr(r.latency)])


def read_records(path: str | Path) -> list[tuple[int, PacketRecord]]:
    rows = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            rows.append((int(row["rotation"]), PacketRecord(
                int(row["burst_id"]), int(row["packet_idx"]), int(row["src"]), int(row["dst"]),
                int(row["hops"]), float(row["waiting_s"]), float(row["transmission_s"]),
                float(row["propagation_s"]), float(row["latency_s"]))))
    return rows


def write_latency_outputs(study: LatencyStudy, cfg: ExperimentConfig) -> None:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    p_tag = f"{_fmt(cfg.traffic.packet_size_bits / 1e6)}Mbit"
    for b in cfg.bandwidths_mhz:
        b_tag = f"{_fmt(b)}MHz"
        lat, wait, table = {}, {}, []
        for m in cfg.metrics:
            rows = study.records[(m, b)]
            write_records(out / f"records_{m.value}_{b_tag}.csv", rows)
            recs = [r for _, r in rows]
            lat[m] = np.array([r.latency for r in recs]) * 1e3
            wait[m] = hop_wait_samples(recs) * 1e3
            if recs:
                st = collect_stats(recs)
                table.append((m, st.mean_propagation, st.mean_transmission, st.mean_waiting, st.mean_latency))
        write_cdf_table(out / f"CDF_latency_{p_tag}_{b_tag}.txt", "value_ms", lat, step=0.5)
        write_cdf_table(out / f"CDF_waiting_time_{p_tag}_{b_tag}.txt", "value_ms", wait, step=0.05)
        with open(out / f"Latency_cost_{p_tag}_{b_tag}.txt", "w") as fh:
            fh.write("metric name propagation transmission queue total\n")
            for m, prop, tx, q, tot in table:
                idx = METRIC_CODES[m] + 1
                fh.write(f"{idx} {m.value} {prop * 1e3!r} {tx * 1e3!r} {q * 1e3!r} {tot * 1e3!r}\n")
    n = sum(len(v) for v in study.records.values())
    write_manifest(out / "latency_manifest.json", cfg, study.failures, n)


# --- output helpers --------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:g}"


def write_cdf_table(path: Path, value_column: str, columns: dict[Metric, np.ndarray],
                    step: float | None = None) -> None:
    """Whitespace table: value column then one empirical CDF column per metric.

    Without ``step`` the grid is the union of all sample values; with it a
    uniform grid from 0 to the largest sample.
    """
    nonempty = [v for v in columns.values() if v.size]
    if not nonempty:
        grid = np.zeros(0)
    elif step is None:
        grid = np.unique(np.concatenate(nonempty))
    else:
        top = max(float(v.max()) for v in nonempty)
        grid = np.arange(0.0, top + step, step)
    metrics = list(columns)
    cdfs = [ecdf_at(columns[m], grid) if columns[m].size else np.full(grid.size, np.nan) for m in metrics]
    with open(path, "w") as fh:
        fh.write(" ".join([value_column] + [f"F_{_cdf_name(m)}" for m in metrics]) + "\n")
        for i, x in enumerate(grid):
            fh.write(" ".join([repr(float(x))] + [repr(float(c[i])) for c in cdfs]) + "\n")


def _cdf_name(m: Metric) -> str:
    return {"hop": "hopcount", "pathloss": "pathloss", "latency": "latency",
            "pathloss-full": "pathloss_full"}[m.value]


def read_cdf_table(path: str | Path) -> dict[str, np.ndarray]:
    with open(path) as fh:
        header = fh.readline().split()
        data = np.loadtxt(fh, ndmin=2)
    if data.size == 0:
        return {h: np.zeros(0) for h in header}
    return {h: data[:, i] for i, h in enumerate(header)}


def write_manifest(path: Path, cfg: ExperimentConfig, failures: Sequence[RotationFailure], n_out: int) -> None:
    manifest = {
        "config": cfg.to_dict(),
        "seed": cfg.seed,
        "rotations": cfg.rotations,
        "failures": len(failures),
        "failed_rotations": [asdict(f) for f in failures],
        "outputs": n_out,
    }
    Path(path).write_text(json.dumps(manifest, indent=2, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, Metric):
        return o.value
    if isinstance(o, float) and not math.isfinite(o):
        return str(o)
    raise TypeError(type(o))
