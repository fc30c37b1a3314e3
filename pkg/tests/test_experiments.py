import json
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from leoroute import cli, experiments
from leoroute.errors import ConfigurationError
from leoroute.experiments import ExperimentConfig, load_config
from leoroute.metrics import Metric
from leoroute.simulator import TrafficConfig, collect_stats

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def small_cfg(tmp_path, **kw):
    base = dict(rotations=2, metrics=(Metric.PATHLOSS, Metric.LATENCY), out_dir=str(tmp_path / "out"), seed=3,
                traffic=TrafficConfig(t_sim_s=2.0, warmup_s=0.5))
    base.update(kw)
    return ExperimentConfig(**base)


def test_default_file_matches_defaults():
    cfg = load_config(CONFIGS / "default.ini")
    d = ExperimentConfig()
    assert cfg.constellation == d.constellation
    assert cfg.link == d.link
    assert cfg.traffic == d.traffic
    assert cfg.bandwidths_mhz == (100.0, 400.0)


def test_ini_parsing(tmp_path):
    f = tmp_path / "x.ini"
    f.write_text("[traffic]\narrival_rate_mbps = 25\nduplex = half\n[experiment]\nmetric = hop\nrotations = 7\n"
                 "[link]\nbandwidth_mhz = 100\n")
    cfg = load_config(f)
    assert cfg.traffic.arrival_rate_bps == 25e6
    assert cfg.traffic.duplex == "half"
    assert cfg.metrics == (Metric.HOP_COUNT,)
    assert cfg.rotations == 7
    assert cfg.bandwidths_mhz == (100.0,)


@pytest.mark.parametrize("text", ["[traffic]\nbogus = 1\n", "[nowhere]\na = 1\n", "[experiment]\nrotations = x\n",
                                  "[experiment]\nrotations = 0\n", "[traffic]\nduplex = simplex\n"])
def test_bad_config(tmp_path, text):
    f = tmp_path / "bad.ini"
    f.write_text(text)
    with pytest.raises(ConfigurationError):
        load_config(f)


def test_zero_rotations():
    with pytest.raises(ConfigurationError):
        ExperimentConfig(rotations=0)


def test_rotation_seeds():
    seeds = [experiments.rotation_seed(0, r) for r in range(50)]
    assert len(set(seeds)) == 50
    assert seeds == [experiments.rotation_seed(0, r) for r in range(50)]
    assert experiments.rotation_seed(1, 0) != seeds[0]
    dt = experiments.rotation_offset(seeds[0], 1e4, 1e6)
    assert 1e4 <= dt <= 1e6


def test_one_rotation_one_metric(tmp_path):
    cfg = small_cfg(tmp_path, rotations=1, metrics=(Metric.HOP_COUNT,))
    study = experiments.run_capacity_study(cfg)
    assert len(study.samples) == 1 and not study.failures
    assert study.values("hop", 400.0).shape == (1,)


def test_capacity_outputs_reproducible(tmp_path):
    a = small_cfg(tmp_path / "a")
    b = small_cfg(tmp_path / "b")
    sa = experiments.run_capacity_study(a)
    experiments.run_capacity_study(b)
    for name in ("lambda_max_samples.csv", "cdf_max_flow_400MHz.txt"):
        assert (Path(a.out_dir) / name).read_bytes() == (Path(b.out_dir) / name).read_bytes()
    table = experiments.read_cdf_table(Path(a.out_dir) / "cdf_max_flow_400MHz.txt")
    assert set(table) == {"value_mbps", "F_pathloss", "F_latency"}
    v = sa.values("pathloss", 400.0) / 1e6
    assert table["F_pathloss"][-1] == 1.0
    assert table["F_pathloss"][np.searchsorted(table["value_mbps"], v.min())] == 0.5
    top = max(v.max(), sa.values("latency", 400.0).max() / 1e6)
    assert table["value_mbps"][-1] == top
    manifest = json.loads((Path(a.out_dir) / "capacity_manifest.json").read_text())
    assert manifest["seed"] == 3 and manifest["failures"] == 0 and manifest["outputs"] == 4


def test_parallel_matches_serial(tmp_path):
    s1 = experiments.run_capacity_study(small_cfg(tmp_path, rotations=3), write=False)
    s2 = experiments.run_capacity_study(small_cfg(tmp_path, rotations=3, workers=2), write=False)
    assert s1.samples == s2.samples


@pytest.fixture(scope="module")
def latency_run(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("lat")
    cfg = small_cfg(tmp)
    return cfg, experiments.run_latency_study(cfg)


def test_latency_records_roundtrip(latency_run):
    cfg, study = latency_run
    out = Path(cfg.out_dir)
    for m in cfg.metrics:
        rows = experiments.read_records(out / f"records_{m.value}_400MHz.csv")
        assert len(rows) == len(study.records[(m, 400.0)]) > 0
        for (r0, a), (r1, b) in zip(rows, study.records[(m, 400.0)]):
            assert r0 == r1 and a.latency == b.latency and a.waiting == b.waiting
    st = study.stats("pathloss", 400.0)
    table = experiments.read_cdf_table(out / "CDF_latency_1Mbit_400MHz.txt")
    grid = table["value_ms"]
    assert np.all(np.diff(grid) > 0)
    assert table["F_pathloss"][-1] == 1.0
    lat_ms = st.latency_cdf[0] * 1e3
    i = len(grid) // 2
    assert table["F_pathloss"][i] == pytest.approx(np.mean(lat_ms <= grid[i]))


def test_latency_cost_table(latency_run):
    cfg, study = latency_run
    lines = (Path(cfg.out_dir) / "Latency_cost_1Mbit_400MHz.txt").read_text().splitlines()
    assert lines[0] == "metric name propagation transmission queue total"
    for line in lines[1:]:
        idx, name, prop, tx, q, tot = line.split()
        assert float(tot) == pytest.approx(float(prop) + float(tx) + float(q), rel=1e-9)
        st = collect_stats([r for _, r in study.records[(Metric.parse(name), 400.0)]])
        assert float(tot) == pytest.approx(st.mean_latency * 1e3, rel=1e-12)


def test_common_random_numbers(latency_run):
    _, study = latency_run
    ids = {m: {(rot, r.burst_id) for rot, r in study.records[(m, 400.0)]} for m, _ in study.records}
    a, b = ids.values()
    # same burst trace; only completion before the horizon can differ
    assert len(a & b) > 0.95 * max(len(a), len(b))


def test_cli_validate(capsys):
    assert cli.main(["validate"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 5


def test_cli_capacity_and_snapshot(tmp_path, capsys):
    out = tmp_path / "cli"
    assert cli.main(["capacity", "--rotations", "1", "--metric", "pathloss", "--seed", "2", "--out", str(out)]) == 0
    assert (out / "lambda_max_samples.csv").exists()
    assert cli.main(["snapshot", "--rotation", "0", "--out", str(out), "--bandwidth-mhz", "100"]) == 0
    assert (out / "snapshot_r0_100MHz.csv").exists()
    assert "pathloss" in capsys.readouterr().out


def test_cli_latency(tmp_path, capsys):
    ini = tmp_path / "short.ini"
    ini.write_text("[traffic]\nt_sim_s = 1\nwarmup_s = 0\n")
    out = tmp_path / "lat"
    assert cli.main(["latency", "--config", str(ini), "--rotations", "1", "--metric", "latency",
                     "--out", str(out)]) == 0
    assert (out / "latency_manifest.json").exists()
    assert "p90" in capsys.readouterr().out


def test_cli_bad_input(tmp_path, capsys):
    assert cli.main(["capacity", "--rotations", "0", "--out", str(tmp_path)]) == 2
    assert cli.main(["capacity", "--metric", "nope", "--out", str(tmp_path)]) == 2
