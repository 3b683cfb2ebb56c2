import csv
import json
import subprocess
import sys

import pydot
import pytest

from pvtrack.cli import EXIT_COLLAPSE, EXIT_CONFIG, OUT_DIR_ENV, main
from pvtrack.config import ConfigError, RunConfig, dump_config, parse_config

SMALL = "duration = 15\nk = 20\n"
TABLES = ["truth.csv", "measurements.csv", "tracks.csv", "overtakes.csv", "frames.csv",
          "summary.json"]


@pytest.fixture
def small_config(tmp_path):
    p = tmp_path / "small.cfg"
    p.write_text("# short scenario for tests\n" + SMALL)
    return p


def run(args):
    return main(["run", *args])


def only_run_dir(root):
    dirs = sorted(p for p in root.iterdir() if p.is_dir())
    assert len(dirs) == 1
    return dirs[0]


def test_defaults_follow_scenario_values():
    cfg = RunConfig()
    assert (cfg.meas_sigma, cfg.pd, cfg.clutter_intensity, cfg.clutter_low, cfg.clutter_high) == \
           (1.0, 0.99, 5e-3, -50.0, 150.0)
    assert (cfg.gate, cfg.q, cfg.k, cfg.r_birth) == (20.0, 1.0, 100, 0.5)


def test_parse_round_trip():
    cfg = parse_config("structure = occlusion\nseed = 4 # inline\n\nsim_pd=0.9\noracle = yes\n")
    assert (cfg.structure, cfg.seed, cfg.sim_pd, cfg.oracle) == ("occlusion", 4, 0.9, True)
    assert parse_config(dump_config(cfg)) == cfg


@pytest.mark.parametrize("text, key", [
    ("bogus = 1\n", "bogus"),
    ("k = ten\n", "k"),
    ("seed = 1\nseed = 2\n", "seed"),
])
def test_parse_errors_name_the_key(text, key):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.key == key
    assert key in str(info.value)


@pytest.mark.parametrize("text, key", [
    ("pd = 1.5\n", "pd"),
    ("structure = magnetic\n", "structure"),
    ("runs = 0\n", "runs"),
])
def test_invalid_values_exit_with_key(tmp_path, capsys, text, key):
    p = tmp_path / "bad.cfg"
    p.write_text(text)
    assert run(["--config", str(p), "--out-dir", str(tmp_path / "o")]) == EXIT_CONFIG
    assert repr(key) in capsys.readouterr().err


def test_single_run_artifacts(tmp_path, small_config, capsys):
    out = tmp_path / "out"
    assert run(["--config", str(small_config), "--seed", "3", "--out-dir", str(out)]) == 0
    agg = json.loads(capsys.readouterr().out)
    assert agg["runs"] == 1 and agg["structure"] == "collision"
    d = only_run_dir(out)
    assert d.name == "run_000_seed3"
    for name in TABLES + ["config.txt", "timing.json"]:
        assert (d / name).exists()
    with open(d / "tracks.csv") as fh:
        header = next(csv.reader(fh))
    assert header[:4] == ["frame", "label", "position", "position_std"]
    assert "best_weight" in header
    summary = json.loads((d / "summary.json").read_text())
    assert summary["frames"] == 15
    assert {"mean_proposals_per_frame", "certificate_rate", "mean_hypotheses"} <= set(summary)


def test_same_seed_gives_byte_identical_tables(tmp_path, small_config):
    for name in ("a", "b"):
        assert run(["--config", str(small_config), "--seed", "5",
                    "--out-dir", str(tmp_path / name)]) == 0
    da, db = only_run_dir(tmp_path / "a"), only_run_dir(tmp_path / "b")
    for name in TABLES:
        assert (da / name).read_bytes() == (db / name).read_bytes(), name


def test_env_sets_out_dir_and_flag_wins(tmp_path, small_config, monkeypatch):
    monkeypatch.setenv(OUT_DIR_ENV, str(tmp_path / "env"))
    assert run(["--config", str(small_config)]) == 0
    assert (tmp_path / "env" / "aggregate.json").exists()
    assert run(["--config", str(small_config), "--out-dir", str(tmp_path / "flag")]) == 0
    assert (tmp_path / "flag" / "aggregate.json").exists()


def test_multiple_runs_and_aggregate(tmp_path, small_config):
    out = tmp_path / "mc"
    assert run(["--config", str(small_config), "--seed", "7", "--runs", "3",
                "--workers", "2", "--out-dir", str(out)]) == 0
    dirs = sorted(p.name for p in out.iterdir() if p.is_dir())
    assert dirs == ["run_000_seed7", "run_001_seed8", "run_002_seed9"]
    with open(out / "aggregate.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [int(r["seed"]) for r in rows] == [7, 8, 9]
    agg = json.loads((out / "aggregate.json").read_text())
    assert agg["total_overtakes"] == sum(int(r["overtakes"]) for r in rows)


def test_structures_share_world_and_differ_in_selection(tmp_path, small_config):
    for s in ("independence", "collision"):
        assert run(["--config", str(small_config), "--structure", s, "--seed", "1",
                    "--out-dir", str(tmp_path / s)]) == 0
    di, dc = only_run_dir(tmp_path / "independence"), only_run_dir(tmp_path / "collision")
    for name in ("truth.csv", "measurements.csv"):
        assert (di / name).read_bytes() == (dc / name).read_bytes()
    si = json.loads((di / "summary.json").read_text())
    sc = json.loads((dc / "summary.json").read_text())
    assert si["frames"] == sc["frames"]
    assert sc["would_collide_selected"] == 0


def test_tree_generations(tmp_path, small_config):
    out = tmp_path / "tree"
    assert run(["--config", str(small_config), "--tree-generations", "5",
                "--out-dir", str(out)]) == 0
    text = (only_run_dir(out) / "tree.dot").read_text()
    frames = set()
    graph = pydot.graph_from_dot_data(text)[0]
    for node in graph.get_nodes():
        label = node.get("label") or ""
        if "gray" in label:
            frames.add(int(label.split('gray">')[1].split("<")[0].split(":")[0]))
    assert frames == set(range(10, 15))


def test_oracle_mode(tmp_path, capsys):
    p = tmp_path / "tiny.cfg"
    p.write_text("duration = 8\nk = 8\noracle_k = 5\n")
    assert run(["--config", str(p), "--oracle", "--structure", "occlusion",
                "--out-dir", str(tmp_path / "o")]) == 0
    assert json.loads(capsys.readouterr().out)["oracle_checks"] > 0


def test_collapse_exit_code(tmp_path, small_config, monkeypatch, capsys):
    import pvtrack.dependent as dep
    import pvtrack.propose_verify as pv

    monkeypatch.setattr(pv, "verify", lambda *a: dep.VerificationResult(dep.IMPOSSIBLE, False, {}))
    assert run(["--config", str(small_config), "--out-dir", str(tmp_path / "c"),
                "--workers", "1"]) == EXIT_COLLAPSE
    assert "frame 0" in capsys.readouterr().err


def test_module_entry_point(tmp_path, small_config):
    proc = subprocess.run([sys.executable, "-m", "pvtrack", "run", "--config", str(small_config),
                           "--out-dir", str(tmp_path / "m")], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["runs"] == 1
