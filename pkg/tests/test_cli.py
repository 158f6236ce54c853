"""Tests for the command-line front end: exit codes, config layering and output files."""

import json

import pytest

from app import cli
from app.core.config import settings
from app.core.errors import ConfigError
from app.harness import persistence

TINY_SWEEP = [
    "--jobs", "1",
    "--override", "frame.subcarriers=64",
    "--override", "trials=2",
    "--override", "antenna_sweep=[8]",
]


@pytest.fixture(autouse=True)
def no_env_seed(monkeypatch):
    monkeypatch.setattr(settings, "DDAM_SIM_SEED", None)


class TestFeasibilityCommand:

    def test_default_report(self, capsys):
        assert cli.main(["feasibility"]) == 2
        lines = capsys.readouterr().out.splitlines()
        assert lines == [
            "INFEASIBLE lower=1.25e-4 upper=6.42e-5",
            "FEASIBLE lower=1.25e-4 upper=5.00e-4",
        ]

    def test_feasible_inputs_from_file(self, tmp_path, capsys):
        config = tmp_path / "inputs.json"
        config.write_text(json.dumps([{
            "delay_spread_s": 60e-9,
            "doppler_spread_hz": 2e3,
            "max_cp_overhead": 0.005,
            "max_slots": 8,
            "frame_duration_s": 1e-3,
        }]))
        out = tmp_path / "out"
        assert cli.main(["feasibility", "--config", str(config), "--out", str(out)]) == 0
        assert capsys.readouterr().out.startswith("FEASIBLE")
        assert (out / persistence.FEASIBILITY_FILE).exists()

    def test_bad_inputs(self, tmp_path):
        config = tmp_path / "inputs.json"
        config.write_text(json.dumps({"delay_spread_s": -1.0}))
        assert cli.main(["feasibility", "--config", str(config)]) == 1


class TestConfigLayering:

    def test_overrides_apply_in_order(self):
        cfg = cli.load_scenario(overrides=["trials=5", "trials=7", "ddam.mode=bin"])
        assert cfg.trials == 7
        assert cfg.ddam.mode == "bin"

    def test_grid_override_rederives_the_frame_duration(self):
        cfg = cli.load_scenario(overrides=["frame.subcarriers=64"])
        assert cfg.frame.frame_duration_s == pytest.approx(64 * 16 / 64e6)

    def test_full_profile(self):
        cfg = cli.load_scenario(full=True)
        assert (cfg.frame.subcarriers, cfg.frame.time_slots) == (512, 128)

    def test_file_is_merged_into_the_defaults(self, tmp_path):
        config = tmp_path / "scenario.json"
        config.write_text(json.dumps({"ddam": {"strategy": "isi_mrt"}, "base_seed": 3}))
        cfg = cli.load_scenario(str(config))
        assert cfg.ddam.strategy == "isi_mrt"
        assert cfg.ddam.interference_delay_window == 2
        assert cfg.base_seed == 3

    def test_seed_precedence(self, tmp_path, monkeypatch):
        config = tmp_path / "scenario.json"
        config.write_text(json.dumps({"base_seed": 3}))
        assert cli.load_scenario(str(config)).base_seed == 3
        monkeypatch.setattr(settings, "DDAM_SIM_SEED", 5)
        assert cli.load_scenario(str(config)).base_seed == 5
        assert cli.load_scenario(str(config), seed=9).base_seed == 9

    def test_override_parsing(self):
        assert cli.parse_override("a.b=[1, 2]") == {"a": {"b": [1, 2]}}
        assert cli.parse_override("ddam.mode=bin") == {"ddam": {"mode": "bin"}}
        with pytest.raises(ConfigError):
            cli.parse_override("trials")


class TestExitCodes:

    def test_missing_config(self, tmp_path):
        assert cli.main(["se-sweep", "--jobs", "1", "--config", str(tmp_path / "missing.json")]) == 1

    def test_invalid_json(self, tmp_path):
        config = tmp_path / "scenario.json"
        config.write_text("{not json")
        assert cli.main(["se-sweep", "--jobs", "1", "--config", str(config)]) == 1

    def test_invalid_value(self):
        assert cli.main(["se-sweep", "--jobs", "1", "--override", "trials=0"]) == 1

    def test_malformed_override(self):
        assert cli.main(["sinr", "--override", "trials"]) == 1

    def test_unknown_key(self):
        assert cli.main(["sinr", "--override", "frame.colour=1"]) == 1

    def test_infeasible_papr_baseline(self, tmp_path):
        argv = ["papr-sweep", "--jobs", "1", "--full", "--override", "papr.baseline_slots=4", "--out", str(tmp_path)]
        assert cli.main(argv) == 2


class TestSweeps:

    def test_se_sweep_writes_identical_results(self, tmp_path, capsys):
        for name in ("first", "second"):
            assert cli.main(["se-sweep", *TINY_SWEEP, "--out", str(tmp_path / name)]) == 0
        for filename in (persistence.SE_FILE, persistence.META_FILE):
            first = (tmp_path / "first" / filename).read_bytes()
            assert first == (tmp_path / "second" / filename).read_bytes()
        assert "ddam_path" in capsys.readouterr().out

    def test_seed_flag_reaches_the_metadata(self, tmp_path):
        assert cli.main(["se-sweep", *TINY_SWEEP, "--seed", "11", "--out", str(tmp_path)]) == 0
        meta = json.loads((tmp_path / persistence.META_FILE).read_text())
        assert meta["seed"] == 11

    def test_papr_sweep(self, tmp_path):
        argv = [
            "papr-sweep", "--jobs", "1",
            "--override", "frame.subcarriers=64",
            "--override", "slot_sweep=[2]",
            "--override", "papr.frames=5",
            "--out", str(tmp_path),
        ]
        assert cli.main(argv) == 0
        assert (tmp_path / persistence.PAPR_FILE).exists()


class TestOtherCommands:

    def test_demo_roundtrip(self, capsys):
        assert cli.main(["demo-roundtrip", "--seed", "3"]) == 0
        assert "relative error" in capsys.readouterr().out

    def test_sinr(self, capsys):
        argv = ["sinr", "--override", "antenna_sweep=[8]", "--override", "frame.subcarriers=64", "--seed", "2"]
        assert cli.main(argv) == 0
        document = json.loads(capsys.readouterr().out)
        assert document[0]["antennas"] == 8
        assert document[0]["seed"] == 2
        assert set(document[0]["sinr_db"]) == {"otfs_baseline", "ddam_path", "ddam_bin"}
