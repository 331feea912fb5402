import json
import subprocess
import sys

import pytest

from roughhj.errors import ConfigError
from roughhj.lab import (
    DEFAULTS,
    NAMES,
    Report,
    decide,
    emit_report,
    load_config,
    recheck,
    run_experiment,
    run_many,
)
from roughhj.lab.cli import main
from roughhj.pde import Grid, abs_diff


@pytest.mark.parametrize(
    "relation, values, thr, want",
    [
        ("le", [0.5], 0.5, True),
        ("ge", [0.6], 0.65, False),
        ("gt", [0.0], 0.0, False),
        ("all_le", [0, 1e-13], 1e-12, True),
        ("all_gt", [1, 0], 0, False),
        ("shrinks", [1.0, 0.7, 0.5], 0.8, True),
        ("shrinks", [1.0, 0.9], 0.8, False),
        ("contracts", [1.0, 0.5, 0.3], 0.8, True),
        ("contracts", [1.0, 0.9, 0.7], 0.8, False),
        ("contracts", [1.0, 1.0, 1.0], 0.8, True),
        ("contracts", [1.0, 0.5], 0.8, False),
        ("true", [1], None, True),
    ],
)
def test_decide(relation, values, thr, want):
    assert decide(relation, values, thr) is want


def test_decide_unknown():
    with pytest.raises(ConfigError):
        decide("approx", [1], 1)


class TestConfig:
    def test_defaults_cover_every_experiment(self):
        assert set(DEFAULTS) == set(NAMES)
        for name in NAMES:
            load_config(None, name)

    def test_file_and_overrides(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"experiment": "theorem1", "R": 0.5, "engine": {"m": 32}}))
        spec = load_config(cfg, overrides={"ladder": [0.1]})
        assert spec.params["R"] == 0.5
        assert spec.params["ladder"] == [0.1]
        assert spec.solve_config().m == 32
        assert spec.solve_config().ordering == "erode_first"

    @pytest.mark.parametrize(
        "data",
        [
            {"experiment": "nope"},
            {"experiment": "theorem1", "R": -1},
            {"experiment": "theorem1", "epsilon": 1.5},
            {"experiment": "theorem1", "ladder": [0.1, 0]},
            {"experiment": "theorem1", "engine": {"kind": "spectral"}},
            {"experiment": "theorem1", "engine": {"bogus": 1}},
            {"experiment": "theorem1", "path": {"kind": "zigzag", "amplitude": 1}},
            {},
        ],
    )
    def test_rejects(self, data):
        with pytest.raises(ConfigError):
            load_config(data)

    def test_name_mismatch(self):
        with pytest.raises(ConfigError):
            load_config({"experiment": "theorem1"}, "stationary")

    def test_bad_file(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{")
        with pytest.raises(ConfigError):
            load_config(bad)
        with pytest.raises(ConfigError):
            load_config(tmp_path / "missing.json")


class TestReports:
    def test_byte_stable(self, tmp_path):
        spec = load_config(None, "constant_ball")
        a = emit_report(run_experiment(spec), tmp_path / "a", "csv_bundle")
        b = emit_report(run_experiment(spec), tmp_path / "b", "csv_bundle")
        assert [p.name for p in a] == [p.name for p in b]
        for pa, pb in zip(a, b):
            if not pa.name.endswith(".timing.json"):
                assert pa.read_bytes() == pb.read_bytes()

    def test_json_and_bundle(self, tmp_path):
        rep = run_experiment(load_config(None, "theorem1", {"ladder": [0.1, 0.05, 0.04]}))
        files = emit_report(rep, tmp_path, "json")
        assert [p.name for p in files] == ["theorem1.json", "theorem1.timing.json"]
        doc = json.loads(files[0].read_text())
        assert doc["measurements"]["theorem_bound"] == pytest.approx(0.75)
        assert "runtimes" not in doc
        assert "total" in json.loads(files[1].read_text())["runtimes"]
        bundle = emit_report(rep, tmp_path / "bundle", "csv_bundle")
        assert bundle[-1].name == "theorem1.final_dx0.1.csv"
        assert bundle[-1].read_text().startswith("x,y,value\n")

    def test_recheck(self):
        doc = run_experiment(load_config(None, "cancellation")).to_dict()
        assert recheck(doc) == [v["passed"] for v in doc["verdicts"]]
        doc["verdicts"][0]["threshold"] = -1.0
        assert recheck(doc)[0] is False

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ConfigError):
            emit_report(Report("x", {}), tmp_path, "xml")

    def test_unwritable(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        with pytest.raises(OSError):
            emit_report(Report("x", {}), blocker / "sub")

    def test_grid_slices_are_csv(self, tmp_path):
        rep = Report("x", {})
        rep.grids["u0"] = abs_diff(Grid(2, 0.2, 0.1))
        files = emit_report(rep, tmp_path, "csv_bundle")
        assert files[-1].read_text().count("\n") == 1 + 25


def test_budget():
    with pytest.raises(ConfigError, match="budget"):
        run_experiment(load_config(None, "theorem1", {"budget": 1e3}))


def test_vacuous_theorem1():
    rep = run_experiment(load_config(None, "theorem1", {"R": 10}))
    assert not rep.passed
    assert "nothing to verify" in rep.verdicts[0].note
    assert run_experiment(load_config(None, "theorem1", {"R": 10, "vacuous_pass": True})).passed


def test_run_many_preserves_order():
    specs = [load_config(None, n) for n in ("classical_speed", "constant_ball")]
    reps = run_many(specs, jobs=2)
    assert [r.name for r in reps] == ["classical_speed", "constant_ball"]
    assert all(r.passed for r in reps)


class TestCli:
    def test_bound(self, capsys):
        assert main(["bound", "--path", "zigzag:1,4,1", "--R", "1"]) == 0
        assert capsys.readouterr().out.strip() == "0.75"

    def test_unknown_subcommand(self, capsys):
        assert main(["frobnicate"]) == 2
        assert "usage" in capsys.readouterr().err

    def test_bad_path(self, capsys):
        assert main(["bound", "--path", "spiral:1", "--R", "1"]) == 2
        assert "error" in capsys.readouterr().err

    def test_experiment_with_config(self, tmp_path, capsys):
        cfg = tmp_path / "t1.json"
        cfg.write_text(json.dumps({"experiment": "theorem1"}))
        assert main(["experiment", "theorem1", "--config", str(cfg), "--out", str(tmp_path / "r")]) == 0
        assert (tmp_path / "r" / "theorem1.json").exists()
        assert "[PASS] theorem1.finest_value" in capsys.readouterr().out

    def test_vacuous(self, capsys):
        assert main(["experiment", "theorem1", "--R", "10"]) == 1
        assert "bound is 0; nothing to verify" in capsys.readouterr().out
        assert main(["experiment", "theorem1", "--R", "10", "--vacuous-pass"]) == 0

    def test_solve(self, tmp_path, capsys):
        rc = main(["solve", "--path", "zigzag:0.5,1,1", "--R", "2", "--dx", "0.05", "--out", str(tmp_path)])
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        assert out["values"]["0.0,0.0"] == 0.0
        assert (tmp_path / "final.csv").exists()

    def test_solve_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "s.json"
        cfg.write_text(json.dumps({"path": "zigzag:1,2,1", "initial": "abs_diff", "dx": 0.1}))
        assert main(["solve", "--config", str(cfg)]) == 0
        assert json.loads(capsys.readouterr().out)["dx"] == 0.1

    def test_game_dp_and_simulate(self, tmp_path, capsys):
        assert main(["game", "--path", "zigzag:1,1,1", "--R", "2", "--dx", "0.1"]) == 0
        assert json.loads(capsys.readouterr().out)["value_origin"] == pytest.approx(0.0, abs=0.05)
        rc = main(["game", "--simulate", "--strategy", "delta_eps:0.1", "--beta", "1", "--out", str(tmp_path)])
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        assert (out["x_T"], out["y_T"], out["tau"], out["payoff"]) == (4.0, 4.0, None, 1.0)
        assert (tmp_path / "trajectory.csv").read_text().startswith("t,x,y,alpha,beta")

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "roughhj", "bound", "--path", "zigzag:1,2,1", "--R", "0"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0 and proc.stdout.strip() == "1"
