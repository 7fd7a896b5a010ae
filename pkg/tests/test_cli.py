"""CLI subcommands: outputs, determinism, config round-trip, error paths."""

import json
import math

import pytest

from eoe.cli import ExperimentConfig, parse_header, run_cli
from eoe.errors import ConfigError


def read(path):
    return path.read_bytes()


class TestTransformCommand:
    def test_rows_decreasing_in_unit_interval(self, tmp_path):
        out = tmp_path / "t.csv"
        code = run_cli(["transform", "--graph", "ring:6", "--lambda", "2",
                        "--gamma", "0.5", "--s-grid", "0.1,1,5",
                        "--out", str(out)])
        assert code == 0
        lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
        assert lines[0] == "subject,family,n,m,lambda,gamma,s,value,provenance"
        vals = [float(l.split(",")[7]) for l in lines[1:]]
        assert len(vals) == 3
        assert all(0 < v < 1 for v in vals)
        assert vals == sorted(vals, reverse=True)

    def test_subject_n_paper_variant(self, tmp_path):
        out = tmp_path / "n.csv"
        run_cli(["transform", "--graph", "complete:10", "--subject", "N",
                 "--variant", "paper", "--s-grid", str(math.log(2)),
                 "--out", str(out)])
        line = [l for l in out.read_text().splitlines() if not l.startswith("#")][1]
        assert float(line.split(",")[7]) == pytest.approx(1 / 11, abs=1e-12)

    def test_reruns_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["transform", "--graph", "bipartite:2:6", "--lambda", "1",
                "--gamma", "1", "--s-grid", "0.5,2"]
        run_cli(args + ["--out", str(a)])
        run_cli(args + ["--out", str(b)])
        assert read(a) == read(b)


class TestSimulateCommand:
    def test_csv_determinism(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["simulate", "--graph", "complete:3", "--lambda", "1",
                "--gamma", "1", "--reps", "7", "--seed", "42"]
        assert run_cli(args + ["--out", str(a)]) == 0
        assert run_cli(args + ["--out", str(b)]) == 0
        assert read(a) == read(b)

    def test_threads_do_not_change_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["simulate", "--graph", "ring:6", "--lambda", "2", "--gamma",
                "0.5", "--reps", "64", "--seed", "9"]
        run_cli(args + ["--threads", "1", "--out", str(a)])
        run_cli(args + ["--threads", "8", "--out", str(b)])
        assert read(a) == read(b)

    def test_csv_columns(self, tmp_path):
        out = tmp_path / "s.csv"
        run_cli(["simulate", "--graph", "ring:4", "--lambda", "1", "--gamma",
                 "1", "--reps", "3", "--seed", "1", "--out", str(out)])
        lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
        assert lines[0] == "rep,T,n_jumps,n_reinfections"
        assert len(lines) == 4
        rep, t, jumps, reinf = lines[1].split(",")
        assert rep == "0" and float(t) > 0 and int(jumps) >= 1 and int(reinf) >= 0

    def test_json_summary(self, tmp_path):
        out = tmp_path / "s.json"
        run_cli(["simulate", "--graph", "complete:4", "--lambda", "1",
                 "--gamma", "1", "--reps", "200", "--seed", "3",
                 "--s-grid", "0.5,1", "--format", "json", "--out", str(out)])
        payload = json.loads(out.read_text())
        assert payload["meta"]["seed"] == 3
        assert payload["summary"]["count"] == 200
        tvals = {row["s"]: row["value"] for row in payload["summary"]["transform"]}
        assert tvals[0.5] > tvals[1.0]

    def test_meeting_mode(self, tmp_path):
        out = tmp_path / "m.csv"
        run_cli(["simulate", "--graph", "bipartite:2:6", "--lambda", "1",
                 "--reps", "50", "--seed", "5", "--meeting", "--start", "0,2",
                 "--out", str(out)])
        lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
        assert lines[0] == "rep,M,N"
        ns = [int(l.split(",")[2]) for l in lines[1:]]
        assert all(n % 2 == 1 for n in ns)

    def test_start_rejected_for_epidemic_runs(self, tmp_path, capsys):
        code = run_cli(["simulate", "--graph", "ring:6", "--lambda", "1",
                        "--gamma", "1", "--reps", "2", "--start", "0,3",
                        "--out", str(tmp_path / "x.csv")])
        assert code == 2
        assert "start" in capsys.readouterr().err

    def test_env_seed_default(self, tmp_path, monkeypatch):
        monkeypatch.setenv("EOE_SEED", "77")
        out = tmp_path / "e.csv"
        run_cli(["simulate", "--graph", "ring:4", "--lambda", "1", "--gamma",
                 "1", "--reps", "2", "--out", str(out)])
        assert "# seed = 77" in out.read_text()


class TestConfig:
    def test_file_and_flag_merge(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text("graph = ring:6\nlambda = 2.0\ngamma = 0.5\nreps = 5\n")
        out = tmp_path / "o.csv"
        code = run_cli(["simulate", "--config", str(cfg), "--seed", "4",
                        "--out", str(out)])
        assert code == 0
        text = out.read_text()
        assert "# graph = ring:6" in text and "# seed = 4" in text

    def test_header_round_trip(self, tmp_path):
        out = tmp_path / "o.csv"
        run_cli(["simulate", "--graph", "complete:5", "--lambda", "1.5",
                 "--gamma", "0.25", "--reps", "4", "--seed", "11",
                 "--s-grid", "0.1,2", "--out", str(out)])
        echoed = parse_header(out.read_text())
        rebuilt = ExperimentConfig.from_mapping({
            "graph": "complete:5", "lambda": 1.5, "gamma": 0.25, "reps": 4,
            "seed": 11, "s_grid": (0.1, 2.0)})
        assert echoed == rebuilt

    def test_unknown_key_exits_2_naming_key(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("graph = ring:6\nwalkers = 3\n")
        code = run_cli(["simulate", "--config", str(cfg), "--reps", "1",
                        "--lambda", "1", "--gamma", "1"])
        assert code == 2
        assert "walkers" in capsys.readouterr().err

    def test_nonpositive_rate_rejected(self, capsys):
        code = run_cli(["simulate", "--graph", "ring:6", "--lambda", "-1",
                        "--gamma", "1", "--reps", "2"])
        assert code == 2
        assert "lambda" in capsys.readouterr().err

    def test_missing_key_reported(self, capsys):
        code = run_cli(["simulate", "--graph", "ring:6", "--gamma", "1",
                        "--reps", "2"])
        assert code == 2
        assert "lambda" in capsys.readouterr().err

    def test_config_parse_rejects_malformed_line(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.parse_lines(["graph ring:6"])


class TestSweepCommand:
    def test_convergence_sweep_json(self, tmp_path):
        out = tmp_path / "sweep.json"
        code = run_cli(["sweep", "--schedule", "complete-regime-i", "--n-grid",
                        "40,120", "--reps", "400", "--seed", "2", "--threads",
                        "2", "--out", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        rows = payload["report"]["rows"]
        assert [r["n"] for r in rows] == [40, 120]
        assert all(set(r) >= {"b_n", "distance", "mean", "median", "se_mean"}
                   for r in rows)

    def test_probe_sweep(self, tmp_path):
        out = tmp_path / "probe.json"
        code = run_cli(["sweep", "--schedule", "complete-regime-i",
                        "--schedule-lambda", "power:1:2", "--n-grid", "30,90",
                        "--reps", "300", "--seed", "3", "--probe", "--threads",
                        "2", "--out", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["report"]["median_trend"] == "increasing"

    def test_schedule_config_keys(self, tmp_path):
        cfg = tmp_path / "sweep.cfg"
        cfg.write_text(
            "schedule.name = complete-regime-i\n"
            "schedule.lambda.kind = power\n"
            "schedule.lambda.coef = 1.0\n"
            "schedule.lambda.exponent = 2.0\n"
            "n_grid = 30,60\nreps = 200\nseed = 5\nprobe = true\n")
        out = tmp_path / "sweep.json"
        assert run_cli(["sweep", "--config", str(cfg), "--threads", "2",
                        "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert "schedule.lambda.exponent = 2.0" in payload["meta"]["config"]

    def test_regime_violation_fails_loudly(self, tmp_path):
        with pytest.raises(Exception):
            run_cli(["sweep", "--schedule", "complete-regime-i",
                     "--schedule-lambda", "power:1:1", "--schedule-gamma",
                     "power:1:1", "--n-grid", "50,100", "--reps", "10",
                     "--out", str(tmp_path / "x.json")])


class TestVerifyAndBench:
    def test_verify_quick_passes(self, tmp_path, capsys):
        out = tmp_path / "verify.json"
        code = run_cli(["verify", "--quick", "--out", str(out)])
        assert code == 0
        text = capsys.readouterr().out
        assert "PASS theorem1-oracle-equality" in text
        payload = json.loads(out.read_text())
        assert payload["passed"] is True

    def test_bench_smoke(self, tmp_path):
        out = tmp_path / "bench.json"
        code = run_cli(["bench", "--graph", "ring:8", "--lambda", "5",
                        "--reps", "40", "--out", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert "python" in payload
