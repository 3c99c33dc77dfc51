import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from stochgame.cli import main


def read(path: Path) -> str:
    return path.read_text(encoding="utf-8")


def dir_snapshot(root: Path) -> dict:
    return {p.name: p.read_bytes() for p in sorted(root.iterdir()) if p.is_file()}


class TestValuesCommand:
    def test_lambda_grid_rows_per_state(self, tmp_path):
        out = tmp_path / "run"
        code = main(
            [
                "values",
                "--corpus",
                "big_match",
                "--lambda-grid",
                "1e-1,1e-2,1e-3",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        lines = read(out / "values.csv").strip().splitlines()
        assert lines[0].startswith("# stochgame-csv v1")
        assert lines[1] == "kind,param,state,value"
        assert len(lines) == 2 + 3 * 3  # three discounts, three states
        limit = json.loads(read(out / "limit.json"))
        assert limit["value"]["play"] == pytest.approx(0.5, abs=1e-5)
        assert limit["dispersion"] <= 1e-6

    def test_n_grid_against_game_file(self, tmp_path, games_dir):
        out = tmp_path / "run"
        code = main(
            [
                "values",
                "--game",
                str(games_dir / "single_player_mdp.json"),
                "--n",
                "10",
                "--out",
                str(out),
                "--format",
                "json",
            ]
        )
        assert code == 0
        payload = json.loads(read(out / "values.json"))
        rows = {row[2]: row[3] for row in payload["rows"]}
        from oracles import mdp_finite_values
        from stochgame import load_game_file

        game = load_game_file(games_dir / "single_player_mdp.json")
        oracle = mdp_finite_values(game, 10)[-1]
        for s, state in enumerate(game.states):
            assert rows[state] == pytest.approx(oracle[s], abs=1e-12)

    def test_missing_file_exits_2(self, tmp_path, capsys):
        code = main(
            ["values", "--game", str(tmp_path / "absent.json"), "--lambda", "0.5", "--out", str(tmp_path / "o")]
        )
        assert code == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "FileNotFoundError"

    def test_needs_some_grid(self, tmp_path):
        assert main(["values", "--corpus", "big_match", "--out", str(tmp_path / "o")]) == 2

    def test_non_monotone_grid_rejected(self, tmp_path):
        code = main(
            ["values", "--corpus", "big_match", "--lambda-grid", "0.1,0.5,0.2", "--out", str(tmp_path / "o")]
        )
        assert code == 2


class TestAdaptedCommand:
    def test_constant_game_epsilon_near_zero(self, tmp_path):
        game_path = tmp_path / "const.json"
        game_path.write_text(
            json.dumps(
                {
                    "states": ["s", "t"],
                    "actions1": ["a", "b"],
                    "actions2": ["c", "d"],
                    "payoff": [[[0.5, 0.5], [0.5, 0.5]], [[0.5, 0.5], [0.5, 0.5]]],
                    "transition": [
                        [[[0.5, 0.5], [0.5, 0.5]], [[0.5, 0.5], [0.5, 0.5]]],
                        [[[0.5, 0.5], [0.5, 0.5]], [[0.5, 0.5], [0.5, 0.5]]],
                    ],
                }
            )
        )
        out = tmp_path / "run"
        assert main(["adapted", "--game", str(game_path), "--n-grid", "10,20", "--out", str(out)]) == 0
        rows = read(out / "adapted.csv").strip().splitlines()[2:]
        for row in rows:
            assert float(row.split(",")[3]) <= 1e-7

    def test_epsilon_non_increasing_on_big_match(self, tmp_path):
        out = tmp_path / "run"
        assert main(["adapted", "--corpus", "big_match", "--n-grid", "20,60,180", "--out", str(out)]) == 0
        rows = read(out / "adapted.csv").strip().splitlines()[2:]
        eps = [float(r.split(",")[3]) for r in rows]
        assert eps[0] >= eps[1] >= eps[2]

    def test_block_length_one_exits_2(self, tmp_path, capsys):
        code = main(
            ["adapted", "--corpus", "big_match", "--n", "20", "--a", "1", "--out", str(tmp_path / "o")]
        )
        assert code == 2
        err = json.loads(capsys.readouterr().err)
        assert "block length" in err["message"]

    def test_mu_file_drives_block_selection(self, tmp_path):
        mu_path = tmp_path / "mu.json"
        mu_path.write_text(json.dumps({"thresholds": [0.5] * 30, "provenance": "empirical"}))
        out = tmp_path / "run"
        assert main(
            [
                "adapted",
                "--corpus",
                "big_match",
                "--n",
                "12",
                "--mu-file",
                str(mu_path),
                "--out",
                str(out),
            ]
        ) == 0
        row = read(out / "adapted.csv").strip().splitlines()[2]
        assert row.split(",")[1] == "2"  # constant-1/2 thresholds admit a = 2


class TestCurveAndCertify:
    def test_curve_outputs_and_summary(self, tmp_path):
        out = tmp_path / "run"
        code = main(
            [
                "curve",
                "--corpus",
                "big_match",
                "--n-grid",
                "40,80",
                "--t-grid",
                "0.25,0.5,0.75",
                "--discounted-grid",
                "0.1,0.01",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        lines = read(out / "curve.csv").strip().splitlines()
        assert lines[1] == "n,t,cumulative,target,deviation"
        assert len(lines) == 2 + 2 * 3
        summary = json.loads(read(out / "summary.json"))
        assert set(summary["sup_deviation"]) == {"40", "80"}
        dlines = read(out / "discounted.csv").strip().splitlines()
        assert len(dlines) == 2 + 2 * 3

    def test_curve_constant_game_deviation_is_rounding_only(self, tmp_path):
        game_path = tmp_path / "const.json"
        game_path.write_text(
            json.dumps(
                {
                    "states": ["s"],
                    "actions1": ["a", "b"],
                    "actions2": ["c", "d"],
                    "payoff": [[[0.8, 0.8], [0.8, 0.8]]],
                    "transition": [[[[1.0], [1.0]], [[1.0], [1.0]]]],
                }
            )
        )
        out = tmp_path / "run"
        code = main(
            ["curve", "--game", str(game_path), "--n", "25", "--t-grid", "0.3,0.5,0.7", "--out", str(out)]
        )
        assert code == 0
        for row in read(out / "curve.csv").strip().splitlines()[2:]:
            deviation = abs(float(row.split(",")[4]))
            assert deviation <= 0.8 / 25 + 1e-9

    def test_certify_report(self, tmp_path):
        out = tmp_path / "run"
        code = main(["certify", "--corpus", "two_state_cycle", "--n", "30", "--out", str(out)])
        assert code == 0
        report = json.loads(read(out / "certify.json"))
        assert report["n"] == 30
        assert report["epsilon"] >= -1e-8
        assert report["value_drift"]["within_block_target"] == pytest.approx(
            report["p"] ** -2.0
        )


class TestExitCodes:
    def test_convergence_failure_exits_3(self, tmp_path, capsys, monkeypatch):
        from stochgame.errors import ConvergenceError
        import stochgame.cli as cli

        def exploding(*args, **kwargs):
            raise ConvergenceError("solve stalled", residual=0.5, iterations=9)

        monkeypatch.setattr(cli, "discounted_value", exploding)
        code = main(["values", "--corpus", "big_match", "--lambda", "0.5", "--out", str(tmp_path / "o")])
        assert code == 3
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "ConvergenceError"


class TestGen:
    def test_gen_matches_golden_corpus_file(self, tmp_path, games_dir):
        out = tmp_path / "run"
        assert main(
            ["gen", "--states", "2", "--actions1", "2", "--actions2", "2", "--seed", "7", "--out", str(out)]
        ) == 0
        assert read(out / "game.json") == read(games_dir / "random_2_2_2_seed7.json")


class TestReproducibility:
    def test_rerun_from_manifest_byte_identical(self, tmp_path):
        first = tmp_path / "first"
        second = tmp_path / "second"
        assert main(
            ["values", "--corpus", "big_match", "--lambda-grid", "1e-1,1e-2,1e-3", "--out", str(first)]
        ) == 0
        assert main(["rerun", str(first / "manifest.json"), "--out", str(second)]) == 0
        assert dir_snapshot(first) == dir_snapshot(second)

    def test_rerun_detects_changed_input(self, tmp_path, games_dir, capsys):
        game_path = tmp_path / "game.json"
        game_path.write_text(read(games_dir / "big_match.json"))
        first = tmp_path / "first"
        assert main(["values", "--game", str(game_path), "--lambda", "0.5", "--out", str(first)]) == 0
        game_path.write_text(read(games_dir / "two_state_cycle.json"))
        code = main(["rerun", str(first / "manifest.json"), "--out", str(tmp_path / "second")])
        assert code == 2
        assert "changed" in json.loads(capsys.readouterr().err)["message"]

    def test_identical_commands_identical_outputs(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        argv = ["curve", "--corpus", "two_state_cycle", "--n", "30", "--t-grid", "0.5"]
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        assert dir_snapshot(a) == dir_snapshot(b)

    def test_manifest_records_config_and_version(self, tmp_path):
        out = tmp_path / "run"
        assert main(["values", "--corpus", "big_match", "--lambda", "0.5", "--out", str(out)]) == 0
        manifest = json.loads(read(out / "manifest.json"))
        assert manifest["command"] == "values"
        assert manifest["config"]["lambda_grid"] == [0.5]
        assert manifest["package_version"]


class TestProcessPool:
    def test_worker_pool_matches_serial(self, tmp_path):
        serial, pooled = tmp_path / "serial", tmp_path / "pooled"
        argv = ["values", "--corpus", "two_state_cycle", "--lambda-grid", "0.5,0.25,0.125"]
        assert main(argv + ["--out", str(serial)]) == 0
        env = dict(os.environ, STOCHGAME_WORKERS="2")
        proc = subprocess.run(
            [sys.executable, "-m", "stochgame.cli"] + argv + ["--out", str(pooled)],
            env=env,
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert read(serial / "values.csv") == read(pooled / "values.csv")


class TestEntryPoint:
    def test_console_script_runs(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "stochgame.cli", "--version"], capture_output=True, text=True
        )
        assert proc.returncode == 0
        assert "stochgame" in proc.stdout
