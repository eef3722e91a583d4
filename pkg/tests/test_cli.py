import json

import pytest

import metaforge as mf
from metaforge.cli import main, parse_config
from metaforge.errors import UsageError


class TestParseConfig:
    def test_design_with_racing_method(self):
        cfg = parse_config(
            ["design", "--problem", "onemax", "--dim", "50", "--objective", "quality",
             "--method", "racing"]
        )
        assert cfg.mode == "design"
        assert cfg.problem == "onemax"
        assert cfg.problem_params["dim"] == 50
        assert cfg.method == "racing"
        assert cfg.objective == "quality"

    def test_missing_problem_is_the_only_error(self):
        with pytest.raises(UsageError) as exc:
            parse_config(["design"])
        assert "problem" in str(exc.value)

    def test_algorithm_and_baseline_mutually_exclusive(self, tmp_path):
        with pytest.raises(UsageError):
            parse_config(
                ["solve", "--problem", "onemax", "--algorithm", "a.json", "--baseline", "GA"]
            )
        with pytest.raises(UsageError):
            parse_config(["solve", "--problem", "onemax"])

    def test_config_file_supplies_values_flags_override(self, tmp_path):
        doc = {"problem": "onemax", "problem.dim": 30, "iterations": 7, "seed": 9}
        path = tmp_path / "run.json"
        path.write_text(json.dumps(doc))
        cfg = parse_config(["design", "--config", str(path), "--iterations", "3"])
        assert cfg.problem == "onemax"
        assert cfg.problem_params["dim"] == 30
        assert cfg.iterations == 3  # flag wins
        assert cfg.seed == 9

    def test_unknown_config_key_rejected(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"problem": "onemax", "wibble": 1}))
        with pytest.raises(UsageError) as exc:
            parse_config(["design", "--config", str(path)])
        assert "wibble" in str(exc.value)

    def test_runtime_objective_needs_threshold(self):
        with pytest.raises(UsageError):
            parse_config(["design", "--problem", "onemax", "--objective", "runtimeFE"])
        cfg = parse_config(
            ["design", "--problem", "onemax", "--objective", "runtimeFE", "--threshold", "-10"]
        )
        assert cfg.threshold == -10.0

    def test_unknown_problem_rejected(self):
        with pytest.raises(UsageError):
            parse_config(["design", "--problem", "warehouse9"])

    def test_beamforming_n_list(self):
        cfg = parse_config(["design", "--problem", "beamforming", "--n", "4,6,8"])
        assert cfg.problem_params["n_list"] == [4, 6, 8]

    def test_tunable_slots_parsed(self):
        cfg = parse_config(
            ["design", "--problem", "onemax", "--tunable", "2:rate,0:k"]
        )
        assert cfg.tunable == [(2, "rate"), (0, "k")]


def _design_args(outdir, seed=5):
    return [
        "design", "--problem", "onemax", "--dim", "15",
        "--train-instances", "2", "--test-instances", "1",
        "--pop-size", "10", "--max-fe", "200", "--iterations", "3",
        "--candidates", "2", "--reps", "1", "--seed", str(seed),
        "-o", str(outdir),
    ]


class TestRunDesign:
    def test_manifest(self, tmp_path, capsys):
        out = tmp_path / "run1"
        assert main(_design_args(out)) == 0
        names = {p.name for p in out.iterdir()}
        assert {
            "best.json", "best.txt", "convergence.csv", "convergence.png",
            "evaluation_log.csv", "summary.csv",
        } <= names
        printed = capsys.readouterr().out
        assert "iter 3/3" in printed

    def test_rerun_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(_design_args(out1)) == 0
        assert main(_design_args(out2)) == 0
        assert (out1 / "best.json").read_bytes() == (out2 / "best.json").read_bytes()
        assert (out1 / "convergence.csv").read_bytes() == (out2 / "convergence.csv").read_bytes()

    def test_pseudocode_frame(self, tmp_path):
        out = tmp_path / "run2"
        assert main(_design_args(out)) == 0
        text = (out / "best.txt").read_text()
        lines = text.strip().splitlines()
        assert lines[0] == "S = initialize()"
        assert lines[1] == "While stopping criterion not met"
        assert lines[-1] == "End While"

    def test_convergence_csv_header(self, tmp_path):
        out = tmp_path / "run3"
        assert main(_design_args(out)) == 0
        first = (out / "convergence.csv").read_text().splitlines()[0]
        assert first == "iteration,best_aggregate"

    def test_fixed_topology_mode(self, tmp_path, roulette_reset_graph):
        from metaforge.graphs import same_topology

        algo = tmp_path / "frozen.json"
        algo.write_bytes(mf.serialize_graph(roulette_reset_graph))
        out = tmp_path / "run4"
        code = main(_design_args(out) + ["--fixed-topology", str(algo), "--tunable", "2:rate"])
        assert code == 0
        best = mf.deserialize_graph((out / "best.json").read_bytes())
        assert same_topology(best, roulette_reset_graph)


class TestRunSolve:
    def test_baseline_run_outputs(self, tmp_path, capsys):
        out = tmp_path / "solve1"
        code = main([
            "solve", "--problem", "onemax", "--dim", "12", "--baseline", "GA",
            "--pop-size", "10", "--max-fe", "150", "--reps", "3", "-o", str(out),
        ])
        assert code == 0
        names = {p.name for p in out.iterdir()}
        assert {
            "trajectory_rep0.csv", "trajectory_rep1.csv", "trajectory_rep2.csv",
            "trajectories.png", "summary.csv",
        } == names
        printed = capsys.readouterr().out
        assert "choose_tournament" in printed  # pseudocode echo
        header = (out / "trajectory_rep0.csv").read_text().splitlines()[0]
        assert header == "fe,best_fitness"

    def test_single_rep_zero_std(self, tmp_path):
        out = tmp_path / "solve2"
        assert main([
            "solve", "--problem", "onemax", "--dim", "12", "--baseline", "RS",
            "--pop-size", "10", "--max-fe", "100", "--reps", "1", "-o", str(out),
        ]) == 0
        summary = (out / "summary.csv").read_text()
        assert "0.00E+00" in summary

    def test_solve_designed_algorithm_file(self, tmp_path, roulette_reset_graph, capsys):
        algo = tmp_path / "alg.json"
        algo.write_bytes(mf.serialize_graph(roulette_reset_graph))
        out = tmp_path / "solve3"
        code = main([
            "solve", "--problem", "onemax", "--dim", "12", "--algorithm", str(algo),
            "--pop-size", "10", "--max-fe", "100", "--reps", "1", "-o", str(out),
        ])
        assert code == 0
        printed = capsys.readouterr().out
        assert "search_reset_rand(0.1342, S_new)" in printed

    def test_bad_algorithm_file_fails_and_cleans_up(self, tmp_path, capsys):
        algo = tmp_path / "broken.json"
        algo.write_text('{"encoding": "discrete"')
        out = tmp_path / "solve4"
        code = main([
            "solve", "--problem", "onemax", "--dim", "12", "--algorithm", str(algo),
            "-o", str(out),
        ])
        assert code == 1
        assert not out.exists() or not any(out.iterdir())

    def test_mean_std_format(self, tmp_path):
        out = tmp_path / "solve5"
        assert main([
            "solve", "--problem", "beamforming", "--n", "6", "--bits", "1",
            "--baseline", "RS", "--pop-size", "10", "--max-fe", "200",
            "--reps", "3", "-o", str(out),
        ]) == 0
        row = (out / "summary.csv").read_text().splitlines()[1]
        assert "±" in row and "E-" in row or "E+" in row


class TestExitCodes:
    def test_usage_error_exit_2(self, capsys):
        assert main(["design"]) == 2
        assert "usage error" in capsys.readouterr().err
