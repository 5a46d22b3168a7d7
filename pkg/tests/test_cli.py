"""Command-line entry point: subcommands and exit codes"""
import json

import pandas as pd

import main
from scenarios.dataset import load_dataset

SMALL_SWEEP = {"version": 1, "sweep": {"densities": [2], "penetrations": [0.0, 1.0], "replications": 2},
               "train": {"M": 4, "densities": [2]}}


def write_config(tmp_path, document):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(document))
    return str(path)


def common(tmp_path, *extra):
    return ["--out", str(tmp_path / "out"), "--dataset", str(tmp_path / "scenarios.jsonl"),
            "--checkpoint", str(tmp_path / "out" / "ensemble.pkl"), *extra]


class TestCommands:

    def test_gen_writes_both_datasets(self, tmp_path):
        cfg = write_config(tmp_path, SMALL_SWEEP)
        assert main.main(["gen", "--count", "5", "--config", cfg, *common(tmp_path)]) == main.EXIT_OK
        assert len(load_dataset(str(tmp_path / "scenarios.jsonl"))) == 5
        assert len(load_dataset(str(tmp_path / "out" / "test_scenarios.jsonl"))) == 4

    def test_seed_flag_changes_scenarios(self, tmp_path):
        cfg = write_config(tmp_path, SMALL_SWEEP)
        main.main(["gen", "--count", "3", "--config", cfg, "--seed", "1", *common(tmp_path)])
        first = load_dataset(str(tmp_path / "scenarios.jsonl"))
        main.main(["gen", "--count", "3", "--config", cfg, "--seed", "2", *common(tmp_path)])
        assert load_dataset(str(tmp_path / "scenarios.jsonl")) != first

    def test_baseline_writes_reports(self, tmp_path):
        cfg = write_config(tmp_path, SMALL_SWEEP)
        assert main.main(["baseline", "--config", cfg, *common(tmp_path)]) == main.EXIT_OK
        summary = pd.read_csv(tmp_path / "out" / "baseline" / "summary.csv")
        assert len(summary) == 2

    def test_train_then_eval(self, tmp_path):
        document = {**SMALL_SWEEP, "train": {"M": 4, "densities": [2], "minibatch": 8, "replay_capacity": 100}}
        cfg = write_config(tmp_path, document)
        assert main.main(["train", "--episodes", "2", "--config", cfg, *common(tmp_path)]) == main.EXIT_OK
        assert (tmp_path / "out" / "ensemble.pkl").exists()
        assert len(pd.read_csv(tmp_path / "out" / "episode_log.csv")) == 2
        assert main.main(["eval", "--config", cfg, *common(tmp_path)]) == main.EXIT_OK
        assert (tmp_path / "out" / "policy" / "episodes.csv").exists()

    def test_bench_latency_without_checkpoint(self, tmp_path):
        cfg = write_config(tmp_path, SMALL_SWEEP)
        assert main.main(["bench-latency", "--trials", "5", "--config", cfg, *common(tmp_path)]) == main.EXIT_OK


class TestExitCodes:

    def test_bad_config_version(self, tmp_path):
        cfg = write_config(tmp_path, {"version": 99})
        assert main.main(["baseline", "--config", cfg, *common(tmp_path)]) == main.EXIT_CONFIG

    def test_eval_without_checkpoint(self, tmp_path):
        cfg = write_config(tmp_path, SMALL_SWEEP)
        assert main.main(["eval", "--config", cfg, *common(tmp_path)]) == main.EXIT_CONFIG

    def test_road_too_short_for_density(self, tmp_path):
        cfg = write_config(tmp_path, {"version": 1, "road": {"L": 30.0}, "train": {"densities": [10]}})
        assert main.main(["gen", "--count", "1", "--config", cfg, *common(tmp_path)]) == main.EXIT_CAPACITY
