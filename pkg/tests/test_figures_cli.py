import csv
import json

import numpy as np
from click.testing import CliRunner

from cookbench.evaluation.crossplay import EvalReport
from cookbench.evaluation.preferences import preference_aggregate
from cookbench.harness.cli import main as cli_main
from cookbench.harness.figures import (
    export_crossplay_bars,
    export_human_bars,
    export_preference_heatmap,
    export_training_curves,
)


def report_with(mean_values, agent="a"):
    r = EvalReport(agents=[agent], population_kind="RandomInit", members=["m"], layouts=["cramped"],
                   episodes_per_cell=len(mean_values), horizon=10, seed=0, stochastic=True)
    r.cells = [{"agent": agent, "partner": "m", "layout": "cramped",
                "deliveries": mean_values, "mean_deliveries": float(np.mean(mean_values)), "mean_return": 0.0}]
    return r


class TestFigures:
    def test_chart_count_matches_requests(self, tmp_path):
        reports = {"FCP": report_with([3, 4]), "SP": report_with([1, 2])}
        out = export_crossplay_bars(reports, tmp_path)
        assert (tmp_path / "crossplay.png").exists()
        assert (tmp_path / "crossplay.csv").exists()

    def test_error_bars_equal_csv_columns(self, tmp_path):
        reports = {"FCP": report_with([3, 5]), "SP": report_with([1, 3])}
        out = export_crossplay_bars(reports, tmp_path)
        with open(out["csv"]) as f:
            rows = list(csv.DictReader(f))
        for row, mu, sd in zip(rows, out["means"], out["sds"]):
            assert float(row["mean_deliveries"]) == round(mu, 6)
            assert float(row["sd"]) == round(sd, 6)

    def test_human_bars_ci(self, tmp_path):
        out = export_human_bars({"FCP": [3, 4, 5, 6], "SP": [1, 2, 1, 2]}, tmp_path)
        with open(out["csv"]) as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == 2
        assert float(rows[0]["ci95"]) > 0

    def test_preference_heatmap_values(self, tmp_path):
        matrix = preference_aggregate(
            [{"agent_a": "f", "agent_b": "s", "rating": 2}, {"agent_a": "f", "agent_b": "s", "rating": 1}],
            {"f": "FCP", "s": "SP"},
        )
        out = export_preference_heatmap(matrix, tmp_path)
        M = np.array(out["matrix"])
        assert M[0, 1] == -M[1, 0]

    def test_training_curves(self, tmp_path):
        curves = {
            "SP": [
                [{"step": 0, "mean_return": 0.0, "mean_deliveries": 0}, {"step": 10, "mean_return": 2.0, "mean_deliveries": 0}],
                [{"step": 0, "mean_return": 1.0, "mean_deliveries": 0}, {"step": 10, "mean_return": 3.0, "mean_deliveries": 0}],
            ]
        }
        out = export_training_curves(curves, tmp_path)
        with open(out["csv"]) as f:
            rows = list(csv.DictReader(f))
        assert float(rows[0]["mean_return"]) == 0.5
        assert float(rows[1]["mean_return"]) == 2.5

    def test_empty_report_set_is_success(self, tmp_path):
        runner = CliRunner()
        result = runner.invoke(cli_main, ["figures", "--out", str(tmp_path)])
        assert result.exit_code == 0
        assert "nothing to do" in result.output


class TestCli:
    def test_train_sp_tiny(self, tmp_path):
        runner = CliRunner()
        cfg = {
            "total_steps": 400, "checkpoint_every": 200, "layouts": ["cramped"], "horizon": 20,
            "n_envs": 4, "rollout_length": 5, "eval_episodes_per_checkpoint": 2, "learning_rate": 1e-3,
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        out = tmp_path / "run.json"
        result = runner.invoke(
            cli_main,
            ["--store", str(tmp_path / "store"), "train", "sp", "--config", str(cfg_path),
             "--seed", "3", "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        payload = json.loads(out.read_text())
        assert [c["step"] for c in payload["checkpoints"]] == [0, 200, 400]

    def test_replay_verb(self, tmp_path):
        from cookbench.env import get_layout, record_episode
        from cookbench.harness.store import ArtifactStore

        store = ArtifactStore(tmp_path / "store")
        rng = np.random.default_rng(0)
        log = record_episode(get_layout("cramped"), 3, 30, lambda s: tuple(rng.integers(0, 6, size=2)))
        art = store.put_text(log.to_jsonl())
        runner = CliRunner()
        result = runner.invoke(cli_main, ["--store", str(tmp_path / "store"), "replay", art])
        assert result.exit_code == 0, result.output
        assert "ok" in result.output

    def test_pipeline_verb(self, tmp_path):
        pipeline = {
            "store": str(tmp_path / "store"),
            "pipeline": [{"name": "demos", "kind": "demos", "layouts": ["cramped"], "per_layout": 1, "horizon": 30}],
        }
        p = tmp_path / "pipe.json"
        p.write_text(json.dumps(pipeline))
        runner = CliRunner()
        result = runner.invoke(cli_main, ["--store", str(tmp_path / "store"), "pipeline", "--config", str(p)])
        assert result.exit_code == 0, result.output
        assert "pipeline complete" in result.output
