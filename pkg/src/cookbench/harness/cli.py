"""cookbench command line: train, eval, serve, sweep, replay, figures, pipeline."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import yaml

from cookbench.agents.policy import ArchVariant
from cookbench.agents.spec import AgentSpec
from cookbench.env.layout import SHIPPED_LAYOUTS
from cookbench.training.config import TrainConfig

from .store import STORE_ENV_VAR, ArtifactStore


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    text = Path(path).read_text(encoding="utf-8")
    if path.endswith(".json"):
        return json.loads(text)
    return yaml.safe_load(text) or {}


def _train_config(path: str | None, layouts: tuple[str, ...] | None) -> TrainConfig:
    d = _load_config_file(path)
    cfg = TrainConfig.from_dict(d) if d else TrainConfig()
    if layouts:
        cfg = cfg.replace(layouts=tuple(layouts))
    return cfg


def _echo_progress(label: str):
    def prog(step, records):
        last = records[0].curve[-1]
        click.echo(f"{label}: step {last['step']} return {last['mean_return']:.2f} deliveries {last['mean_deliveries']:.2f}")

    return prog


@click.group()
@click.option("--store", "store_path", default=None, help=f"Artifact store root (default ${STORE_ENV_VAR} or ./artifacts).")
@click.pass_context
def main(ctx, store_path):
    """Cooking-coordination workbench: training, evaluation, and live play."""
    ctx.obj = ArtifactStore(store_path)


@main.group()
def train():
    """Train agents (sp, pp, bcp, fcp)."""


@train.command("sp")
@click.option("--layout-set", "layouts", multiple=True, help="Layouts to train on (repeatable).")
@click.option("--config", "config_path", default=None, type=click.Path(exists=True))
@click.option("--seed", type=int, required=True)
@click.option("--width", type=click.Choice(["16", "64"]), default="64")
@click.option("--memory", type=click.Choice(["reactive", "framestack"]), default="reactive")
@click.option("--out", type=click.Path(), default=None, help="Also write the run record JSON here.")
@click.pass_obj
def train_sp_cmd(store, layouts, config_path, seed, width, memory, out):
    from .stages import ensure_sp_run

    cfg = _train_config(config_path, layouts)
    arch = ArchVariant(int(width), memory)
    record = ensure_sp_run(store, cfg, arch, seed, progress=_echo_progress("sp"))
    click.echo(f"run {record.run_id}: final self-play deliveries {record.final_checkpoint.selfplay_deliveries:.2f}")
    if out:
        Path(out).write_text(json.dumps(record.to_dict()), encoding="utf-8")


@train.command("pp")
@click.option("--layout-set", "layouts", multiple=True)
@click.option("--config", "config_path", default=None, type=click.Path(exists=True))
@click.option("--seed", type=int, required=True)
@click.option("--out", type=click.Path(), default=None)
@click.pass_obj
def train_pp_cmd(store, layouts, config_path, seed, out):
    from .stages import ensure_pp_runs

    cfg = _train_config(config_path, layouts)
    records = ensure_pp_runs(store, cfg, seed, progress=_echo_progress("pp"))
    for rec in records:
        click.echo(f"run {rec.run_id}: final self-play deliveries {rec.final_checkpoint.selfplay_deliveries:.2f}")
    if out:
        Path(out).write_text(json.dumps([r.to_dict() for r in records]), encoding="utf-8")


@train.command("bcp")
@click.option("--layout-set", "layouts", multiple=True)
@click.option("--config", "config_path", default=None, type=click.Path(exists=True))
@click.option("--seed", type=int, required=True)
@click.option("--demos-per-layout", type=int, default=5)
@click.option("--demo-horizon", type=int, default=1200)
@click.option("--out", type=click.Path(), default=None)
@click.pass_obj
def train_bcp_cmd(store, layouts, config_path, seed, demos_per_layout, demo_horizon, out):
    """Generate demonstrations, fit the partner-split BC model, then train BCP."""
    from .stages import ensure_bc_agent, ensure_bcp_agent, ensure_demo_logs

    cfg = _train_config(config_path, layouts)
    logs = ensure_demo_logs(store, list(cfg.layouts), demos_per_layout, demo_horizon, seed=seed)
    bc_partner = ensure_bc_agent(store, logs, "partner")
    agent = ensure_bcp_agent(store, bc_partner, cfg, seed)
    click.echo(f"bcp agent {agent.id}")
    if out:
        Path(out).write_text(json.dumps(agent.to_dict()), encoding="utf-8")


@train.command("fcp")
@click.option("--layout-set", "layouts", multiple=True)
@click.option("--config", "config_path", default=None, type=click.Path(exists=True))
@click.option("--seed", type=int, required=True, help="Stage-2 learner seed.")
@click.option("--stage1-seeds", default=None, help="Comma-separated stage-1 seeds (default seed*100+1..N).")
@click.option("--variant", type=click.Choice(["FCP", "FCP-T", "FCP+A", "FCP-T+A"]), default="FCP")
@click.option("--out", type=click.Path(), default=None)
@click.pass_obj
def train_fcp_cmd(store, layouts, config_path, seed, stage1_seeds, variant, out):
    """Run the full two-stage pipeline for one FCP variant."""
    from cookbench.training.pool import stage1_arch_plan

    from .stages import ensure_br_agent, ensure_fcp_pool, ensure_sp_run

    cfg = _train_config(config_path, layouts)
    N = cfg.population_size
    seeds = [int(s) for s in stage1_seeds.split(",")] if stage1_seeds else [seed * 100 + i + 1 for i in range(N)]
    if len(seeds) != N:
        raise click.UsageError(f"need {N} stage-1 seeds, got {len(seeds)}")
    archs = stage1_arch_plan(variant, N)
    runs = []
    for i, s in enumerate(seeds):
        click.echo(f"stage 1: partner {i + 1}/{N} (seed {s})")
        runs.append(ensure_sp_run(store, cfg, archs[i], s, progress=_echo_progress(f"sp{s}")))
    pool = ensure_fcp_pool(store, runs, variant)
    click.echo(f"pool: {len(pool)} frozen entries from {len(runs)} runs")
    agent = ensure_br_agent(store, pool, cfg, seed, method=variant, progress=_echo_progress(variant))
    click.echo(f"{variant} agent {agent.id}")
    if out:
        Path(out).write_text(json.dumps(agent.to_dict()), encoding="utf-8")


@main.group("eval")
def eval_group():
    """Evaluate agents (crossplay, ablation, behavior, prefs)."""


def _load_agents(paths) -> list[AgentSpec]:
    agents = []
    for p in paths:
        d = json.loads(Path(p).read_text(encoding="utf-8"))
        if isinstance(d, list):
            agents.extend(AgentSpec.from_dict(x) for x in d)
        else:
            agents.append(AgentSpec.from_dict(d))
    return agents


@eval_group.command("crossplay")
@click.option("--agents", "agent_paths", multiple=True, required=True, type=click.Path(exists=True))
@click.option("--population", type=click.Choice(["RandomInit", "ScriptedProxy"]), default="RandomInit")
@click.option("--population-seeds", default="7001,7002,7003,7004,7005")
@click.option("--proxy-epsilon", type=float, default=0.5)
@click.option("--layouts", multiple=True, default=("cramped",))
@click.option("--horizon", type=int, default=540)
@click.option("--episodes", type=int, default=10)
@click.option("--seed", type=int, default=0)
@click.option("--out", type=click.Path(), required=True)
@click.pass_obj
def eval_crossplay_cmd(store, agent_paths, population, population_seeds, proxy_epsilon, layouts, horizon, episodes, seed, out):
    from cookbench.evaluation.crossplay import cross_play
    from cookbench.evaluation.heldout import build_heldout

    agents = _load_agents(agent_paths)
    if population == "RandomInit":
        pop = build_heldout("RandomInit", seeds=[int(s) for s in population_seeds.split(",")], evaluated=agents)
    else:
        proxy = AgentSpec(id=f"scripted-sloppy-{proxy_epsilon}", method="Scripted",
                          script={"style": "sloppy", "epsilon": proxy_epsilon, "seed": 0})
        pop = build_heldout("HumanProxy", proxy=proxy)
    report = cross_play(agents, pop, list(layouts), horizon=horizon, episodes=episodes, seed=seed)
    report.write_json(out)
    report.write_csv(str(out) + ".csv")
    agg = report.aggregate()["pooled"]
    click.echo(f"pooled deliveries {agg['mean']:.2f} ± {agg['sd']:.2f} over {agg['n_seeds']} agents -> {out}")


@eval_group.command("behavior")
@click.option("--logs", "log_paths", multiple=True, required=True, type=click.Path(exists=True))
@click.option("--method", default="unknown")
@click.option("--out", type=click.Path(), required=True)
def eval_behavior_cmd(log_paths, method, out):
    from cookbench.env.episode import EpisodeLog
    from cookbench.evaluation.behavior import aggregate_behavior, behavior_stats, write_behavior_csv

    stats = [behavior_stats(EpisodeLog.from_jsonl(Path(p).read_text(encoding="utf-8"))) for p in log_paths]
    rows = aggregate_behavior({method: stats})
    write_behavior_csv(rows, out)
    click.echo(f"{len(stats)} logs -> {out}")


@eval_group.command("prefs")
@click.option("--export", "export_paths", multiple=True, required=True, type=click.Path(exists=True),
              help="Session export JSON files (from the play service).")
@click.option("--out", type=click.Path(), required=True)
def eval_prefs_cmd(export_paths, out):
    from cookbench.evaluation.preferences import preference_aggregate

    records, method_of = [], {}
    for p in export_paths:
        payload = json.loads(Path(p).read_text(encoding="utf-8"))
        records.extend(payload["preferences"])
        method_of.update(payload["method_of"])
    matrix = preference_aggregate(records, method_of)
    Path(out).write_text(json.dumps(matrix.to_json_dict(), indent=2), encoding="utf-8")
    click.echo(f"{len(records)} records -> {out}")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.pass_obj
def pipeline(store, config_path):
    """Run a multi-stage pipeline file; completed stages are skipped."""
    from .pipeline import load_pipeline_file, run_pipeline

    cfg = load_pipeline_file(config_path)
    results = run_pipeline(cfg, store=store, progress=click.echo)
    click.echo(f"pipeline complete: {', '.join(results)}")


@main.command()
@click.option("--sizes", default="2,4,8")
@click.option("--seeds", default="1,2,3")
@click.option("--layout-set", "layouts", multiple=True)
@click.option("--config", "config_path", default=None, type=click.Path(exists=True))
@click.option("--out", type=click.Path(), required=True)
@click.pass_obj
def sweep(store, sizes, seeds, layouts, config_path, out):
    """Population-size sweep: full FCP pipeline per size, evaluated vs the proxy."""
    from cookbench.training.sweep import population_size_sweep

    cfg = _train_config(config_path, layouts)
    table = population_size_sweep(
        [int(s) for s in sizes.split(",")],
        cfg,
        seeds=[int(s) for s in seeds.split(",")],
        store=store,
    )
    Path(out).write_text(json.dumps(table, indent=2), encoding="utf-8")
    click.echo(table["text"])


@main.command()
@click.argument("log_ids", nargs=-1, required=True)
@click.pass_obj
def replay(store, log_ids):
    """Verify stored episode logs replay bit-exactly."""
    from .pipeline import replay_verdicts

    verdicts = replay_verdicts(store, list(log_ids))
    failures = [v for v in verdicts if not v["ok"]]
    for v in verdicts:
        status = "ok" if v["ok"] else f"DIVERGED at step {v['first_divergence']} ({v['field']})"
        click.echo(f"{v['log']}: {status}")
    sys.exit(1 if failures else 0)


@main.command()
@click.option("--report", "report_paths", multiple=True, type=click.Path(exists=True),
              help="Cross-play report JSON files, labeled name=path.")
@click.option("--out", type=click.Path(), required=True)
def figures(report_paths, out):
    """Render charts + CSVs from evaluation reports."""
    from cookbench.evaluation.crossplay import EvalReport

    from .figures import export_crossplay_bars

    if not report_paths:
        click.echo("no reports given; nothing to do")
        return
    reports = {}
    for item in report_paths:
        if "=" in item:
            name, path = item.split("=", 1)
        else:
            name, path = Path(item).stem, item
        d = json.loads(Path(path).read_text(encoding="utf-8"))
        report = EvalReport(
            agents=d["agents"], population_kind=d["population_kind"], members=d["members"],
            layouts=d["layouts"], episodes_per_cell=d["episodes_per_cell"], horizon=d["horizon"],
            seed=d["seed"], stochastic=d["stochastic"], cells=d["cells"],
        )
        reports[name] = report
    result = export_crossplay_bars(reports, out)
    click.echo(f"wrote {result['png']} and {result['csv']}")


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8765)
@click.option("--cohort", "cohort_path", required=True, type=click.Path(exists=True),
              help="JSON list of agent specs forming the study cohort.")
@click.option("--layouts", multiple=True, default=SHIPPED_LAYOUTS)
@click.option("--horizon", type=int, default=300)
@click.option("--tick-period", type=float, default=0.2)
@click.option("--seed", type=int, default=0)
@click.option("--static-dir", type=click.Path(exists=True), default=None,
              help="Serve a browser client from this directory at /.")
@click.pass_obj
def serve(store, host, port, cohort_path, layouts, horizon, tick_period, seed, static_dir):
    """Run the live human-play service."""
    import uvicorn

    from cookbench.serve.server import PlayService, build_app
    from cookbench.serve.session import SessionConfig

    cohort = _load_agents([cohort_path])
    config = SessionConfig(cohort=cohort, layouts=tuple(layouts), horizon=horizon, tick_period=tick_period)
    service = PlayService(config, store=store, master_seed=seed)
    app = build_app(service)
    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="client")
    click.echo(f"play service on ws://{host}:{port}/sessions/<id>/ws")
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
