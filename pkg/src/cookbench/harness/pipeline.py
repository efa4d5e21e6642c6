"""Declarative experiment pipelines over the artifact store.

A pipeline file (YAML or JSON) names stages with explicit dependencies; each
stage's work is memoized by a deterministic key over its parameters and input
artifacts, so re-running a completed pipeline does no training, and deleting
one stage's outputs re-runs only that stage.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import yaml

from cookbench.agents.bc import BCHyper
from cookbench.agents.policy import ArchVariant
from cookbench.agents.spec import AgentSpec
from cookbench.env.episode import EpisodeLog
from cookbench.evaluation.crossplay import cross_play
from cookbench.evaluation.heldout import build_heldout
from cookbench.training.config import RunRecord, TrainConfig
from cookbench.training.pool import stage1_arch_plan

from . import stages as S
from .store import ArtifactStore


class PipelineError(ValueError):
    pass


def load_pipeline_file(path) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    if str(path).endswith(".json"):
        return json.loads(text)
    return yaml.safe_load(text)


def _toposort(stage_list: list[dict]) -> list[dict]:
    by_name = {}
    for st in stage_list:
        if "name" not in st or "kind" not in st:
            raise PipelineError("every stage needs a name and a kind")
        if st["name"] in by_name:
            raise PipelineError(f"duplicate stage name {st['name']!r}")
        by_name[st["name"]] = st
    order: list[dict] = []
    state: dict[str, int] = {}

    def visit(name: str, chain: tuple):
        if name in chain:
            raise PipelineError(f"cycle in stage graph: {' -> '.join(chain + (name,))}")
        if state.get(name) == 2:
            return
        if name not in by_name:
            raise PipelineError(f"stage {name!r} is referenced but not defined")
        state[name] = 1
        for dep in by_name[name].get("needs", []):
            visit(dep, chain + (name,))
        state[name] = 2
        order.append(by_name[name])

    for st in stage_list:
        visit(st["name"], ())
    return order


def _train_config(d: dict | None) -> TrainConfig:
    return TrainConfig.from_dict(d or {})


def _arch(d: dict | None) -> ArchVariant:
    return ArchVariant.from_dict(d) if d else ArchVariant(64, "reactive")


def run_pipeline(config: dict, store: ArtifactStore | None = None, progress=None) -> dict:
    """Execute a pipeline description; returns {stage name: outputs}.

    Outputs are python objects (RunRecords, AgentSpecs, reports) plus the
    artifact ids backing them.
    """
    store = store or ArtifactStore(config.get("store"))
    results: dict[str, dict] = {}
    say = progress or (lambda msg: None)

    for st in _toposort(config.get("pipeline", [])):
        name, kind = st["name"], st["kind"]
        say(f"stage {name} ({kind})")
        if kind == "train_sp_pool":
            cfg = _train_config(st.get("config"))
            variant = st.get("variant", "FCP")
            seeds = st["seeds"]
            archs = stage1_arch_plan(variant, len(seeds), _arch(st.get("arch")))
            runs = [S.ensure_sp_run(store, cfg, archs[i], int(seeds[i])) for i in range(len(seeds))]
            results[name] = {"runs": runs}
        elif kind == "train_pp":
            cfg = _train_config(st.get("config"))
            runs = S.ensure_pp_runs(store, cfg, int(st["seed"]), arch=_arch(st.get("arch")))
            results[name] = {"runs": runs}
        elif kind == "build_pool":
            runs = results[st["needs"][0]]["runs"]
            pool = S.ensure_fcp_pool(store, runs, st.get("variant", "FCP"))
            results[name] = {"pool": pool}
        elif kind == "train_br":
            pool = results[st["needs"][0]]["pool"]
            cfg = _train_config(st.get("config"))
            agent = S.ensure_br_agent(
                store, pool, cfg, int(st["seed"]), arch=_arch(st.get("arch")), method=st.get("method", "FCP")
            )
            results[name] = {"agent": agent}
        elif kind == "demos":
            logs = S.ensure_demo_logs(
                store,
                layouts=st.get("layouts", ["cramped"]),
                per_layout=int(st.get("per_layout", 5)),
                horizon=int(st.get("horizon", 1200)),
                style=st.get("style", "efficient"),
                epsilon=float(st.get("epsilon", 0.0)),
                seed=int(st.get("seed", 0)),
            )
            results[name] = {"logs": logs}
        elif kind == "bc_fit":
            logs = results[st["needs"][0]]["logs"]
            hyper_d = st.get("hyper", {})
            hyper = BCHyper(**{**hyper_d, "arch": _arch(hyper_d.get("arch"))}) if hyper_d else BCHyper()
            agent = S.ensure_bc_agent(store, logs, st["split"], hyper)
            results[name] = {"agent": agent}
        elif kind == "train_bcp":
            partner = results[st["needs"][0]]["agent"]
            cfg = _train_config(st.get("config"))
            agent = S.ensure_bcp_agent(store, partner, cfg, int(st["seed"]), arch=_arch(st.get("arch")))
            results[name] = {"agent": agent}
        elif kind == "heldout":
            kwargs: dict = {"kind": st["heldout_kind"]}
            for dep in st.get("needs", []):
                dep_out = results[dep]
                if "runs" in dep_out:
                    kwargs["runs"] = dep_out["runs"]
                elif "agent" in dep_out:
                    kwargs["proxy"] = dep_out["agent"]
            if "seeds" in st:
                kwargs["seeds"] = [int(s) for s in st["seeds"]]
            if "arch" in st:
                kwargs["arch"] = _arch(st["arch"])
            results[name] = {"population": build_heldout(**kwargs)}
        elif kind == "crossplay":
            agents: list[AgentSpec] = []
            population = None
            for dep in st.get("needs", []):
                dep_out = results[dep]
                if "agent" in dep_out:
                    agents.append(dep_out["agent"])
                elif "agents" in dep_out:
                    agents.extend(dep_out["agents"])
                elif "population" in dep_out:
                    population = dep_out["population"]
                elif "runs" in dep_out:
                    agents.extend(_finals_as_agents(dep_out["runs"]))
            if population is None:
                raise PipelineError(f"crossplay stage {name} needs a held-out population dependency")
            report = cross_play(
                agents,
                population,
                layouts=st.get("layouts", ["cramped"]),
                horizon=int(st.get("horizon", 540)),
                episodes=int(st.get("episodes", 10)),
                seed=int(st.get("seed", 0)),
                stochastic=bool(st.get("stochastic", True)),
                enforce_disjoint=bool(st.get("enforce_disjoint", True)),
            )
            art = store.put_json(report.to_json_dict())
            results[name] = {"report": report, "artifact": art}
        else:
            raise PipelineError(f"unknown stage kind {kind!r}")
    return results


def _finals_as_agents(runs: list[RunRecord]) -> list[AgentSpec]:
    out = []
    for run in runs:
        cp = run.final_checkpoint
        out.append(
            AgentSpec(
                id=f"{run.run_id}-final",
                method=run.method,
                params=cp.params.clone(),
                provenance={"run_id": run.run_id, "checkpoint_step": cp.step, "seed": run.seed},
            )
        )
    return out


def replay_verdicts(store: ArtifactStore, log_ids: list[str]) -> list[dict]:
    """Re-simulate stored episode logs and compare rewards/events exactly."""
    from cookbench.env.episode import verify_replay

    out = []
    for log_id in log_ids:
        log = EpisodeLog.from_jsonl(store.get_text(log_id))
        verdict = verify_replay(log)
        verdict["log"] = log_id
        out.append(verdict)
    return out
