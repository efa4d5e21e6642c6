"""Memoized heavy-work helpers: each ensure_* trains or computes once per
(store, inputs) and replays from the store afterwards."""

from __future__ import annotations

import time

import numpy as np

from cookbench.agents.bc import BCHyper, bc_fit
from cookbench.agents.policy import ArchVariant
from cookbench.agents.scripted import scripted_demonstrator
from cookbench.agents.spec import AgentSpec
from cookbench.env.episode import EpisodeLog, record_episode
from cookbench.env.layout import get_layout
from cookbench.training.best_response import train_bcp, train_best_response
from cookbench.training.config import RunRecord, TrainConfig
from cookbench.training.engine import train_population_play, train_self_play
from cookbench.training.pool import CheckpointPool, PoolEntry, build_fcp_pool

from .store import ArtifactStore


def ensure_sp_run(store: ArtifactStore, config: TrainConfig, arch: ArchVariant, seed: int, progress=None) -> RunRecord:
    key = store.stage_key({"kind": "train_sp", "config": config.to_dict(), "arch": arch.to_dict(), "seed": seed})
    memo = store.memo_get(key)
    if memo is not None:
        return RunRecord.from_dict(store.get_json(memo["outputs"]["run"]))
    t0 = time.perf_counter()
    record = train_self_play(config, arch, seed, progress=progress)
    elapsed = time.perf_counter() - t0
    store.memo_put(
        key,
        {
            "run": store.put_json(record.to_dict()),
            "timing": store.put_json({"train_seconds": elapsed, "run_id": record.run_id}),
        },
    )
    return record


def sp_run_train_seconds(store: ArtifactStore, config: TrainConfig, arch: ArchVariant, seed: int) -> float | None:
    """Wall-clock seconds the (possibly cached) run took to train."""
    key = store.stage_key({"kind": "train_sp", "config": config.to_dict(), "arch": arch.to_dict(), "seed": seed})
    memo = store.memo_get(key)
    if memo is None or "timing" not in memo["outputs"]:
        return None
    return float(store.get_json(memo["outputs"]["timing"])["train_seconds"])


def ensure_pp_runs(store: ArtifactStore, config: TrainConfig, seed: int, arch: ArchVariant | None = None, progress=None) -> list[RunRecord]:
    arch = arch or ArchVariant(64, "reactive")
    key = store.stage_key({"kind": "train_pp", "config": config.to_dict(), "arch": arch.to_dict(), "seed": seed})
    memo = store.memo_get(key)
    if memo is not None:
        return [RunRecord.from_dict(store.get_json(a)) for a in memo["outputs"]["runs"].split()]
    records = train_population_play(config, seed, arch=arch, progress=progress)
    ids = [store.put_json(r.to_dict()) for r in records]
    store.memo_put(key, {"runs": " ".join(ids)})
    return records


def pool_to_dict(pool: CheckpointPool) -> dict:
    return {
        "format": 1,
        "variant": pool.variant,
        "source_runs": pool.source_runs,
        "entries": [
            {"agent": e.agent.to_dict(), "selfplay_reward": e.selfplay_reward, "stage": e.stage}
            for e in pool.entries
        ],
    }


def pool_from_dict(d: dict) -> CheckpointPool:
    entries = [
        PoolEntry(agent=AgentSpec.from_dict(e["agent"]), selfplay_reward=e["selfplay_reward"], stage=e["stage"])
        for e in d["entries"]
    ]
    return CheckpointPool(entries=entries, source_runs=d["source_runs"], variant=d["variant"])


def ensure_fcp_pool(store: ArtifactStore, runs: list[RunRecord], variant: str) -> CheckpointPool:
    key = store.stage_key({"kind": "fcp_pool", "runs": sorted(r.run_id for r in runs), "variant": variant})
    memo = store.memo_get(key)
    if memo is not None:
        return pool_from_dict(store.get_json(memo["outputs"]["pool"]))
    pool = build_fcp_pool(runs, variant)
    store.memo_put(key, {"pool": store.put_json(pool_to_dict(pool))})
    return pool


def ensure_br_agent(
    store: ArtifactStore,
    pool: CheckpointPool,
    config: TrainConfig,
    seed: int,
    arch: ArchVariant | None = None,
    method: str = "FCP",
    init_from=None,
    progress=None,
) -> AgentSpec:
    arch = arch or (init_from.arch if init_from is not None else ArchVariant(64, "reactive"))
    descriptor = {
        "kind": "train_br",
        "pool_hashes": sorted(h for h in _pool_hashes(pool)),
        "config": config.to_dict(),
        "seed": seed,
        "arch": arch.to_dict(),
        "method": method,
    }
    if init_from is not None:
        import hashlib

        descriptor["init"] = hashlib.sha256(init_from.weights.tobytes()).hexdigest()
    key = store.stage_key(descriptor)
    memo = store.memo_get(key)
    if memo is not None:
        return AgentSpec.from_dict(store.get_json(memo["outputs"]["agent"]))
    agent = train_best_response(pool, config, seed, arch=arch, method=method, init_from=init_from, progress=progress)
    store.memo_put(key, {"agent": store.put_json(agent.to_dict())})
    return agent


def _pool_hashes(pool: CheckpointPool) -> list[str]:
    return pool.weights_hashes()


def ensure_demo_logs(
    store: ArtifactStore,
    layouts: list[str],
    per_layout: int,
    horizon: int,
    style: str = "efficient",
    epsilon: float = 0.0,
    seed: int = 0,
) -> list[EpisodeLog]:
    key = store.stage_key(
        {
            "kind": "demos",
            "layouts": list(layouts),
            "per_layout": per_layout,
            "horizon": horizon,
            "style": style,
            "epsilon": epsilon,
            "seed": seed,
        }
    )
    memo = store.memo_get(key)
    if memo is not None:
        return [EpisodeLog.from_jsonl(store.get_text(a)) for a in memo["outputs"]["logs"].split()]
    logs = []
    rng = np.random.default_rng(seed)
    for name in layouts:
        layout = get_layout(name)
        for k in range(per_layout):
            script_seed = int(rng.integers(1 << 31))
            policy = scripted_demonstrator(layout, style, epsilon=epsilon, seed=script_seed)
            policy.begin_episode()
            log = record_episode(
                layout,
                int(rng.integers(1 << 31)),
                horizon,
                lambda s: (policy.action(s, 0), policy.action(s, 1)),
                agent_ids=[f"script-{style}-{script_seed}-p0", f"script-{style}-{script_seed}-p1"],
            )
            logs.append(log)
    ids = [store.put_text(log.to_jsonl()) for log in logs]
    store.memo_put(key, {"logs": " ".join(ids)})
    return logs


def ensure_bc_agent(store: ArtifactStore, logs: list[EpisodeLog], split: str, hyper: BCHyper | None = None) -> AgentSpec:
    hyper = hyper or BCHyper()
    key = store.stage_key(
        {
            "kind": "bc_fit",
            "logs": [store.stage_key({"jsonl": log.to_jsonl()}) for log in logs],
            "split": split,
            "hyper": {
                "batch_size": hyper.batch_size,
                "learning_rate": hyper.learning_rate,
                "epochs": hyper.epochs,
                "eval_episodes": hyper.eval_episodes,
                "eval_horizon": hyper.eval_horizon,
                "arch": hyper.arch.to_dict(),
                "seed": hyper.seed,
            },
        }
    )
    memo = store.memo_get(key)
    if memo is not None:
        return AgentSpec.from_dict(store.get_json(memo["outputs"]["agent"]))
    agent = bc_fit(logs, split, hyper)
    store.memo_put(key, {"agent": store.put_json(agent.to_dict())})
    return agent


def ensure_bcp_agent(store: ArtifactStore, bc_partner: AgentSpec, config: TrainConfig, seed: int, arch: ArchVariant | None = None) -> AgentSpec:
    key = store.stage_key(
        {
            "kind": "train_bcp",
            "partner": bc_partner.to_dict(),
            "config": config.to_dict(),
            "seed": seed,
            "arch": (arch or ArchVariant(64, "reactive")).to_dict(),
        }
    )
    memo = store.memo_get(key)
    if memo is not None:
        return AgentSpec.from_dict(store.get_json(memo["outputs"]["agent"]))
    agent = train_bcp(bc_partner, config, seed, arch=arch)
    store.memo_put(key, {"agent": store.put_json(agent.to_dict())})
    return agent
