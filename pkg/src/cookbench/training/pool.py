"""Checkpoint filtering and frozen partner pools for best-response training."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from cookbench.agents.policy import ArchVariant
from cookbench.agents.spec import AgentSpec

from .config import CheckpointInfo, RunRecord

FCP_VARIANTS = ("FCP", "FCP-T", "FCP+A", "FCP-T+A")
STAGES = ("init", "mid", "final")


def filter_checkpoints(run: RunRecord) -> dict[str, CheckpointInfo]:
    """Three partner checkpoints per run: the first, the last, and the one
    whose measured reward is closest to half the final reward (earliest
    checkpoint index wins ties). Insensitive to storage order."""
    cps = sorted(run.checkpoints, key=lambda c: c.step)
    if len(cps) < 3:
        raise ValueError(f"run {run.run_id} has {len(cps)} checkpoints; need at least 3")
    final = cps[-1]
    target = 0.5 * final.selfplay_reward
    mid = min(cps, key=lambda c: (abs(c.selfplay_reward - target), c.step))
    return {"init": cps[0], "mid": mid, "final": final}


@dataclass
class PoolEntry:
    agent: AgentSpec
    selfplay_reward: float
    stage: str

    @property
    def weights_hash(self) -> str:
        return hashlib.sha256(self.agent.params.weights.tobytes()).hexdigest()


@dataclass
class CheckpointPool:
    entries: list[PoolEntry]
    source_runs: list[str] = field(default_factory=list)
    variant: str = "FCP"

    def __len__(self) -> int:
        return len(self.entries)

    def weights_hashes(self) -> list[str]:
        return [e.weights_hash for e in self.entries]

    def arch_counts(self) -> dict:
        counts: dict = {}
        for e in self.entries:
            key = (e.agent.params.arch.hidden_width, e.agent.params.arch.memory)
            counts[key] = counts.get(key, 0) + 1
        return counts


def stage1_arch_plan(variant: str, population_size: int, base_arch: ArchVariant | None = None) -> list[ArchVariant]:
    """Architectures for the N stage-1 self-play partners. The +A variants
    split the population evenly over the four architecture combinations,
    keeping the total partner count unchanged."""
    from cookbench.agents.policy import ARCH_VARIANTS

    if variant not in FCP_VARIANTS:
        raise ValueError(f"unknown FCP variant {variant!r}")
    if "+A" in variant:
        if population_size % 4 != 0:
            raise ValueError(f"population_size must be divisible by 4 for {variant}, got {population_size}")
        per = population_size // 4
        plan: list[ArchVariant] = []
        for arch in ARCH_VARIANTS:
            plan.extend([arch] * per)
        return plan
    return [base_arch or ArchVariant(64, "reactive")] * population_size


def build_fcp_pool(runs: list[RunRecord], variant: str = "FCP") -> CheckpointPool:
    """Freeze stage-1 checkpoints into a partner pool.

    FCP keeps {init, mid, final} per run; the -T variants keep only the final
    (converged) checkpoint. The +A variants only differ in how stage 1 was
    trained, which is reflected in the runs' architectures.
    """
    if variant not in FCP_VARIANTS:
        raise ValueError(f"unknown FCP variant {variant!r}")
    if "+A" in variant:
        if len(runs) % 4 != 0:
            raise ValueError(f"{variant} needs a run count divisible by 4, got {len(runs)}")
        counts: dict = {}
        for run in runs:
            key = (run.arch.hidden_width, run.arch.memory)
            counts[key] = counts.get(key, 0) + 1
        if len(counts) != 4 or len(set(counts.values())) != 1:
            raise ValueError(f"{variant} needs the four architectures in equal shares, got {counts}")

    stages = ("final",) if "-T" in variant else STAGES
    entries: list[PoolEntry] = []
    for run in runs:
        picked = filter_checkpoints(run)
        for stage in stages:
            cp = picked[stage]
            params = cp.params.clone()
            spec = AgentSpec(
                id=f"{run.run_id}-cp{cp.step}",
                method="Random" if cp.step == 0 else "SP",
                params=params,
                provenance={"run_id": run.run_id, "checkpoint_step": cp.step, "stage": stage, "seed": run.seed},
            )
            entries.append(PoolEntry(agent=spec, selfplay_reward=cp.selfplay_reward, stage=stage))
    return CheckpointPool(entries=entries, source_runs=[r.run_id for r in runs], variant=variant)
