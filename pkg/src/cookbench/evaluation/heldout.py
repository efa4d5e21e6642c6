"""Held-out partner populations for cross-play evaluation."""

from __future__ import annotations

from dataclasses import dataclass, field

from cookbench.agents.policy import ARCH_VARIANTS, ArchVariant, init_policy
from cookbench.agents.spec import AgentSpec
from cookbench.training.config import RunRecord
from cookbench.training.pool import filter_checkpoints

KINDS = ("HumanProxy", "DiverseSP", "RandomInit")


class HeldOutOverlap(ValueError):
    """An evaluated agent's provenance intersects the held-out population."""


@dataclass
class HeldOutPopulation:
    kind: str
    members: list[AgentSpec] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.members)

    def member_seeds(self) -> set[int]:
        seeds = set()
        for m in self.members:
            if m.params is not None:
                seeds.add(int(m.params.seed))
            if "seed" in m.provenance:
                seeds.add(int(m.provenance["seed"]))
        return seeds


def agent_provenance_seeds(spec: AgentSpec) -> set[int]:
    """Seeds that participated in producing this agent (its own init seed plus
    any stage-1 partner seeds)."""
    seeds = set()
    if spec.params is not None:
        seeds.add(int(spec.params.seed))
    for key in ("seed", "init_seed", "stage1_seeds"):
        v = spec.provenance.get(key)
        if v is None:
            continue
        if isinstance(v, (list, tuple)):
            seeds.update(int(x) for x in v)
        else:
            seeds.add(int(v))
    return seeds


def check_disjoint(population: HeldOutPopulation, agents: list[AgentSpec]) -> None:
    member_seeds = population.member_seeds()
    for spec in agents:
        overlap = member_seeds & agent_provenance_seeds(spec)
        if overlap:
            raise HeldOutOverlap(
                f"agent {spec.id} shares seeds {sorted(overlap)} with the held-out population; "
                "the held-out contract requires disjoint provenance"
            )


def build_heldout(
    kind: str,
    *,
    runs: list[RunRecord] | None = None,
    seeds: list[int] | None = None,
    arch: ArchVariant | None = None,
    proxy: AgentSpec | None = None,
    evaluated: list[AgentSpec] | None = None,
) -> HeldOutPopulation:
    """Assemble a held-out population.

    DiverseSP filters every source run to its {init, mid, final} checkpoints
    (seeds x architectures x 3 skill stages). RandomInit takes freshly
    initialized policies for the given seeds. HumanProxy wraps the provided
    proxy-split BC agent (or any stand-in partner spec).
    """
    if kind not in KINDS:
        raise ValueError(f"unknown held-out kind {kind!r}")

    members: list[AgentSpec] = []
    if kind == "DiverseSP":
        if not runs:
            raise ValueError("DiverseSP needs source self-play runs")
        for run in runs:
            for stage, cp in filter_checkpoints(run).items():
                members.append(
                    AgentSpec(
                        id=f"heldout-{run.run_id}-{stage}",
                        method="Random" if cp.step == 0 else "SP",
                        params=cp.params.clone(),
                        provenance={"run_id": run.run_id, "stage": stage, "seed": run.seed, "checkpoint_step": cp.step},
                    )
                )
    elif kind == "RandomInit":
        if not seeds:
            raise ValueError("RandomInit needs seeds")
        arch = arch or ArchVariant(64, "reactive")
        for s in seeds:
            members.append(
                AgentSpec(
                    id=f"random-{s}",
                    method="Random",
                    params=init_policy(arch, s),
                    provenance={"seed": s},
                )
            )
    else:  # HumanProxy
        if proxy is None:
            raise ValueError("HumanProxy needs the proxy agent")
        if proxy.method == "BC" and proxy.provenance.get("split") == "partner":
            raise ValueError("the evaluation proxy must come from the 'proxy' split, not the BCP training partner")
        members.append(proxy)

    population = HeldOutPopulation(kind=kind, members=members)
    if evaluated:
        check_disjoint(population, evaluated)
    return population


def diverse_sp_arch_plan(n_seeds: int) -> list[ArchVariant]:
    """One run per (seed, arch variant): the held-out recipe's 4x variation."""
    return [arch for arch in ARCH_VARIANTS for _ in range(n_seeds)]
