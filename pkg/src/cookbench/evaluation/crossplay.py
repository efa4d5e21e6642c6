"""Cross-play: evaluate agents against held-out populations, cell by cell."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from cookbench.agents.actors import make_actor
from cookbench.agents.spec import AgentSpec
from cookbench.env.layout import get_layout
from cookbench.rollout import run_pair_episodes

from .heldout import HeldOutPopulation, check_disjoint

EVAL_HORIZON = 540
EPISODES_PER_CELL = 10


@dataclass
class EvalReport:
    agents: list[str]
    population_kind: str
    members: list[str]
    layouts: list[str]
    episodes_per_cell: int
    horizon: int
    seed: int
    stochastic: bool
    cells: list[dict] = field(default_factory=list)

    def cell_count(self) -> int:
        return len(self.cells)

    def agent_layout_means(self) -> dict:
        """agent id -> layout -> mean deliveries over its cells."""
        out: dict = {a: {} for a in self.agents}
        for a in self.agents:
            for lay in self.layouts:
                vals = [c["mean_deliveries"] for c in self.cells if c["agent"] == a and c["layout"] == lay]
                out[a][lay] = float(np.mean(vals))
        return out

    def aggregate(self) -> dict:
        """Mean and standard deviation over agent seeds, per layout and pooled."""
        per_agent = self.agent_layout_means()
        per_layout = {}
        for lay in self.layouts:
            vals = [per_agent[a][lay] for a in self.agents]
            per_layout[lay] = {"mean": float(np.mean(vals)), "sd": float(np.std(vals, ddof=0)), "n_seeds": len(vals)}
        pooled_vals = [float(np.mean([per_agent[a][lay] for lay in self.layouts])) for a in self.agents]
        return {
            "per_layout": per_layout,
            "pooled": {"mean": float(np.mean(pooled_vals)), "sd": float(np.std(pooled_vals, ddof=0)), "n_seeds": len(pooled_vals)},
        }

    def to_json_dict(self) -> dict:
        return {
            "agents": self.agents,
            "population_kind": self.population_kind,
            "members": self.members,
            "layouts": self.layouts,
            "episodes_per_cell": self.episodes_per_cell,
            "horizon": self.horizon,
            "seed": self.seed,
            "stochastic": self.stochastic,
            "cells": self.cells,
            "aggregate": self.aggregate(),
        }

    def write_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_json_dict(), f, indent=2, sort_keys=True)

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as f:
            w = csv.writer(f)
            w.writerow(["agent", "partner", "layout", "episodes", "mean_deliveries", "deliveries"])
            for c in self.cells:
                w.writerow(
                    [c["agent"], c["partner"], c["layout"], len(c["deliveries"]), f"{c['mean_deliveries']:.4f}",
                     " ".join(str(d) for d in c["deliveries"])]
                )


def cross_play(
    agents: list[AgentSpec],
    population: HeldOutPopulation,
    layouts: list[str],
    horizon: int = EVAL_HORIZON,
    episodes: int = EPISODES_PER_CELL,
    seed: int = 0,
    stochastic: bool = True,
    enforce_disjoint: bool = True,
) -> EvalReport:
    """Evaluate every (agent, member, layout) cell for ``episodes`` episodes.

    Seat assignment alternates across a cell's episodes; deliveries are
    counted from Delivered events. Deterministic given ``seed``.
    """
    if enforce_disjoint and population.kind != "HumanProxy":
        check_disjoint(population, agents)
    report = EvalReport(
        agents=[a.id for a in agents],
        population_kind=population.kind,
        members=[m.id for m in population.members],
        layouts=list(layouts),
        episodes_per_cell=episodes,
        horizon=horizon,
        seed=seed,
        stochastic=stochastic,
    )
    for ai, agent in enumerate(agents):
        for mi, member in enumerate(population.members):
            for li, layout_name in enumerate(layouts):
                layout = get_layout(layout_name)
                cell_seed = int(np.random.SeedSequence([seed, ai, mi, li]).generate_state(1)[0])
                stats = run_pair_episodes(
                    layout,
                    make_actor(agent, stochastic=stochastic),
                    make_actor(member, stochastic=stochastic),
                    episodes=episodes,
                    horizon=horizon,
                    seed=cell_seed,
                    seat_of_a="alternate",
                )
                deliveries = [s.deliveries for s in stats]
                report.cells.append(
                    {
                        "agent": agent.id,
                        "partner": member.id,
                        "layout": layout_name,
                        "deliveries": deliveries,
                        "mean_deliveries": float(np.mean(deliveries)),
                        "mean_return": float(np.mean([s.episode_return for s in stats])),
                    }
                )
    return report


def mean_ci95(values) -> tuple[float, float]:
    """Mean and normal-approximation 95% confidence half-width."""
    arr = np.asarray(values, dtype=np.float64)
    if len(arr) == 0:
        return float("nan"), float("nan")
    if len(arr) == 1:
        return float(arr[0]), float("inf")
    return float(arr.mean()), float(1.96 * arr.std(ddof=1) / math.sqrt(len(arr)))
