"""EpisodeLog: the replayable trajectory record and its JSONL wire format.

One JSON object per line: a header ``{layout, seed, agent_ids, horizon}``
followed by per-step ``{actions, rewards, events}`` objects.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .core import WorldState, apply_step, reset
from .layout import Layout, get_layout


@dataclass
class EpisodeLog:
    layout: str
    seed: int
    agent_ids: list[str]
    horizon: int
    steps: list[dict] = field(default_factory=list)

    def append(self, actions, outcome) -> None:
        self.steps.append(
            {
                "actions": [int(actions[0]), int(actions[1])],
                "rewards": [int(outcome.rewards[0]), int(outcome.rewards[1])],
                "events": outcome.events,
            }
        )

    @property
    def deliveries(self) -> int:
        return sum(1 for s in self.steps for e in s["events"] if e["type"] == "delivered")

    @property
    def deposits(self) -> int:
        return sum(1 for s in self.steps for e in s["events"] if e["type"] == "tomato_deposited")

    @property
    def episode_return(self) -> int:
        return sum(s["rewards"][0] for s in self.steps)

    def to_jsonl(self) -> str:
        header = {"layout": self.layout, "seed": self.seed, "agent_ids": self.agent_ids, "horizon": self.horizon}
        lines = [json.dumps(header, sort_keys=True)]
        lines.extend(json.dumps(s, sort_keys=True) for s in self.steps)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "EpisodeLog":
        lines = [line for line in text.splitlines() if line.strip()]
        if not lines:
            raise ValueError("empty episode log")
        header = json.loads(lines[0])
        steps = [json.loads(line) for line in lines[1:]]
        return cls(
            layout=header["layout"],
            seed=header["seed"],
            agent_ids=list(header["agent_ids"]),
            horizon=header["horizon"],
            steps=steps,
        )


def record_episode(layout: Layout, seed: int, horizon: int, joint_policy, agent_ids=("p0", "p1")) -> EpisodeLog:
    """Run one full episode, calling ``joint_policy(state) -> (a0, a1)`` each step."""
    state = reset(layout, seed, horizon)
    log = EpisodeLog(layout=layout.name, seed=seed, agent_ids=list(agent_ids), horizon=horizon)
    for _ in range(horizon):
        actions = joint_policy(state)
        outcome = apply_step(state, actions)
        log.append(actions, outcome)
    return log


def resimulate(log: EpisodeLog, layout: Layout | None = None):
    """Re-apply a log's actions from reset; yields (step_index, outcome, state)."""
    if layout is None:
        layout = get_layout(log.layout)
    state = reset(layout, log.seed, log.horizon)
    for i, step_rec in enumerate(log.steps):
        outcome = apply_step(state, step_rec["actions"])
        yield i, outcome, state


def verify_replay(log: EpisodeLog, layout: Layout | None = None) -> dict:
    """Replay a log and compare rewards/events exactly.

    Returns ``{"ok": bool, "first_divergence": step or None, "field": ...}``.
    """
    for i, outcome, _state in resimulate(log, layout):
        rec = log.steps[i]
        if list(outcome.rewards) != rec["rewards"]:
            return {"ok": False, "first_divergence": i, "field": "rewards"}
        if outcome.events != rec["events"]:
            return {"ok": False, "first_divergence": i, "field": "events"}
    return {"ok": True, "first_divergence": None, "field": None}
