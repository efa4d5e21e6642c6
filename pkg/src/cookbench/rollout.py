"""Batched two-seat episode runner shared by evaluation and checkpoint scoring.

Runs ``episodes`` independent lanes of the same pairing in lockstep so neural
actors get one batched forward pass per step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cookbench.agents.actors import Actor
from cookbench.env.core import apply_step, reset
from cookbench.env.episode import EpisodeLog
from cookbench.env.layout import Layout


@dataclass
class EpisodeStats:
    seed: int
    seat_of_a: int
    deliveries: int
    deposits: int
    episode_return: int
    log: EpisodeLog | None = None


def run_pair_episodes(
    layout: Layout,
    actor_a: Actor,
    actor_b: Actor,
    episodes: int,
    horizon: int,
    seed: int,
    seat_of_a="alternate",
    record_logs: bool = False,
    agent_ids=("a", "b"),
) -> list[EpisodeStats]:
    """Play ``episodes`` lanes of actor_a vs actor_b on one layout.

    ``seat_of_a`` is 0, 1, or "alternate" (a takes seat 0 on even lanes).
    Fully deterministic given ``seed``.
    """
    ss = np.random.SeedSequence(seed)
    env_seeds = [int(s.generate_state(1)[0]) for s in ss.spawn(episodes)]
    if seat_of_a == "alternate":
        seats_a = [lane % 2 for lane in range(episodes)]
    else:
        seats_a = [int(seat_of_a)] * episodes
    seats_b = [1 - s for s in seats_a]

    actor_a.begin(layout, episodes, seats_a, seed=int(ss.generate_state(2)[1]))
    actor_b.begin(layout, episodes, seats_b, seed=int(ss.generate_state(3)[2]))
    states = []
    logs = []
    for lane in range(episodes):
        states.append(reset(layout, env_seeds[lane], horizon))
        actor_a.on_reset(lane)
        actor_b.on_reset(lane)
        ids = list(agent_ids) if seats_a[lane] == 0 else [agent_ids[1], agent_ids[0]]
        logs.append(EpisodeLog(layout=layout.name, seed=env_seeds[lane], agent_ids=ids, horizon=horizon))

    lanes = list(range(episodes))
    stats = [EpisodeStats(seed=env_seeds[l], seat_of_a=seats_a[l], deliveries=0, deposits=0, episode_return=0) for l in lanes]
    for _ in range(horizon):
        acts_a = actor_a.act_batch(states, lanes)
        acts_b = actor_b.act_batch(states, lanes)
        for lane in lanes:
            if seats_a[lane] == 0:
                joint = (int(acts_a[lane]), int(acts_b[lane]))
            else:
                joint = (int(acts_b[lane]), int(acts_a[lane]))
            outcome = apply_step(states[lane], joint)
            st = stats[lane]
            st.episode_return += outcome.rewards[0]
            for e in outcome.events:
                if e["type"] == "delivered":
                    st.deliveries += 1
                elif e["type"] == "tomato_deposited":
                    st.deposits += 1
            if record_logs:
                logs[lane].append(joint, outcome)
    if record_logs:
        for lane in lanes:
            stats[lane].log = logs[lane]
    return stats
