"""Actors: per-seat acting over a batch of parallel episode lanes.

An actor owns whatever per-lane episode state its policy needs (frame stacks,
planner scratch state, rng streams) and maps world states to actions. The same
actors drive evaluation rollouts, checkpoint self-play measurement, and the
live play service (with a single lane).
"""

from __future__ import annotations

import numpy as np

from cookbench.env.core import WorldState
from cookbench.env.layout import Layout
from cookbench.env.observations import FEATURE_LENGTH, feature_observation

from .policy import PolicyParams, forward_batch, sample_actions
from .scripted import ScriptedPolicy
from .spec import AgentSpec


class Actor:
    def begin(self, layout: Layout, n_lanes: int, seats: list[int], seed: int) -> None:
        raise NotImplementedError

    def on_reset(self, lane: int) -> None:
        """Called when a lane's episode restarts."""

    def act_batch(self, states: list[WorldState], lanes: list[int]) -> np.ndarray:
        raise NotImplementedError


class PolicyActor(Actor):
    """Neural policy actor; handles 4-frame stacking for memory variants."""

    def __init__(self, params: PolicyParams, stochastic: bool = True):
        self.params = params
        self.stochastic = stochastic
        self.stack = params.arch.stack

    def begin(self, layout, n_lanes, seats, seed):
        self.seats = list(seats)
        self.rng = np.random.default_rng(np.random.SeedSequence([seed, 0x9E3779B9]))
        self.frames = np.zeros((n_lanes, self.stack, FEATURE_LENGTH), dtype=np.float32)
        self._obs = np.zeros((n_lanes, self.stack * FEATURE_LENGTH), dtype=np.float32)

    def on_reset(self, lane):
        # Zero-padding stands in for pre-episode frames.
        self.frames[lane] = 0.0

    def act_batch(self, states, lanes):
        for i, lane in enumerate(lanes):
            if self.stack > 1:
                self.frames[lane, :-1] = self.frames[lane, 1:]
            feature_observation(states[i], self.seats[lane], out=self.frames[lane, -1])
            self._obs[lane] = self.frames[lane].reshape(-1)
        obs = self._obs[lanes]
        probs, _ = forward_batch(self.params, obs)
        if self.stochastic:
            return sample_actions(probs, self.rng)
        return probs.argmax(axis=1)


class ScriptedActor(Actor):
    """One independent planner per lane."""

    def __init__(self, script: dict):
        self.style = script.get("style", "efficient")
        self.epsilon = float(script.get("epsilon", 0.0))
        self.seed = int(script.get("seed", 0))

    def begin(self, layout, n_lanes, seats, seed):
        self.seats = list(seats)
        self.policies = [
            ScriptedPolicy(layout, style=self.style, epsilon=self.epsilon, seed=int(np.random.SeedSequence([self.seed, seed, lane]).generate_state(1)[0]))
            for lane in range(n_lanes)
        ]

    def on_reset(self, lane):
        self.policies[lane].begin_episode()

    def act_batch(self, states, lanes):
        return np.array(
            [self.policies[lane].action(states[i], self.seats[lane]) for i, lane in enumerate(lanes)],
            dtype=np.int64,
        )


def make_actor(spec: AgentSpec, stochastic: bool = True) -> Actor:
    if spec.method == "Scripted":
        return ScriptedActor(spec.script)
    return PolicyActor(spec.params, stochastic=stochastic)
