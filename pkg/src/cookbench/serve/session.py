"""Study sessions: randomized episode sequences, ticking, preference capture.

A session is single-owner (one event loop drives it); the server is
authoritative and the client only sends intents. The agent's action for tick t
is computed from the same pre-tick state as the human's buffered action, so it
can never react to the human's tick-t input.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from cookbench.agents.actors import Actor, make_actor
from cookbench.agents.spec import AgentSpec
from cookbench.env.core import Action, apply_step, reset
from cookbench.env.episode import EpisodeLog
from cookbench.env.layout import SHIPPED_LAYOUTS, get_layout
from cookbench.env.observations import render_topdown

from .protocol import RATINGS

PARTNER_COLORS = ("blue", "green", "pink", "orange", "purple", "teal", "red", "yellow")


class SessionError(RuntimeError):
    pass


@dataclass
class SessionConfig:
    cohort: list[AgentSpec]
    layouts: tuple[str, ...] = SHIPPED_LAYOUTS
    episodes_per_layout: int = 4
    horizon: int = 300
    tick_period: float = 0.2
    tutorial_layout: str = "tutorial"
    stochastic_agents: bool = True

    @property
    def total_episodes(self) -> int:
        return len(self.layouts) * self.episodes_per_layout


class _NoopActor(Actor):
    def begin(self, layout, n_lanes, seats, seed):
        pass

    def act_batch(self, states, lanes):
        return np.zeros(len(lanes), dtype=np.int64)


@dataclass
class PreferenceRecord:
    session_id: str
    episode_pair: tuple[int, int]
    agent_a: str
    agent_b: str
    rating: int
    timestamp: float

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "episode_pair": list(self.episode_pair),
            "agent_a": self.agent_a,
            "agent_b": self.agent_b,
            "rating": self.rating,
            "timestamp": self.timestamp,
        }


class StudySession:
    """One participant's full 20-episode study, plus tutorial and practice."""

    def __init__(self, session_id: str, participant_token: str, config: SessionConfig, seed: int):
        if len(config.cohort) < config.episodes_per_layout:
            raise SessionError(
                f"cohort has {len(config.cohort)} agents; need at least {config.episodes_per_layout} per layout draw"
            )
        self.id = session_id
        self.participant_token = participant_token
        self.config = config
        self.seed = int(seed)
        self.rng = np.random.default_rng(np.random.SeedSequence([self.seed, 0x5E5510]))

        # Randomize the layout order once; the sequence repeats it per block.
        order = list(self.rng.permutation(len(config.layouts)))
        self.layout_sequence = [config.layouts[i] for i in order] * config.episodes_per_layout
        # Four distinct agents per layout, one per visit.
        self.agent_draws: dict[str, list[int]] = {}
        for name in config.layouts:
            picks = self.rng.choice(len(config.cohort), size=config.episodes_per_layout, replace=False)
            self.agent_draws[name] = [int(i) for i in picks]
        self._layout_visits = {name: 0 for name in config.layouts}
        color_order = list(self.rng.permutation(len(PARTNER_COLORS)))
        self._colors = [PARTNER_COLORS[i] for i in color_order]

        self.phase = "tutorial"
        self.episode_index = 0  # next study episode to play (0..19)
        self.episode_logs: list[EpisodeLog | None] = [None] * config.total_episodes
        self.episode_agents: list[str | None] = [None] * config.total_episodes
        self.episode_deliveries: list[int] = [0] * config.total_episodes
        self.preferences: list[PreferenceRecord] = []
        self.practice_log: EpisodeLog | None = None
        self.abandoned_logs: list[EpisodeLog] = []

        # Live episode state.
        self._env_state = None
        self._actor: Actor | None = None
        self._agent_seat = 1
        self._tick = 0
        self._score = 0
        self._log: EpisodeLog | None = None
        self._pending_action = int(Action.NOOP)
        self._episode_seed = 0
        self._is_practice = False

    # -- sequence metadata -----------------------------------------------------

    def current_agent_index(self) -> int | None:
        if self.episode_index >= self.config.total_episodes:
            return None
        layout = self.layout_sequence[self.episode_index]
        visit = self._layout_visits[layout]
        return self.agent_draws[layout][visit]

    @property
    def human_seat(self) -> int:
        return 1 - self._agent_seat

    def partner_color(self, episode_index: int) -> str:
        return self._colors[episode_index % len(self._colors)]

    # -- phase transitions -------------------------------------------------------

    def advance(self) -> str:
        """Client 'advance' intent: tutorial -> practice, debrief -> done."""
        if self.phase == "tutorial":
            self._start_practice()
        elif self.phase == "debrief":
            self.phase = "done"
        else:
            raise SessionError(f"cannot advance from phase {self.phase!r}")
        return self.phase

    def _start_practice(self):
        layout = get_layout(self.config.tutorial_layout)
        self._episode_seed = int(self.rng.integers(1 << 31))
        self._env_state = reset(layout, self._episode_seed, horizon=1 << 30)  # no time limit
        self._actor = _NoopActor()
        self._actor.begin(layout, 1, [1], seed=0)
        self._agent_seat = 1
        self._tick = 0
        self._score = 0
        self._pending_action = int(Action.NOOP)
        self._log = EpisodeLog(layout=layout.name, seed=self._episode_seed, agent_ids=["human", "noop"], horizon=self.config.horizon)
        self._is_practice = True
        self.phase = "practice"

    def start_next_episode(self):
        if self.episode_index >= self.config.total_episodes:
            self.phase = "debrief"
            return
        layout_name = self.layout_sequence[self.episode_index]
        layout = get_layout(layout_name)
        agent_idx = self.current_agent_index()
        agent = self.config.cohort[agent_idx]
        self.episode_agents[self.episode_index] = agent.id
        self._agent_seat = int(self.rng.integers(0, 2))
        self._episode_seed = int(self.rng.integers(1 << 31))
        self._env_state = reset(layout, self._episode_seed, horizon=self.config.horizon)
        self._actor = make_actor(agent, stochastic=self.config.stochastic_agents)
        self._actor.begin(layout, 1, [self._agent_seat], seed=int(self.rng.integers(1 << 31)))
        self._actor.on_reset(0)
        self._tick = 0
        self._score = 0
        self._pending_action = int(Action.NOOP)
        ids = ["human", agent.id] if self._agent_seat == 1 else [agent.id, "human"]
        self._log = EpisodeLog(layout=layout_name, seed=self._episode_seed, agent_ids=ids, horizon=self.config.horizon)
        self._is_practice = False
        self.phase = "playing"

    # -- live play ----------------------------------------------------------------

    def buffer_input(self, action: int) -> None:
        if self.phase not in ("practice", "playing"):
            return  # inputs outside play phases are dropped
        if not 0 <= int(action) < 6:
            raise SessionError(f"action {action!r} outside the action space")
        self._pending_action = int(action)  # latest wins within a tick

    def tick(self) -> dict:
        """Advance the live episode one step. Returns
        {frame, score, events, episode_done, practice_done}."""
        if self.phase not in ("practice", "playing"):
            raise SessionError(f"tick in phase {self.phase!r}")
        state = self._env_state
        human_action = self._pending_action
        self._pending_action = int(Action.NOOP)
        agent_action = int(self._actor.act_batch([state], [0])[0])
        if self._agent_seat == 0:
            joint = (agent_action, human_action)
        else:
            joint = (human_action, agent_action)
        outcome = apply_step(state, joint)
        self._log.append(joint, outcome)
        self._tick += 1
        deliveries_this_tick = sum(1 for e in outcome.events if e["type"] == "delivered")
        self._score += deliveries_this_tick

        practice_done = False
        episode_done = False
        if self._is_practice:
            if deliveries_this_tick:
                # One full deliver cycle completes the practice.
                self.practice_log = self._log
                practice_done = True
                self.start_next_episode()
        elif outcome.done:
            episode_done = True
            self._finish_episode()
        return {
            "frame": render_topdown(state),
            "tick": self._tick,
            "score": self._score,
            "events": outcome.events,
            "episode_done": episode_done,
            "practice_done": practice_done,
        }

    def _finish_episode(self):
        idx = self.episode_index
        self.episode_logs[idx] = self._log
        self.episode_deliveries[idx] = self._score
        layout = self.layout_sequence[idx]
        self._layout_visits[layout] += 1
        self.episode_index += 1
        if self.episode_index % 2 == 0:
            self.phase = "preference"
        elif self.episode_index >= self.config.total_episodes:
            self.phase = "debrief"
        else:
            self.start_next_episode()

    def abandon_episode(self) -> None:
        """Client vanished mid-episode: exclude the log and replay the slot."""
        if self.phase == "playing" and self._log is not None and self._log.steps:
            self.abandoned_logs.append(self._log)
            self._log = None
        if self.phase in ("practice", "playing"):
            self._env_state = None

    def resume(self) -> str:
        """Restart the interrupted episode (fresh seed, same slot) if needed."""
        if self.phase == "practice":
            self._start_practice()
        elif self.phase == "playing" and self._env_state is None:
            self.start_next_episode()
        return self.phase

    # -- preferences ----------------------------------------------------------------

    def submit_preference(self, rating: int) -> PreferenceRecord:
        if self.phase != "preference":
            raise SessionError(f"preference submitted in phase {self.phase!r}")
        if rating not in RATINGS:
            raise SessionError(f"rating {rating!r} outside the five-point scale")
        pair = (self.episode_index - 2, self.episode_index - 1)
        if any(r.episode_pair == pair for r in self.preferences):
            raise SessionError(f"duplicate preference for episode pair {pair}")
        record = PreferenceRecord(
            session_id=self.id,
            episode_pair=pair,
            agent_a=self.episode_agents[pair[0]],
            agent_b=self.episode_agents[pair[1]],
            rating=int(rating),
            timestamp=time.time(),
        )
        self.preferences.append(record)
        if self.episode_index >= self.config.total_episodes:
            self.phase = "debrief"
        else:
            self.start_next_episode()
        return record

    # -- export -----------------------------------------------------------------------

    def export(self) -> dict:
        """Completed study episodes and preference records; practice and
        abandoned episodes excluded."""
        logs = [log for log in self.episode_logs if log is not None]
        return {
            "session_id": self.id,
            "participant_token": self.participant_token,
            "seed": self.seed,
            "episode_logs": [log.to_jsonl() for log in logs],
            "episode_agents": [a for a, log in zip(self.episode_agents, self.episode_logs) if log is not None],
            "preferences": [p.to_dict() for p in self.preferences],
            "method_of": {a.id: a.method for a in self.config.cohort},
        }
