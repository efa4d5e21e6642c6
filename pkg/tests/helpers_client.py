"""Headless scripted client pieces shared by service and acceptance tests.

The client sees only wire frames, so it rebuilds a world state from them and
lets the deliver-cycle planner choose the key to press.
"""

from __future__ import annotations

import numpy as np

from cookbench.agents.scripted import ScriptedPolicy
from cookbench.env.core import PlayerState, PotState, WorldState
from cookbench.env.layout import get_layout
from cookbench.env.observations import ITEM_NAMES, ORIENT_NAMES

_ORIENT_INDEX = {name: i for i, name in enumerate(ORIENT_NAMES)}
_ITEM_INDEX = {name: i for i, name in enumerate(ITEM_NAMES)}


def state_from_frame(layout_name: str, msg: dict) -> WorldState:
    """Reconstruct a WorldState good enough for the planner from a frame message."""
    layout = get_layout(layout_name)
    players = [
        PlayerState(
            position=tuple(p["position"]),
            orientation=_ORIENT_INDEX[p["orientation"]],
            held=None if p["held"] is None else _ITEM_INDEX[p["held"]],
        )
        for p in msg["players"]
    ]
    pots = [PotState(tomato_count=p["tomato_count"], cook_progress=round(p["progress"] * 20)) for p in msg["pots"]]
    counter_items = {tuple(ci["cell"]): _ITEM_INDEX[ci["item"]] for ci in msg["counter_items"]}
    return WorldState(
        layout=layout,
        players=players,
        pots=pots,
        counter_items=counter_items,
        step=msg.get("tick", 0),
        horizon=1 << 30,
        rng=np.random.default_rng(0),
    )


class ScriptedHuman:
    """Chooses the human's next key from wire frames via the cycle planner."""

    def __init__(self):
        self.layout_name: str | None = None
        self.seat = 0
        self.policy: ScriptedPolicy | None = None

    def start_episode(self, layout_name: str, solo: bool = False):
        self.layout_name = layout_name
        self.policy = ScriptedPolicy(get_layout(layout_name))
        if solo:
            self.policy.modes = ("solo", "solo")
        self.policy.begin_episode()

    def identify_seat(self, msg: dict, my_last_pos=None):
        # The server never tells the client its seat; infer it once from the
        # session metadata when available, else default to seat 0.
        return self.seat

    def action(self, msg: dict) -> int:
        state = state_from_frame(self.layout_name, msg)
        return int(self.policy.action(state, self.seat))
