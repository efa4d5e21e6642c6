"""Two-player cooking gridworld: world state and deterministic step dynamics.

Actions are joint; a step resolves movement (simultaneous, collisions block),
then both interacts (player 0 first), then advances cooking pots. Rewards are
shared: +20 per delivered soup and +1 per deposited tomato, added to both
players' reward entries every step.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .layout import CellKind, Layout

COOK_TIME = 20
DELIVERY_REWARD = 20
DEPOSIT_REWARD = 1
DEFAULT_HORIZON = 540
NUM_ACTIONS = 6

# Orientation indices 0..3 = up, down, left, right; movement action a maps to
# orientation a-1.
ORIENT_DELTAS = ((-1, 0), (1, 0), (0, -1), (0, 1))


class Action(enum.IntEnum):
    NOOP = 0
    MOVE_UP = 1
    MOVE_DOWN = 2
    MOVE_LEFT = 3
    MOVE_RIGHT = 4
    INTERACT = 5


class Item(enum.IntEnum):
    TOMATO = 0
    DISH = 1
    SOUP = 2


class PotPhase(enum.IntEnum):
    FILLING = 0
    COOKING = 1
    READY = 2


class ContractViolation(RuntimeError):
    """Raised when an operation is called outside its stated preconditions."""


@dataclass(slots=True)
class PotState:
    tomato_count: int = 0
    cook_progress: int = 0

    @property
    def phase(self) -> PotPhase:
        if self.tomato_count < 3:
            return PotPhase.FILLING
        if self.cook_progress < COOK_TIME:
            return PotPhase.COOKING
        return PotPhase.READY

    @property
    def is_ready(self) -> bool:
        return self.cook_progress >= COOK_TIME


@dataclass(slots=True)
class PlayerState:
    position: tuple[int, int]
    orientation: int = 1  # down
    held: int | None = None


@dataclass(slots=True)
class StepOutcome:
    rewards: tuple[int, int]
    events: list[dict]
    done: bool


@dataclass(slots=True)
class WorldState:
    layout: Layout
    players: list[PlayerState]
    pots: list[PotState]
    counter_items: dict[tuple[int, int], int]
    step: int
    horizon: int
    rng: np.random.Generator

    @property
    def pots_by_position(self) -> dict[tuple[int, int], PotState]:
        return dict(zip(self.layout.pot_positions, self.pots))

    def clone(self) -> "WorldState":
        rng = np.random.default_rng()
        rng.bit_generator.state = self.rng.bit_generator.state
        return WorldState(
            layout=self.layout,
            players=[PlayerState(p.position, p.orientation, p.held) for p in self.players],
            pots=[PotState(p.tomato_count, p.cook_progress) for p in self.pots],
            counter_items=dict(self.counter_items),
            step=self.step,
            horizon=self.horizon,
            rng=rng,
        )

    def to_dict(self) -> dict:
        """Canonical serializable form; equal dicts mean bit-identical states."""
        return {
            "layout": self.layout.name,
            "players": [
                {"position": list(p.position), "orientation": int(p.orientation), "held": p.held}
                for p in self.players
            ],
            "pots": [[p.tomato_count, p.cook_progress] for p in self.pots],
            "counter_items": sorted([r, c, item] for (r, c), item in self.counter_items.items()),
            "step": self.step,
            "horizon": self.horizon,
            "rng_state": _rng_state_dict(self.rng),
        }


def _rng_state_dict(rng: np.random.Generator) -> dict:
    st = rng.bit_generator.state
    return {"bit_generator": st["bit_generator"], "state": int(st["state"]["state"]), "inc": int(st["state"]["inc"])}


def reset(layout: Layout, seed: int, horizon: int = DEFAULT_HORIZON) -> WorldState:
    """Fresh episode state: players at their spawns (player 0 at spawn 1),
    empty hands, all pots empty, no counter items."""
    players = [PlayerState(position=layout.spawns[i]) for i in (0, 1)]
    pots = [PotState() for _ in layout.pot_positions]
    return WorldState(
        layout=layout,
        players=players,
        pots=pots,
        counter_items={},
        step=0,
        horizon=horizon,
        rng=np.random.default_rng(seed),
    )


def step(state: WorldState, actions) -> tuple[WorldState, StepOutcome]:
    """Pure step: returns a new state, leaving the input untouched."""
    new_state = state.clone()
    outcome = apply_step(new_state, actions)
    return new_state, outcome


def apply_step(state: WorldState, actions) -> StepOutcome:
    """In-place step used by the rollout hot path. Same dynamics as :func:`step`."""
    if state.step >= state.horizon:
        raise ContractViolation(f"episode is done (step {state.step} of horizon {state.horizon})")
    a0, a1 = int(actions[0]), int(actions[1])

    _resolve_movement(state, a0, a1)

    events: list[dict] = []
    reward = 0
    started: list[int] = []
    if a0 == Action.INTERACT:
        reward += _interact(state, 0, events, started)
    if a1 == Action.INTERACT:
        reward += _interact(state, 1, events, started)

    for i, pot in enumerate(state.pots):
        if pot.tomato_count == 3 and pot.cook_progress < COOK_TIME and i not in started:
            pot.cook_progress += 1

    state.step += 1
    done = state.step >= state.horizon
    return StepOutcome(rewards=(reward, reward), events=events, done=done)


def _resolve_movement(state: WorldState, a0: int, a1: int) -> None:
    layout = state.layout
    players = state.players
    cur0, cur1 = players[0].position, players[1].position
    tgt0, tgt1 = cur0, cur1

    if 1 <= a0 <= 4:
        players[0].orientation = a0 - 1
        dr, dc = ORIENT_DELTAS[a0 - 1]
        cand = (cur0[0] + dr, cur0[1] + dc)
        if layout.grid[cand[0], cand[1]] == CellKind.FLOOR:
            tgt0 = cand
    if 1 <= a1 <= 4:
        players[1].orientation = a1 - 1
        dr, dc = ORIENT_DELTAS[a1 - 1]
        cand = (cur1[0] + dr, cur1[1] + dc)
        if layout.grid[cand[0], cand[1]] == CellKind.FLOOR:
            tgt1 = cand

    # Simultaneous moves into one cell block both; so do position swaps.
    # A non-moving player "targets" its own cell, which also blocks a partner
    # stepping into an occupied cell that is not being vacated.
    if tgt0 == tgt1 or (tgt0 == cur1 and tgt1 == cur0):
        tgt0, tgt1 = cur0, cur1

    players[0].position = tgt0
    players[1].position = tgt1


def _interact(state: WorldState, i: int, events: list[dict], started: list[int]) -> int:
    """Resolve one player's interact against the faced cell. Returns the shared
    reward contribution. Unmatched combinations are no-ops."""
    layout = state.layout
    p = state.players[i]
    dr, dc = ORIENT_DELTAS[p.orientation]
    face = (p.position[0] + dr, p.position[1] + dc)
    kind = layout.grid[face[0], face[1]]
    held = p.held

    if kind == CellKind.TOMATO_STATION:
        if held is None:
            p.held = int(Item.TOMATO)
    elif kind == CellKind.DISH_STATION:
        if held is None:
            p.held = int(Item.DISH)
    elif kind == CellKind.POT:
        pot_idx = layout.pot_positions.index(face)
        pot = state.pots[pot_idx]
        if held == Item.TOMATO and pot.tomato_count < 3:
            pot.tomato_count += 1
            p.held = None
            events.append({"type": "tomato_deposited", "player": i, "pot": [face[0], face[1]]})
            if pot.tomato_count == 3:
                pot.cook_progress = 0
                started.append(pot_idx)
            return DEPOSIT_REWARD
        if held == Item.DISH and pot.is_ready:
            p.held = int(Item.SOUP)
            pot.tomato_count = 0
            pot.cook_progress = 0
            events.append({"type": "soup_collected", "player": i, "pot": [face[0], face[1]]})
    elif kind == CellKind.DELIVERY:
        if held == Item.SOUP:
            p.held = None
            events.append({"type": "delivered", "player": i})
            return DELIVERY_REWARD
    elif kind == CellKind.COUNTER:
        slot = state.counter_items.get(face)
        if held is None and slot is not None:
            p.held = slot
            del state.counter_items[face]
            events.append({"type": "counter_pickup", "player": i, "cell": [face[0], face[1]], "item": slot})
        elif held is not None and slot is None:
            state.counter_items[face] = held
            p.held = None
            events.append({"type": "counter_place", "player": i, "cell": [face[0], face[1]], "item": held})
    return 0


class CookingEnv:
    """Single-owner environment wrapper around a mutable :class:`WorldState`.

    Instances are independent; run as many in parallel as you like, but do not
    share one across threads.
    """

    def __init__(self, layout: Layout, horizon: int = DEFAULT_HORIZON):
        self.layout = layout
        self.horizon = horizon
        self.state: WorldState | None = None

    def reset(self, seed: int) -> WorldState:
        self.state = reset(self.layout, seed, self.horizon)
        return self.state

    def step(self, actions) -> StepOutcome:
        return apply_step(self.state, actions)
