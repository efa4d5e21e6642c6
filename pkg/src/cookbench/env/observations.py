"""Observation encoders: flat feature vectors and the egocentric symbolic window."""

from __future__ import annotations

import numpy as np

from .core import COOK_TIME, ORIENT_DELTAS, Item, PotPhase, WorldState
from .layout import SHIPPED_LAYOUTS, CellKind

# Feature vector layout (float32), in order:
#   [0:2]   own position (row, col), scaled to [0, 1]
#   [2:6]   orientation one-hot (up, down, left, right)
#   [6:10]  held-item one-hot (none, tomato, dish, soup)
#   [10:12] partner position relative to own, scaled
#   [12:22] per-pot contents one-hot, 5 wide (empty/1/2/3/cooked), zero-padded to 2 pots
#   [22]    faced-cell-empty flag
#   [23:27] adjacent-cell-empty flags (up, down, left, right)
#   [27:35] relative offsets to nearest tomato source, dish source, ready soup,
#           delivery (2 each, scaled; zeros when no such target exists)
#   [35:40] layout one-hot over the five shipped layouts (zeros for custom layouts)
FEATURE_LENGTH = 40

_LAYOUT_INDEX = {name: i for i, name in enumerate(SHIPPED_LAYOUTS)}
_DELTA_TO_ADJ = {d: i for i, d in enumerate(ORIENT_DELTAS)}


class _FeatureCache:
    """Per-layout static feature tables, keyed by layout identity."""

    __slots__ = ("hscale", "wscale", "static_block", "adj_floor", "layout_onehot", "pot_positions")

    def __init__(self, layout):
        h, w = layout.height, layout.width
        self.hscale = 1.0 / max(h - 1, 1)
        self.wscale = 1.0 / max(w - 1, 1)
        self.pot_positions = layout.pot_positions

        # Per-cell static tail: own position scaled plus nearest tomato, dish,
        # delivery offsets (indices 0:2, 27:31, 33:35 of the feature vector).
        self.static_block = np.zeros((h, w, 8), dtype=np.float32)
        self.adj_floor = np.zeros((h, w, 4), dtype=np.float32)
        floor = layout.grid == CellKind.FLOOR
        for r in range(h):
            for c in range(w):
                blk = self.static_block[r, c]
                blk[0] = r * self.hscale
                blk[1] = c * self.wscale
                for j, targets in enumerate((layout.tomato_stations, layout.dish_stations, layout.deliveries)):
                    t = _nearest((r, c), targets)
                    if t is not None:
                        blk[2 + 2 * j] = (t[0] - r) * self.hscale
                        blk[3 + 2 * j] = (t[1] - c) * self.wscale
                for i, (dr, dc) in enumerate(ORIENT_DELTAS):
                    nr, nc = r + dr, c + dc
                    if 0 <= nr < h and 0 <= nc < w and floor[nr, nc]:
                        self.adj_floor[r, c, i] = 1.0

        self.layout_onehot = np.zeros(5, dtype=np.float32)
        idx = _LAYOUT_INDEX.get(layout.name)
        if idx is not None:
            self.layout_onehot[idx] = 1.0


_feature_caches: dict[int, tuple[object, _FeatureCache]] = {}


def _feature_cache(layout) -> _FeatureCache:
    entry = _feature_caches.get(id(layout))
    if entry is None or entry[0] is not layout:
        entry = (layout, _FeatureCache(layout))
        _feature_caches[id(layout)] = entry
    return entry[1]


def _nearest(origin: tuple[int, int], targets) -> tuple[int, int] | None:
    best = None
    best_d = 1 << 30
    for t in targets:
        d = abs(t[0] - origin[0]) + abs(t[1] - origin[1])
        if d < best_d:
            best_d = d
            best = t
    return best


def feature_observation(state: WorldState, player_index: int, out: np.ndarray | None = None) -> np.ndarray:
    """Encode the world from one player's perspective as a length-40 vector."""
    cache = _feature_cache(state.layout)
    if out is None:
        out = np.zeros(FEATURE_LENGTH, dtype=np.float32)
    else:
        out[:] = 0.0
    me = state.players[player_index]
    partner = state.players[1 - player_index]
    r, c = me.position

    static = cache.static_block[r, c]
    out[0] = static[0]
    out[1] = static[1]
    out[2 + me.orientation] = 1.0
    out[6 if me.held is None else 7 + me.held] = 1.0
    pdr = partner.position[0] - r
    pdc = partner.position[1] - c
    out[10] = pdr * cache.hscale
    out[11] = pdc * cache.wscale

    pots = state.pots
    for i in range(len(pots) if len(pots) < 2 else 2):
        pot = pots[i]
        out[12 + 5 * i + (4 if pot.cook_progress >= COOK_TIME else pot.tomato_count)] = 1.0

    out[23:27] = cache.adj_floor[r, c]
    if pdr * pdr + pdc * pdc == 1:
        out[23 + _DELTA_TO_ADJ[(pdr, pdc)]] = 0.0
    out[22] = out[23 + me.orientation]

    out[27:31] = static[2:6]
    out[33:35] = static[6:8]
    ready = None
    best_d = 1 << 30
    for i, pot in enumerate(pots):
        if pot.cook_progress >= COOK_TIME:
            t = cache.pot_positions[i]
            d = abs(t[0] - r) + abs(t[1] - c)
            if d < best_d:
                best_d, ready = d, t
    if state.counter_items:
        for cell, item in state.counter_items.items():
            if item == Item.SOUP:
                d = abs(cell[0] - r) + abs(cell[1] - c)
                if d < best_d:
                    best_d, ready = d, cell
    if ready is not None:
        out[31] = (ready[0] - r) * cache.hscale
        out[32] = (ready[1] - c) * cache.wscale

    out[35:40] = cache.layout_onehot
    return out


# Egocentric window: 7x7 cells centered on the player, rotated so the player
# faces up. Channels:
#   0..5   cell kind one-hot (floor, counter, tomato station, dish station, pot, delivery)
#   6      out of bounds
#   7..9   item one-hot (tomato, dish, soup): counter items plus held items at
#          the holder's cell
#   10     partner
#   11     self (always set at the center)
#   12..14 pot phase one-hot (filling, cooking, ready)
EGO_WINDOW = 7
EGO_CHANNELS = 15

# Maps a window offset (rows down, cols right with "up" = facing direction)
# into a world offset, per orientation.
_ROTATIONS = (
    lambda dr, dc: (dr, dc),  # facing up
    lambda dr, dc: (-dr, -dc),  # facing down
    lambda dr, dc: (-dc, dr),  # facing left
    lambda dr, dc: (dc, -dr),  # facing right
)


def egocentric_observation(state: WorldState, player_index: int) -> np.ndarray:
    """7x7x15 one-hot window centered on the player, facing up."""
    layout = state.layout
    me = state.players[player_index]
    partner = state.players[1 - player_index]
    rot = _ROTATIONS[me.orientation]
    half = EGO_WINDOW // 2
    obs = np.zeros((EGO_WINDOW, EGO_WINDOW, EGO_CHANNELS), dtype=np.float32)

    held_positions = {}
    if me.held is not None:
        held_positions[me.position] = me.held
    if partner.held is not None:
        held_positions[partner.position] = partner.held

    for wr in range(EGO_WINDOW):
        for wc in range(EGO_WINDOW):
            dr, dc = rot(wr - half, wc - half)
            pos = (me.position[0] + dr, me.position[1] + dc)
            if not layout.in_bounds(pos):
                obs[wr, wc, 6] = 1.0
                continue
            kind = int(layout.grid[pos[0], pos[1]])
            obs[wr, wc, kind] = 1.0
            item = state.counter_items.get(pos)
            if item is None:
                item = held_positions.get(pos)
            if item is not None:
                obs[wr, wc, 7 + item] = 1.0
            if pos == partner.position:
                obs[wr, wc, 10] = 1.0
            if pos == me.position:
                obs[wr, wc, 11] = 1.0
            if kind == CellKind.POT:
                pot = state.pots[layout.pot_positions.index(pos)]
                obs[wr, wc, 12 + int(pot.phase)] = 1.0
    return obs


ORIENT_NAMES = ("up", "down", "left", "right")
ITEM_NAMES = ("tomato", "dish", "soup")
_KIND_CHARS = {
    CellKind.FLOOR: ".",
    CellKind.COUNTER: "#",
    CellKind.TOMATO_STATION: "T",
    CellKind.DISH_STATION: "D",
    CellKind.POT: "P",
    CellKind.DELIVERY: "X",
}


def render_topdown(state: WorldState) -> dict:
    """Serializable top-down frame for the play client; pure function of state."""
    layout = state.layout
    grid_rows = [
        "".join(_KIND_CHARS[CellKind(int(layout.grid[r, c]))] for c in range(layout.width))
        for r in range(layout.height)
    ]
    return {
        "layout": layout.name,
        "width": layout.width,
        "height": layout.height,
        "grid": grid_rows,
        "players": [
            {
                "position": list(p.position),
                "orientation": ORIENT_NAMES[p.orientation],
                "held": None if p.held is None else ITEM_NAMES[p.held],
            }
            for p in state.players
        ],
        "pots": [
            {
                "position": list(pos),
                "tomato_count": pot.tomato_count,
                "progress": pot.cook_progress / COOK_TIME,
                "phase": PotPhase(pot.phase).name.lower(),
            }
            for pos, pot in zip(layout.pot_positions, state.pots)
        ],
        "counter_items": sorted(
            ({"cell": [r, c], "item": ITEM_NAMES[item]} for (r, c), item in state.counter_items.items()),
            key=lambda e: e["cell"],
        ),
        "step": state.step,
        "horizon": state.horizon,
    }
