"""Scripted deliver-cycle planners: synthetic demonstrators and proxy partners.

A planner executes the soup cycle (fetch tomatoes, fill a pot, fetch a dish,
collect, deliver) reactively from the world state. Seat 0 leans toward pot
filling and seat 1 toward collecting/delivering; on layouts whose two floor
regions are disconnected, each seat either runs the full cycle alone (both
rooms self-sufficient) or falls back to a feeder/cook pair that hands items
over the shared counters.

The "sloppy" style replaces the planned action with a uniformly random one at
rate epsilon; epsilon=0 is exactly the efficient script and epsilon=1 is a
uniform random policy.
"""

from __future__ import annotations

import numpy as np

from cookbench.env.core import ORIENT_DELTAS, Action, Item, WorldState
from cookbench.env.layout import CellKind, Layout

INF = 1 << 30

_DELTA_TO_MOVE = {
    (-1, 0): int(Action.MOVE_UP),
    (1, 0): int(Action.MOVE_DOWN),
    (0, -1): int(Action.MOVE_LEFT),
    (0, 1): int(Action.MOVE_RIGHT),
}
# Deterministic neighbor exploration order: up, down, left, right.
_NEIGHBOR_ORDER = ((-1, 0), (1, 0), (0, -1), (0, 1))


class UnreachableStation(ValueError):
    """The layout cannot be serviced by the pair script."""


def _floor_neighbors(layout: Layout, pos):
    r, c = pos
    out = []
    for dr, dc in _NEIGHBOR_ORDER:
        n = (r + dr, c + dc)
        if 0 <= n[0] < layout.height and 0 <= n[1] < layout.width and layout.grid[n[0], n[1]] == CellKind.FLOOR:
            out.append(n)
    return out


def _region_from(layout: Layout, start) -> frozenset:
    seen = {start}
    frontier = [start]
    while frontier:
        pos = frontier.pop()
        for n in _floor_neighbors(layout, pos):
            if n not in seen:
                seen.add(n)
                frontier.append(n)
    return frozenset(seen)


class ScriptedPolicy:
    """Deterministic deliver-cycle planner for one layout; shared by both seats."""

    def __init__(self, layout: Layout, style: str = "efficient", epsilon: float = 0.0, seed: int = 0):
        if style not in ("efficient", "sloppy"):
            raise ValueError(f"style must be 'efficient' or 'sloppy', got {style!r}")
        self.layout = layout
        self.style = style
        self.epsilon = float(epsilon) if style == "sloppy" else 0.0
        self.seed = int(seed)
        self._dist_cache: dict[tuple, np.ndarray] = {}

        self.regions = (_region_from(layout, layout.spawns[0]), _region_from(layout, layout.spawns[1]))
        self.shared = self.regions[0] == self.regions[1]
        self._assign_modes()
        self._pot_face_sets = tuple(set(self._targets(s, layout.pot_positions)[0]) for s in (0, 1))
        self.reseed(seed)

    # -- setup ---------------------------------------------------------------

    def _access(self, region) -> dict[str, bool]:
        lay = self.layout

        def reachable(cells):
            return any(f in region for cell in cells for f in _floor_neighbors(lay, cell))

        return {
            "tomato": reachable(lay.tomato_stations),
            "dish": reachable(lay.dish_stations),
            "pot": reachable(lay.pot_positions),
            "delivery": reachable(lay.deliveries),
        }

    def _assign_modes(self):
        lay = self.layout
        if self.shared:
            self.modes = ("filler", "server")
            acc = self._access(self.regions[0])
            missing = [k for k, v in acc.items() if not v]
            if missing:
                raise UnreachableStation(f"unreachable station(s): {', '.join(missing)}")
            self.shared_counters = ()
            return

        acc0, acc1 = self._access(self.regions[0]), self._access(self.regions[1])
        if all(acc0.values()) and all(acc1.values()):
            self.modes = ("solo", "solo")
            self.shared_counters = ()
            return

        # Feeder/cook split: the cook's room has the pots and delivery, the
        # feeder's room the tomato and dish stations.
        def fits(feeder_acc, cook_acc):
            return feeder_acc["tomato"] and feeder_acc["dish"] and cook_acc["pot"] and cook_acc["delivery"]

        if fits(acc0, acc1):
            self.modes = ("feeder", "cook")
        elif fits(acc1, acc0):
            self.modes = ("cook", "feeder")
        else:
            raise UnreachableStation("neither seat assignment covers all stations")

        shared = []
        for cell in lay.counters:
            touches0 = any(f in self.regions[0] for f in _floor_neighbors(lay, cell))
            touches1 = any(f in self.regions[1] for f in _floor_neighbors(lay, cell))
            if touches0 and touches1:
                shared.append(cell)
        if not shared:
            raise UnreachableStation("split rooms have no shared counter to pass items over")
        self.shared_counters = tuple(sorted(shared))

    def reseed(self, seed: int) -> None:
        self.seed = int(seed)
        self._rngs = [np.random.default_rng(np.random.SeedSequence([self.seed, s])) for s in (0, 1)]
        self.begin_episode()

    def begin_episode(self) -> None:
        self._blocked = [0, 0]
        self._stuck = [0, 0]
        self._last_pos = [None, None]
        self._last_was_move = [False, False]

    # -- navigation ----------------------------------------------------------

    def _faces(self, cell, region) -> tuple:
        return tuple(f for f in _floor_neighbors(self.layout, cell) if f in region)

    def _dist_field(self, faces: tuple) -> np.ndarray:
        key = tuple(sorted(faces))
        field = self._dist_cache.get(key)
        if field is None:
            lay = self.layout
            field = np.full((lay.height, lay.width), INF, dtype=np.int64)
            frontier = list(key)
            for f in frontier:
                field[f] = 0
            while frontier:
                nxt = []
                for pos in frontier:
                    d = field[pos] + 1
                    for n in _floor_neighbors(lay, pos):
                        if field[n] > d:
                            field[n] = d
                            nxt.append(n)
                frontier = nxt
            self._dist_cache[key] = field
        return field

    def _step_toward(self, state: WorldState, seat: int, target, stop_short: bool = False) -> int:
        """Next action to reach (or wait near) any target face cell, then
        face-and-interact. ``target`` is (faces, face->station map) from
        :meth:`_targets`. INTERACT is returned only when standing on a face
        cell and already oriented toward its station."""
        faces, face_map = target
        if not faces:
            return int(Action.NOOP)
        me = state.players[seat]
        partner = state.players[1 - seat]
        pos = me.position
        field = self._dist_field(faces)
        d = field[pos]
        if d >= INF:
            return int(Action.NOOP)

        if stop_short:
            # Wait near the target without camping on any pot face cell:
            # parked bodies there wall off the partner's deposits (pot faces
            # may be adjacent, or sit in a one-cell corridor).
            pot_faces = self._pot_face_sets[seat]
            if pos in pot_faces:
                for n in _floor_neighbors(self.layout, pos):
                    if n not in pot_faces and n != partner.position:
                        return _DELTA_TO_MOVE[(n[0] - pos[0], n[1] - pos[1])]
                return int(Action.NOOP)
            if d == 1:
                return int(Action.NOOP)
            if d == 2:
                clean_d1 = any(
                    field[n] == 1 and n not in pot_faces and n != partner.position
                    for n in _floor_neighbors(self.layout, pos)
                )
                if not clean_d1:
                    return int(Action.NOOP)

        if d == 0:
            station = face_map[pos]
            delta = (station[0] - pos[0], station[1] - pos[1])
            if ORIENT_DELTAS[me.orientation] == delta:
                return int(Action.INTERACT)
            return _DELTA_TO_MOVE[delta]

        candidates = [n for n in _floor_neighbors(self.layout, pos) if field[n] < d and n != partner.position]
        if stop_short:
            clean = [n for n in candidates if n not in self._pot_face_sets[seat]]
            candidates = clean or candidates
        if candidates:
            best = candidates[0]
            self._blocked[seat] = 0
            return _DELTA_TO_MOVE[(best[0] - pos[0], best[1] - pos[1])]

        # Shortest continuation is blocked by the partner. Seat 0 is patient;
        # seat 1 sidesteps sooner so head-on meetings resolve.
        self._blocked[seat] += 1
        patience = 2 if seat == 0 else 1
        if self._blocked[seat] > patience:
            for n in _floor_neighbors(self.layout, pos):
                if n != partner.position:
                    self._blocked[seat] = 0
                    return _DELTA_TO_MOVE[(n[0] - pos[0], n[1] - pos[1])]
        return int(Action.NOOP)

    # -- target selection ----------------------------------------------------

    def _targets(self, seat: int, cells):
        """(faces, face->station) for the given station cells, restricted to
        the seat's region. A face shared by two stations keeps the row-major
        first station."""
        region = self.regions[seat]
        face_map: dict = {}
        for cell in sorted(cells):
            for f in self._faces(cell, region):
                face_map.setdefault(f, cell)
        return tuple(sorted(face_map)), face_map

    def _nearest_cell(self, state, seat, cells):
        """Station cell whose faces are BFS-nearest to the seat."""
        best, best_d = None, INF
        for cell in sorted(cells):
            faces, _ = self._targets(seat, (cell,))
            if not faces:
                continue
            d = self._dist_field(faces)[state.players[seat].position]
            if d < best_d:
                best, best_d = cell, d
        return best

    def _toward_nearest(self, state, seat, cells, stop_short: bool = False) -> int:
        cell = self._nearest_cell(state, seat, cells)
        if cell is None:
            return int(Action.NOOP)
        return self._step_toward(state, seat, self._targets(seat, (cell,)), stop_short=stop_short)

    # -- the policy ----------------------------------------------------------

    def action(self, state: WorldState, seat: int) -> int:
        me = state.players[seat]
        if self._last_was_move[seat] and me.position == self._last_pos[seat]:
            self._stuck[seat] += 1
        else:
            self._stuck[seat] = 0

        mode = self.modes[seat]
        if mode == "filler":
            act = self._act_cycle(state, seat, dish_duty=False)
        elif mode == "server":
            act = self._act_cycle(state, seat, dish_duty=True)
        elif mode == "solo":
            act = self._act_cycle(state, seat, dish_duty=True, solo=True)
        elif mode == "feeder":
            act = self._act_feeder(state, seat)
        else:
            act = self._act_cook(state, seat)

        # Symmetric livelocks (both seats re-targeting one contested cell) are
        # broken by seat 1 sidestepping after three failed moves in a row.
        if seat == 1 and self._stuck[seat] >= 3 and 1 <= act <= 4:
            partner = state.players[0].position
            planned = ORIENT_DELTAS[act - 1]
            planned_cell = (me.position[0] + planned[0], me.position[1] + planned[1])
            for n in _floor_neighbors(self.layout, me.position):
                if n != partner and n != planned_cell:
                    act = _DELTA_TO_MOVE[(n[0] - me.position[0], n[1] - me.position[1])]
                    self._stuck[seat] = 0
                    break

        if self.epsilon > 0.0:
            rng = self._rngs[seat]
            if rng.random() < self.epsilon:
                act = int(rng.integers(0, 6))

        self._last_pos[seat] = me.position
        self._last_was_move[seat] = 1 <= act <= 4
        return act

    def __call__(self, state: WorldState, seat: int) -> int:
        return self.action(state, seat)

    def _pots_where(self, state, pred):
        return [self.layout.pot_positions[i] for i, pot in enumerate(state.pots) if pred(pot)]

    def _act_cycle(self, state: WorldState, seat: int, dish_duty: bool, solo: bool = False) -> int:
        lay = self.layout
        me = state.players[seat]
        fillable = self._pots_where(state, lambda p: p.tomato_count < 3)
        ready = self._pots_where(state, lambda p: p.is_ready)
        cooking = self._pots_where(state, lambda p: p.tomato_count == 3 and not p.is_ready)

        if me.held == Item.SOUP:
            return self._step_toward(state, seat, self._targets(seat, lay.deliveries))
        if me.held == Item.DISH:
            if ready:
                return self._toward_nearest(state, seat, ready)
            # Wait one cell short of the pot so the filler keeps its access.
            cells = cooking or fillable or lay.pot_positions
            return self._toward_nearest(state, seat, cells, stop_short=True)
        if me.held == Item.TOMATO:
            if fillable:
                return self._toward_nearest(state, seat, fillable)
            # Nothing to fill: hold the tomato, keep clear of pot faces.
            return self._wait_off_faces(state, seat)

        # Empty-handed.
        partner = state.players[1 - seat]
        partner_has_dish = partner.held in (Item.DISH, Item.SOUP)
        if dish_duty:
            if solo and fillable and not (ready or cooking):
                return self._step_toward(state, seat, self._targets(seat, lay.tomato_stations))
            return self._step_toward(state, seat, self._targets(seat, lay.dish_stations))
        if fillable:
            return self._step_toward(state, seat, self._targets(seat, lay.tomato_stations))
        if ready and not partner_has_dish:
            return self._step_toward(state, seat, self._targets(seat, lay.dish_stations))
        # Pot is full and being handled: prefetch the next tomato.
        return self._step_toward(state, seat, self._targets(seat, lay.tomato_stations))

    def _wait_off_faces(self, state, seat) -> int:
        pot_faces = set(self._targets(seat, self.layout.pot_positions)[0])
        me = state.players[seat]
        if me.position in pot_faces:
            partner = state.players[1 - seat]
            for n in _floor_neighbors(self.layout, me.position):
                if n not in pot_faces and n != partner.position:
                    return _DELTA_TO_MOVE[(n[0] - me.position[0], n[1] - me.position[1])]
        return int(Action.NOOP)

    # -- feeder / cook (split rooms) ------------------------------------------

    def _counters_with(self, state, item):
        return [c for c in self.shared_counters if state.counter_items.get(c) == item]

    def _empty_shared_counters(self, state):
        return [c for c in self.shared_counters if c not in state.counter_items]

    def _act_feeder(self, state: WorldState, seat: int) -> int:
        lay = self.layout
        me = state.players[seat]
        if me.held is not None:
            empty = self._empty_shared_counters(state)
            if not empty:
                return int(Action.NOOP)
            return self._toward_nearest(state, seat, empty)

        cook_seat = 1 - seat
        cook = state.players[cook_seat]
        needed = sum(3 - p.tomato_count for p in state.pots if p.tomato_count < 3)
        in_flight = len(self._counters_with(state, int(Item.TOMATO))) + (1 if cook.held == Item.TOMATO else 0)
        dish_in_flight = (
            len(self._counters_with(state, int(Item.DISH)))
            + (1 if cook.held in (Item.DISH, Item.SOUP) else 0)
        )
        pot_active = any(p.tomato_count == 3 for p in state.pots)
        if pot_active and dish_in_flight == 0:
            return self._step_toward(state, seat, self._targets(seat, lay.dish_stations))
        if needed > in_flight:
            return self._step_toward(state, seat, self._targets(seat, lay.tomato_stations))
        return int(Action.NOOP)

    def _act_cook(self, state: WorldState, seat: int) -> int:
        lay = self.layout
        me = state.players[seat]
        fillable = self._pots_where(state, lambda p: p.tomato_count < 3)
        ready = self._pots_where(state, lambda p: p.is_ready)

        if me.held == Item.SOUP:
            return self._step_toward(state, seat, self._targets(seat, lay.deliveries))
        if me.held == Item.DISH:
            if ready:
                return self._toward_nearest(state, seat, ready)
            return self._toward_nearest(state, seat, lay.pot_positions, stop_short=True)
        if me.held == Item.TOMATO:
            if fillable:
                return self._toward_nearest(state, seat, fillable)
            return self._wait_off_faces(state, seat)

        dishes = self._counters_with(state, int(Item.DISH))
        tomatoes = self._counters_with(state, int(Item.TOMATO))
        if ready and dishes:
            return self._toward_nearest(state, seat, dishes)
        if fillable and tomatoes:
            return self._toward_nearest(state, seat, tomatoes)
        if dishes and any(p.tomato_count == 3 for p in state.pots):
            return self._toward_nearest(state, seat, dishes)
        return int(Action.NOOP)


def scripted_demonstrator(layout: Layout, style: str = "efficient", epsilon: float = 0.0, seed: int = 0) -> ScriptedPolicy:
    """Build the deliver-cycle planner for a layout.

    ``style="sloppy"`` mixes in uniform random actions at rate ``epsilon``.
    Raises :class:`UnreachableStation` when no seat assignment can service
    every station.
    """
    policy = ScriptedPolicy(layout, style=style, epsilon=epsilon, seed=seed)
    return policy
