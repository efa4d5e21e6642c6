"""Kitchen layouts: ASCII grid parsing, validation, and the shipped layout registry."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

# ASCII legend for .layout files.
LEGEND = {
    "#": "counter",
    "T": "tomato_station",
    "D": "dish_station",
    "P": "pot",
    "X": "delivery",
    ".": "floor",
    "1": "floor",  # spawn for player 0
    "2": "floor",  # spawn for player 1
}

# Names of the layouts that ship with the package, in canonical order.
# The feature observation's layout one-hot uses this ordering.
SHIPPED_LAYOUTS = ("cramped", "asymmetric", "ring", "circuit", "forced")


class CellKind(enum.IntEnum):
    FLOOR = 0
    COUNTER = 1
    TOMATO_STATION = 2
    DISH_STATION = 3
    POT = 4
    DELIVERY = 5


_CHAR_TO_KIND = {
    ".": CellKind.FLOOR,
    "1": CellKind.FLOOR,
    "2": CellKind.FLOOR,
    "#": CellKind.COUNTER,
    "T": CellKind.TOMATO_STATION,
    "D": CellKind.DISH_STATION,
    "P": CellKind.POT,
    "X": CellKind.DELIVERY,
}


class LayoutError(ValueError):
    """Raised for malformed or invariant-violating layout files."""


@dataclass(frozen=True)
class Layout:
    """A validated static kitchen grid.

    Positions are (row, col). ``grid[r, c]`` holds a :class:`CellKind` value;
    station/pot/delivery coordinate tuples are precomputed in row-major order.
    """

    name: str
    grid: np.ndarray
    spawns: tuple[tuple[int, int], tuple[int, int]]
    width: int
    height: int
    pot_positions: tuple[tuple[int, int], ...] = field(default=())
    tomato_stations: tuple[tuple[int, int], ...] = field(default=())
    dish_stations: tuple[tuple[int, int], ...] = field(default=())
    deliveries: tuple[tuple[int, int], ...] = field(default=())
    counters: tuple[tuple[int, int], ...] = field(default=())

    def kind_at(self, pos: tuple[int, int]) -> CellKind:
        return CellKind(int(self.grid[pos[0], pos[1]]))

    def is_floor(self, pos: tuple[int, int]) -> bool:
        return self.grid[pos[0], pos[1]] == CellKind.FLOOR

    def in_bounds(self, pos: tuple[int, int]) -> bool:
        return 0 <= pos[0] < self.height and 0 <= pos[1] < self.width

    def pot_index(self, pos: tuple[int, int]) -> int:
        return self.pot_positions.index(pos)

    def to_text(self) -> str:
        """Round-trip the layout back to its ASCII form."""
        kind_char = {
            CellKind.FLOOR: ".",
            CellKind.COUNTER: "#",
            CellKind.TOMATO_STATION: "T",
            CellKind.DISH_STATION: "D",
            CellKind.POT: "P",
            CellKind.DELIVERY: "X",
        }
        rows = []
        for r in range(self.height):
            row = [kind_char[CellKind(int(self.grid[r, c]))] for c in range(self.width)]
            rows.append(row)
        for i, (r, c) in enumerate(self.spawns):
            rows[r][c] = str(i + 1)
        return "\n".join("".join(row) for row in rows) + "\n"


def _positions_of(grid: np.ndarray, kind: CellKind) -> tuple[tuple[int, int], ...]:
    rs, cs = np.nonzero(grid == kind)
    return tuple((int(r), int(c)) for r, c in zip(rs, cs))


def _reachable_floor(grid: np.ndarray, starts) -> set[tuple[int, int]]:
    height, width = grid.shape
    seen: set[tuple[int, int]] = set()
    frontier = [s for s in starts]
    while frontier:
        r, c = frontier.pop()
        if (r, c) in seen:
            continue
        seen.add((r, c))
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            nr, nc = r + dr, c + dc
            if 0 <= nr < height and 0 <= nc < width and grid[nr, nc] == CellKind.FLOOR:
                if (nr, nc) not in seen:
                    frontier.append((nr, nc))
    return seen


def load_layout(text: str, name: str = "custom") -> Layout:
    """Parse and validate an ASCII layout.

    Raises :class:`LayoutError` with line/column on unknown characters and a
    message naming the violated invariant for structural problems.
    """
    lines = [line for line in text.splitlines() if line.strip() != ""]
    if not lines:
        raise LayoutError("layout is empty")
    width = len(lines[0])
    for i, line in enumerate(lines):
        if len(line) != width:
            raise LayoutError(f"line {i + 1}: expected width {width}, got {len(line)} (grid must be rectangular)")
    height = len(lines)

    grid = np.zeros((height, width), dtype=np.uint8)
    spawn_by_digit: dict[str, tuple[int, int]] = {}
    for r, line in enumerate(lines):
        for c, ch in enumerate(line):
            kind = _CHAR_TO_KIND.get(ch)
            if kind is None:
                raise LayoutError(f"line {r + 1}, column {c + 1}: unknown character {ch!r}")
            grid[r, c] = kind
            if ch in ("1", "2"):
                if ch in spawn_by_digit:
                    raise LayoutError(f"line {r + 1}, column {c + 1}: duplicate spawn marker {ch!r}")
                spawn_by_digit[ch] = (r, c)

    if set(spawn_by_digit) != {"1", "2"}:
        raise LayoutError("layout must contain exactly 2 spawn markers ('1' and '2'), both on floor")
    spawns = (spawn_by_digit["1"], spawn_by_digit["2"])

    # Enclosure: the border may not contain floor.
    border = np.concatenate([grid[0, :], grid[-1, :], grid[:, 0], grid[:, -1]])
    if np.any(border == CellKind.FLOOR):
        raise LayoutError("grid must be fully enclosed by non-floor cells")

    pots = _positions_of(grid, CellKind.POT)
    tomatoes = _positions_of(grid, CellKind.TOMATO_STATION)
    dishes = _positions_of(grid, CellKind.DISH_STATION)
    deliveries = _positions_of(grid, CellKind.DELIVERY)
    counters = _positions_of(grid, CellKind.COUNTER)

    if not tomatoes:
        raise LayoutError("layout must contain at least one tomato station")
    if not dishes:
        raise LayoutError("layout must contain at least one dish station")
    if not deliveries:
        raise LayoutError("layout must contain at least one delivery cell")
    if not 1 <= len(pots) <= 2:
        raise LayoutError(f"layout must contain 1 or 2 pots, found {len(pots)}")

    reachable = _reachable_floor(grid, spawns)
    for label, cells in (
        ("pot", pots),
        ("tomato station", tomatoes),
        ("dish station", dishes),
        ("delivery", deliveries),
    ):
        for r, c in cells:
            neighbors = ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1))
            if not any(n in reachable for n in neighbors):
                raise LayoutError(f"{label} at ({r}, {c}) is not adjacent to any reachable floor cell")

    return Layout(
        name=name,
        grid=grid,
        spawns=spawns,
        width=width,
        height=height,
        pot_positions=pots,
        tomato_stations=tomatoes,
        dish_stations=dishes,
        deliveries=deliveries,
        counters=counters,
    )


def load_layout_file(path) -> Layout:
    from pathlib import Path

    p = Path(path)
    return load_layout(p.read_text(encoding="utf-8"), name=p.stem)


_registry_cache: dict[str, Layout] = {}


def get_layout(name: str) -> Layout:
    """Fetch a shipped layout by name (``tutorial`` included)."""
    if name not in _registry_cache:
        try:
            text = resources.files("cookbench.env.data").joinpath(f"{name}.layout").read_text(encoding="utf-8")
        except FileNotFoundError:
            raise KeyError(f"unknown layout {name!r}") from None
        _registry_cache[name] = load_layout(text, name=name)
    return _registry_cache[name]


def shipped_layouts() -> list[Layout]:
    return [get_layout(name) for name in SHIPPED_LAYOUTS]
