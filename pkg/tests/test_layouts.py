import numpy as np
import pytest

from cookbench.env import CellKind, LayoutError, get_layout, load_layout, shipped_layouts

MINIMAL = """\
#TDPX#
#1..2#
#....#
#....#
######
"""


def test_legend_mapping():
    lay = load_layout(MINIMAL, name="mini")
    assert lay.kind_at((0, 1)) == CellKind.TOMATO_STATION
    assert lay.kind_at((0, 2)) == CellKind.DISH_STATION
    assert lay.kind_at((0, 3)) == CellKind.POT
    assert lay.kind_at((0, 4)) == CellKind.DELIVERY
    assert lay.kind_at((0, 0)) == CellKind.COUNTER
    assert lay.kind_at((1, 1)) == CellKind.FLOOR
    assert lay.spawns == ((1, 1), (1, 4))
    assert (lay.width, lay.height) == (6, 5)


def test_cramped_golden():
    lay = get_layout("cramped")
    assert lay.name == "cramped"
    assert len(lay.pot_positions) == 1


def test_all_shipped_layouts_validate():
    for lay in shipped_layouts():
        assert 1 <= len(lay.pot_positions) <= 2
        assert len(lay.tomato_stations) >= 1
        assert len(lay.dish_stations) >= 1
        assert len(lay.deliveries) >= 1
        s0, s1 = lay.spawns
        assert s0 != s1
        assert lay.is_floor(s0) and lay.is_floor(s1)
        border = np.concatenate([lay.grid[0, :], lay.grid[-1, :], lay.grid[:, 0], lay.grid[:, -1]])
        assert not np.any(border == CellKind.FLOOR)


def test_two_pot_layouts():
    for name in ("asymmetric", "ring", "circuit", "forced"):
        assert len(get_layout(name).pot_positions) == 2


def test_missing_delivery_rejected():
    text = MINIMAL.replace("X", "#")
    with pytest.raises(LayoutError, match="delivery"):
        load_layout(text)


def test_unknown_character_reports_position():
    text = MINIMAL.replace("D", "?")
    with pytest.raises(LayoutError, match="line 1, column 3"):
        load_layout(text)


def test_non_rectangular_rejected():
    with pytest.raises(LayoutError, match="rectangular"):
        load_layout("####\n#1.2##\n####\n")


def test_spawn_count_enforced():
    with pytest.raises(LayoutError, match="spawn"):
        load_layout(MINIMAL.replace("2", "."))
    with pytest.raises(LayoutError, match="spawn"):
        load_layout(MINIMAL.replace("..", "11", 1))


def test_enclosure_enforced():
    # Punch a hole in the bottom wall.
    text = MINIMAL.replace("######", "###.##")
    with pytest.raises(LayoutError, match="enclosed"):
        load_layout(text)


def test_pot_count_enforced():
    with pytest.raises(LayoutError, match="pot"):
        load_layout(MINIMAL.replace("P", "#"))
    with pytest.raises(LayoutError, match="pot"):
        load_layout(MINIMAL.replace("....#\n#....", "PPP.#\n#...."))


def test_unreachable_station_rejected():
    # Wall off a tomato station in a sealed pocket.
    text = """\
#TDPX#
#1..2#
#..###
#..#T#
######
"""
    with pytest.raises(LayoutError, match="tomato station at \\(3, 4\\)"):
        load_layout(text)


def test_layout_text_roundtrip():
    lay = get_layout("ring")
    again = load_layout(lay.to_text(), name="ring")
    assert np.array_equal(lay.grid, again.grid)
    assert lay.spawns == again.spawns
