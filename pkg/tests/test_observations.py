import numpy as np

from cookbench.env import (
    EGO_CHANNELS,
    EGO_WINDOW,
    FEATURE_LENGTH,
    Action,
    Item,
    apply_step,
    egocentric_observation,
    feature_observation,
    get_layout,
    render_topdown,
    reset,
)
from cookbench.env.layout import SHIPPED_LAYOUTS


def test_feature_length_matches_documented_sum():
    # own pos (2) + orientation (4) + held (4) + partner rel (2) + pots (2*5)
    # + faced empty (1) + adjacent empty (4) + nearest offsets (4*2) + layout (5)
    assert FEATURE_LENGTH == 2 + 4 + 4 + 2 + 10 + 1 + 4 + 8 + 5 == 40
    for name in SHIPPED_LAYOUTS:
        s = reset(get_layout(name), 0)
        assert feature_observation(s, 0).shape == (40,)
        assert feature_observation(s, 1).shape == (40,)


def test_fresh_reset_encoding(cramped):
    s = reset(cramped, 0)
    v = feature_observation(s, 0)
    assert v[12] == 1.0 and v[13:17].sum() == 0  # pot 0 "empty"
    assert v[17:22].sum() == 0  # no second pot on cramped
    assert v[6] == 1.0 and v[7:10].sum() == 0  # held "none"
    assert v[35] == 1.0 and v[36:40].sum() == 0  # layout one-hot


def test_cooking_pot_encoded_as_three(pot_bench):
    from tests.test_dynamics import DEPOSIT, run

    s = reset(pot_bench, 0)
    run(s, DEPOSIT * 3)
    assert s.pots[0].tomato_count == 3
    v = feature_observation(s, 0)
    assert v[12 + 3] == 1.0
    run(s, [(Action.NOOP, Action.NOOP)] * 20)
    v = feature_observation(s, 0)
    assert v[12 + 4] == 1.0  # cooked


def test_ready_soup_offset_tracks_ready_pot(pot_bench):
    from tests.test_dynamics import DEPOSIT, run

    s = reset(pot_bench, 0)
    assert tuple(feature_observation(s, 0)[31:33]) == (0.0, 0.0)
    run(s, DEPOSIT * 3)
    run(s, [(Action.NOOP, Action.NOOP)] * 20)
    v = feature_observation(s, 0)
    # Player 0 at (1,1); ready pot at (1,0).
    assert np.isclose(v[31], 0.0) and v[32] < 0


def test_partner_adjacent_cell_not_empty(cramped):
    s = reset(cramped, 0)  # players side by side at (1,2),(1,3)
    v0 = feature_observation(s, 0)
    assert v0[26] == 0.0  # right neighbor occupied by partner
    assert v0[24] == 1.0  # below is open floor


def test_egocentric_center_is_self(cramped):
    s = reset(cramped, 0)
    for i in (0, 1):
        w = egocentric_observation(s, i)
        assert w.shape == (EGO_WINDOW, EGO_WINDOW, EGO_CHANNELS)
        assert w[3, 3, 11] == 1.0


def test_egocentric_out_of_bounds_in_corners(cramped):
    s = reset(cramped, 0)
    w = egocentric_observation(s, 0)
    assert w[..., 6].sum() > 0


def _expected_window(state, player_index):
    """Independent per-cell world lookup for the egocentric window."""
    lay = state.layout
    me = state.players[player_index]
    partner = state.players[1 - player_index]
    rot = {
        0: lambda dr, dc: (dr, dc),
        1: lambda dr, dc: (-dr, -dc),
        2: lambda dr, dc: (-dc, dr),
        3: lambda dr, dc: (dc, -dr),
    }[me.orientation]
    out = np.zeros((7, 7, EGO_CHANNELS), dtype=np.float32)
    for wr in range(7):
        for wc in range(7):
            dr, dc = rot(wr - 3, wc - 3)
            r, c = me.position[0] + dr, me.position[1] + dc
            if not (0 <= r < lay.height and 0 <= c < lay.width):
                out[wr, wc, 6] = 1.0
                continue
            out[wr, wc, int(lay.grid[r, c])] = 1.0
            item = state.counter_items.get((r, c))
            if item is None:
                if (r, c) == me.position:
                    item = me.held
                elif (r, c) == partner.position:
                    item = partner.held
            if item is not None:
                out[wr, wc, 7 + item] = 1.0
            if (r, c) == partner.position:
                out[wr, wc, 10] = 1.0
            if (r, c) == me.position:
                out[wr, wc, 11] = 1.0
            if (r, c) in lay.pot_positions:
                out[wr, wc, 12 + int(state.pots[lay.pot_positions.index((r, c))].phase)] = 1.0
    return out


def test_egocentric_matches_brute_force_on_random_states():
    rng = np.random.default_rng(99)
    lay = get_layout("ring")
    s = reset(lay, 0)
    for _ in range(120):
        apply_step(s, rng.integers(0, 6, size=2))
        if s.step >= s.horizon - 1:
            s = reset(lay, int(rng.integers(1 << 30)))
        for i in (0, 1):
            np.testing.assert_array_equal(egocentric_observation(s, i), _expected_window(s, i))


def test_turning_rotates_window():
    """For a static world, the window after turning right is the 90-degree
    rotation of the window while facing up."""
    lay = get_layout("ring")
    s = reset(lay, 0)
    s.players[0].orientation = 0
    w_up = egocentric_observation(s, 0)
    s.players[0].orientation = 3
    w_right = egocentric_observation(s, 0)
    np.testing.assert_array_equal(w_right, np.rot90(w_up, k=1, axes=(0, 1)))
    s.players[0].orientation = 1
    np.testing.assert_array_equal(egocentric_observation(s, 0), np.rot90(w_up, k=2, axes=(0, 1)))


def test_render_topdown_deterministic_and_complete(cramped):
    s = reset(cramped, 4)
    f1 = render_topdown(s)
    f2 = render_topdown(s)
    assert f1 == f2
    assert (f1["width"], f1["height"]) == (cramped.width, cramped.height)
    assert len(f1["grid"]) == cramped.height
    assert all(len(row) == cramped.width for row in f1["grid"])


def test_render_pot_progress_fraction(pot_bench):
    from tests.test_dynamics import DEPOSIT, run

    s = reset(pot_bench, 0)
    run(s, DEPOSIT * 3)
    run(s, [(Action.NOOP, Action.NOOP)] * 10)
    f = render_topdown(s)
    assert f["pots"][0]["progress"] == 10 / 20
    assert f["pots"][0]["phase"] == "cooking"
