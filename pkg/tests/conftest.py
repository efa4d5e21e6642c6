import pytest

from cookbench.env import get_layout, load_layout

# Tiny kitchen where player 0 spawns adjacent to both the tomato station and
# the pot, so deposits need no walking: Up+Interact takes, Left+Interact deposits.
POT_BENCH = """\
#T###
P1.X#
#2.D#
#####
"""

# Open 4x3 floor used for exhaustive movement-collision enumeration.
OPEN_FLOOR = """\
#TDPX#
#....#
#.12.#
#....#
######
"""


@pytest.fixture(scope="session")
def pot_bench():
    return load_layout(POT_BENCH, name="pot_bench")


@pytest.fixture(scope="session")
def open_floor():
    return load_layout(OPEN_FLOOR, name="open_floor")


@pytest.fixture(scope="session")
def cramped():
    return get_layout("cramped")
