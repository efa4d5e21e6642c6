from .core import (
    COOK_TIME,
    DEFAULT_HORIZON,
    DELIVERY_REWARD,
    DEPOSIT_REWARD,
    NUM_ACTIONS,
    Action,
    ContractViolation,
    CookingEnv,
    Item,
    PlayerState,
    PotPhase,
    PotState,
    StepOutcome,
    WorldState,
    apply_step,
    reset,
    step,
)
from .episode import EpisodeLog, record_episode, resimulate, verify_replay
from .layout import SHIPPED_LAYOUTS, CellKind, Layout, LayoutError, get_layout, load_layout, load_layout_file, shipped_layouts
from .observations import (
    EGO_CHANNELS,
    EGO_WINDOW,
    FEATURE_LENGTH,
    egocentric_observation,
    feature_observation,
    render_topdown,
)

__all__ = [
    "Action",
    "CellKind",
    "ContractViolation",
    "CookingEnv",
    "COOK_TIME",
    "DEFAULT_HORIZON",
    "DELIVERY_REWARD",
    "DEPOSIT_REWARD",
    "EGO_CHANNELS",
    "EGO_WINDOW",
    "EpisodeLog",
    "FEATURE_LENGTH",
    "Item",
    "Layout",
    "LayoutError",
    "NUM_ACTIONS",
    "PlayerState",
    "PotPhase",
    "PotState",
    "SHIPPED_LAYOUTS",
    "StepOutcome",
    "WorldState",
    "apply_step",
    "egocentric_observation",
    "feature_observation",
    "get_layout",
    "load_layout",
    "load_layout_file",
    "record_episode",
    "render_topdown",
    "reset",
    "resimulate",
    "shipped_layouts",
    "step",
    "verify_replay",
]
