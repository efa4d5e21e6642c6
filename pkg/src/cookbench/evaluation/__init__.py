from .behavior import BehaviorStats, aggregate_behavior, behavior_stats, write_behavior_csv
from .crossplay import EPISODES_PER_CELL, EVAL_HORIZON, EvalReport, cross_play, mean_ci95
from .heldout import HeldOutOverlap, HeldOutPopulation, build_heldout, check_disjoint, diverse_sp_arch_plan
from .preferences import PreferenceMatrix, preference_aggregate
from .tables import ABLATION_COLUMNS, ABLATION_ROWS, ablation_table, sweep_table

__all__ = [
    "ABLATION_COLUMNS",
    "ABLATION_ROWS",
    "BehaviorStats",
    "EPISODES_PER_CELL",
    "EVAL_HORIZON",
    "EvalReport",
    "HeldOutOverlap",
    "HeldOutPopulation",
    "PreferenceMatrix",
    "ablation_table",
    "aggregate_behavior",
    "behavior_stats",
    "build_heldout",
    "check_disjoint",
    "cross_play",
    "diverse_sp_arch_plan",
    "mean_ci95",
    "preference_aggregate",
    "sweep_table",
    "write_behavior_csv",
]
