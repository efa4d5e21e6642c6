from .best_response import measure_vs_pool, train_bcp, train_best_response
from .config import CheckpointInfo, RunRecord, TrainConfig, run_id_for
from .engine import TrainingDiverged, co_train, measure_selfplay, train_population_play, train_self_play
from .pool import FCP_VARIANTS, CheckpointPool, PoolEntry, build_fcp_pool, filter_checkpoints, stage1_arch_plan

__all__ = [
    "CheckpointInfo",
    "CheckpointPool",
    "FCP_VARIANTS",
    "PoolEntry",
    "RunRecord",
    "TrainConfig",
    "TrainingDiverged",
    "build_fcp_pool",
    "co_train",
    "filter_checkpoints",
    "measure_selfplay",
    "measure_vs_pool",
    "run_id_for",
    "stage1_arch_plan",
    "train_bcp",
    "train_best_response",
    "train_population_play",
    "train_self_play",
]
