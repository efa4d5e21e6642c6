"""Training configuration and run records."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field

from cookbench.agents.policy import ArchVariant, PolicyParams
from cookbench.env.layout import SHIPPED_LAYOUTS


@dataclass(frozen=True)
class TrainConfig:
    total_steps: int = 2_000_000
    checkpoint_every: int = 100_000
    population_size: int = 8
    discount: float = 0.99
    learning_rate: float = 1e-4
    entropy_bonus: float = 0.01
    entropy_bonus_final: float | None = None  # None: constant; else linear anneal
    rollout_length: int = 20
    eval_episodes_per_checkpoint: int = 20
    horizon: int = 300
    layouts: tuple[str, ...] = SHIPPED_LAYOUTS
    n_envs: int = 20
    value_loss_coef: float = 0.5
    max_grad_norm: float = 1.0
    reward_scale: float = 0.05
    normalize_advantage: bool = True
    br_role_assignment: str = "random"  # learner seat per episode in stage 2

    def __post_init__(self):
        if self.population_size < 1:
            raise ValueError("population_size must be >= 1")
        if not (0.0 < self.discount <= 1.0):
            raise ValueError("discount must be in (0, 1]")
        if self.total_steps % self.checkpoint_every != 0:
            raise ValueError("checkpoint_every must divide total_steps")
        chunk = self.n_envs * self.rollout_length
        if self.checkpoint_every % chunk != 0:
            raise ValueError(
                f"checkpoint_every ({self.checkpoint_every}) must be a multiple of "
                f"n_envs*rollout_length ({chunk}) so checkpoints land on the exact schedule"
            )
        if not self.layouts:
            raise ValueError("at least one layout is required")

    def replace(self, **kw) -> "TrainConfig":
        d = asdict(self)
        d.update(kw)
        d["layouts"] = tuple(d["layouts"])
        return TrainConfig(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["layouts"] = list(self.layouts)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        d = dict(d)
        d["layouts"] = tuple(d.get("layouts", SHIPPED_LAYOUTS))
        return cls(**d)


@dataclass
class CheckpointInfo:
    step: int
    params: PolicyParams
    selfplay_deliveries: float
    selfplay_return: float

    @property
    def selfplay_reward(self) -> float:
        """Measured self-play reward used by the checkpoint filter (mean
        deliveries over the evaluation episodes)."""
        return self.selfplay_deliveries

    def to_dict(self) -> dict:
        return {
            "step": self.step,
            "params": self.params.to_dict(),
            "selfplay_deliveries": self.selfplay_deliveries,
            "selfplay_return": self.selfplay_return,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CheckpointInfo":
        return cls(
            step=d["step"],
            params=PolicyParams.from_dict(d["params"]),
            selfplay_deliveries=d["selfplay_deliveries"],
            selfplay_return=d["selfplay_return"],
        )


@dataclass
class RunRecord:
    run_id: str
    method: str
    arch: ArchVariant
    config: TrainConfig
    seed: int
    curve: list[dict] = field(default_factory=list)
    checkpoints: list[CheckpointInfo] = field(default_factory=list)
    pairing_counts: list | None = None  # N x N episode pair draws (population runs)

    @property
    def final_checkpoint(self) -> CheckpointInfo:
        return self.checkpoints[-1]

    def to_dict(self) -> dict:
        return {
            "format": 1,
            "run_id": self.run_id,
            "method": self.method,
            "arch": self.arch.to_dict(),
            "config": self.config.to_dict(),
            "seed": self.seed,
            "curve": self.curve,
            "checkpoints": [c.to_dict() for c in self.checkpoints],
            "pairing_counts": self.pairing_counts,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        return cls(
            run_id=d["run_id"],
            method=d["method"],
            arch=ArchVariant.from_dict(d["arch"]),
            config=TrainConfig.from_dict(d["config"]),
            seed=d["seed"],
            curve=d["curve"],
            checkpoints=[CheckpointInfo.from_dict(c) for c in d["checkpoints"]],
            pairing_counts=d.get("pairing_counts"),
        )


def run_id_for(method: str, arch: ArchVariant, config: TrainConfig, seed: int, extra: dict | None = None) -> str:
    payload = {
        "method": method,
        "arch": arch.to_dict(),
        "config": config.to_dict(),
        "seed": seed,
        "extra": extra or {},
    }
    digest = hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()
    return f"{method.lower()}-{seed}-{digest[:10]}"
