"""Policy representations: architecture variants, seeded parameters, action selection."""

from __future__ import annotations

import base64
from dataclasses import dataclass

import numpy as np

from cookbench.env.observations import FEATURE_LENGTH

from . import net


@dataclass(frozen=True)
class ArchVariant:
    """One of the four partner architectures: width {16, 64} x memory
    {reactive, 4-frame stacking}."""

    hidden_width: int = 64
    memory: str = "reactive"  # "reactive" | "framestack"
    frames: int = 4

    def __post_init__(self):
        if self.hidden_width not in (16, 64):
            raise ValueError(f"hidden_width must be 16 or 64, got {self.hidden_width}")
        if self.memory not in ("reactive", "framestack"):
            raise ValueError(f"memory must be 'reactive' or 'framestack', got {self.memory!r}")

    @property
    def stack(self) -> int:
        return self.frames if self.memory == "framestack" else 1

    def obs_length(self, base_length: int = FEATURE_LENGTH) -> int:
        return base_length * self.stack

    def to_dict(self) -> dict:
        return {"hidden_width": self.hidden_width, "memory": self.memory, "frames": self.frames}

    @classmethod
    def from_dict(cls, d: dict) -> "ArchVariant":
        return cls(hidden_width=d["hidden_width"], memory=d["memory"], frames=d.get("frames", 4))


ARCH_VARIANTS = (
    ArchVariant(16, "reactive"),
    ArchVariant(64, "reactive"),
    ArchVariant(16, "framestack"),
    ArchVariant(64, "framestack"),
)


def param_length(arch: ArchVariant, base_length: int = FEATURE_LENGTH) -> int:
    return net.param_length(arch.obs_length(base_length), arch.hidden_width)


@dataclass
class PolicyParams:
    arch: ArchVariant
    seed: int
    weights: np.ndarray
    step_trained: int = 0

    @property
    def obs_length(self) -> int:
        return self.arch.obs_length()

    def clone(self) -> "PolicyParams":
        return PolicyParams(self.arch, self.seed, self.weights.copy(), self.step_trained)

    def to_dict(self) -> dict:
        return {
            "format": 1,
            "arch": self.arch.to_dict(),
            "seed": self.seed,
            "step_trained": self.step_trained,
            "dtype": "float32",
            "weights_b64": base64.b64encode(np.ascontiguousarray(self.weights).tobytes()).decode("ascii"),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PolicyParams":
        if d.get("format") != 1:
            raise ValueError(f"unsupported checkpoint format {d.get('format')!r}")
        arch = ArchVariant.from_dict(d["arch"])
        weights = np.frombuffer(base64.b64decode(d["weights_b64"]), dtype=np.float32).copy()
        expected = param_length(arch)
        if len(weights) != expected:
            raise ValueError(f"weight vector has length {len(weights)}, expected {expected}")
        return cls(arch=arch, seed=d["seed"], weights=weights, step_trained=d["step_trained"])


def init_policy(arch: ArchVariant, seed: int) -> PolicyParams:
    """Deterministic seeded initialization; the arch participates in the stream
    so variants with the same seed still get independent draws."""
    ss = np.random.SeedSequence([int(seed), arch.hidden_width, arch.stack])
    rng = np.random.default_rng(ss)
    weights = net.init_params(arch.obs_length(), arch.hidden_width, rng)
    return PolicyParams(arch=arch, seed=int(seed), weights=weights, step_trained=0)


def forward_batch(params: PolicyParams, obs: np.ndarray):
    """(B, obs_len) -> (probs (B,6), values (B,))."""
    if obs.ndim != 2 or obs.shape[1] != params.obs_length:
        raise ValueError(f"observation batch shape {obs.shape} does not match obs_length {params.obs_length}")
    logits, values, _, _ = net.forward(params.weights, obs, params.obs_length, params.arch.hidden_width)
    return net.softmax(logits), values


def act(params: PolicyParams, observation: np.ndarray, stochastic: bool, rng: np.random.Generator | None = None):
    """Select an action for one observation.

    Returns (action, distribution over 6 actions, value estimate). Stochastic
    selection samples via ``rng``; deterministic selection is the argmax with
    the lowest action index winning ties.
    """
    obs = np.asarray(observation, dtype=np.float32)
    if obs.shape != (params.obs_length,):
        raise ValueError(f"observation shape {obs.shape} does not match obs_length {params.obs_length}")
    probs, values = forward_batch(params, obs[None, :])
    dist = probs[0]
    if stochastic:
        if rng is None:
            raise ValueError("stochastic action selection requires an rng")
        action = sample_actions(probs, rng)[0]
    else:
        action = int(np.argmax(dist))  # argmax returns the first (lowest) index on ties
    return int(action), dist, float(values[0])


def sample_actions(probs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Vectorized categorical sampling, one draw per row."""
    u = rng.random(probs.shape[0])
    cdf = np.cumsum(probs, axis=1)
    # Guard the last column against rounding shortfall.
    cdf[:, -1] = 1.0
    return (u[:, None] < cdf).argmax(axis=1)
