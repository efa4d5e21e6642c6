"""Behavioral cloning from episode logs.

Logs are re-simulated to recover the feature observation both seats saw before
each action; a single policy network conditioned on the layout one-hot is
trained with cross-entropy. Training keeps the parameter snapshot with peak
self-play reward, evaluated after every epoch.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from cookbench.env.episode import EpisodeLog, resimulate
from cookbench.env.layout import get_layout
from cookbench.env.observations import feature_observation
from cookbench.env.core import reset, apply_step
from cookbench.rollout import run_pair_episodes

from . import net
from .actors import PolicyActor
from .policy import ArchVariant, init_policy
from .spec import AgentSpec

SPLITS = ("partner", "proxy")


@dataclass
class BCHyper:
    batch_size: int = 256
    learning_rate: float = 3e-4
    epochs: int = 80
    eval_episodes: int = 4
    eval_horizon: int = 200
    arch: ArchVariant = field(default_factory=lambda: ArchVariant(64, "reactive"))
    seed: int = 0


def select_split(trajectories: list[EpisodeLog], split: str) -> list[EpisodeLog]:
    """Deterministic disjoint halves: per layout, even trajectory indices go to
    'partner' and odd ones to 'proxy'."""
    if split not in SPLITS:
        raise ValueError(f"split must be one of {SPLITS}, got {split!r}")
    seen_per_layout: dict[str, int] = {}
    picked = []
    want = 0 if split == "partner" else 1
    for log in trajectories:
        idx = seen_per_layout.get(log.layout, 0)
        seen_per_layout[log.layout] = idx + 1
        if idx % 2 == want:
            picked.append(log)
    return picked


def dataset_from_logs(logs: list[EpisodeLog]) -> tuple[np.ndarray, np.ndarray]:
    """(features, actions) for both seats at every step, via re-simulation."""
    X, y = [], []
    for log in logs:
        layout = get_layout(log.layout)
        state = reset(layout, log.seed, log.horizon)
        for rec in log.steps:
            for seat in (0, 1):
                X.append(feature_observation(state, seat))
                y.append(rec["actions"][seat])
            apply_step(state, rec["actions"])
    if not X:
        raise ValueError("empty trajectory split")
    return np.stack(X), np.array(y, dtype=np.int64)


def _selfplay_reward(params, layouts: list[str], hyper: BCHyper, seed: int) -> float:
    total = 0.0
    for i in range(hyper.eval_episodes):
        lay = get_layout(layouts[i % len(layouts)])
        stats = run_pair_episodes(
            lay,
            PolicyActor(params, stochastic=True),
            PolicyActor(params, stochastic=True),
            episodes=1,
            horizon=hyper.eval_horizon,
            seed=int(np.random.SeedSequence([seed, 0xBC, i]).generate_state(1)[0]),
        )
        total += stats[0].episode_return
    return total / hyper.eval_episodes


def bc_fit(trajectories: list[EpisodeLog], split: str, hyper: BCHyper | None = None) -> AgentSpec:
    """Train a BC policy on one half of the trajectories.

    Stops at the epoch snapshot with peak self-play reward. The returned spec
    records the split so BCP training can refuse the evaluation proxy.
    """
    hyper = hyper or BCHyper()
    if hyper.arch.memory != "reactive":
        raise ValueError("behavioral cloning uses the reactive architecture")
    logs = select_split(trajectories, split)
    if not logs:
        raise ValueError(f"no trajectories in split {split!r}")
    layouts = sorted({log.layout for log in logs})
    X, y = dataset_from_logs(logs)

    params = init_policy(hyper.arch, hyper.seed)
    opt = net.Adam(len(params.weights), lr=hyper.learning_rate)
    rng = np.random.default_rng(np.random.SeedSequence([hyper.seed, 0x5C]))
    obs_len, hidden = params.obs_length, params.arch.hidden_width
    if X.shape[1] != obs_len:
        raise ValueError(f"feature length {X.shape[1]} does not match the arch ({obs_len})")

    best_params = params.clone()
    best_reward = _selfplay_reward(params, layouts, hyper, seed=hyper.seed)
    n = len(X)
    for epoch in range(hyper.epochs):
        order = rng.permutation(n)
        for lo in range(0, n, hyper.batch_size):
            idx = order[lo : lo + hyper.batch_size]
            xb, yb = X[idx], y[idx]
            logits, _, h1, h2 = net.forward(params.weights, xb, obs_len, hidden)
            probs = net.softmax(logits)
            onehot = np.zeros_like(probs)
            onehot[np.arange(len(yb)), yb] = 1.0
            d_logits = (probs - onehot) / len(yb)
            d_values = np.zeros(len(yb), dtype=np.float32)
            grad = net.backward(params.weights, xb, h1, h2, d_logits, d_values, obs_len, hidden)
            opt.step(params.weights, grad)
        params.step_trained = (epoch + 1) * n
        reward = _selfplay_reward(params, layouts, hyper, seed=hyper.seed + epoch + 1)
        if reward > best_reward:
            best_reward = reward
            best_params = params.clone()

    return AgentSpec(
        id=f"bc-{split}-{hyper.seed}",
        method="BC",
        params=best_params,
        provenance={
            "split": split,
            "n_trajectories": len(logs),
            "n_samples": int(n),
            "layouts": layouts,
            "peak_selfplay_reward": best_reward,
        },
    )


def action_agreement(spec: AgentSpec, logs: list[EpisodeLog]) -> float:
    """Fraction of steps where the BC argmax action matches the logged action."""
    X, y = dataset_from_logs(logs)
    logits, _, _, _ = net.forward(spec.params.weights, X, spec.params.obs_length, spec.params.arch.hidden_width)
    return float(np.mean(logits.argmax(axis=1) == y))
