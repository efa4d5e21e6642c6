"""Advantage actor-critic co-training engine.

One engine covers self-play (N=1) and population play (N>1): every episode,
each environment draws a seat pair uniformly with replacement from the live
population, and every sampled policy learns from its own seat's experience.
n-step returns bootstrap at rollout-chunk cuts and terminate at the fixed
episode horizon.
"""

from __future__ import annotations

import numpy as np

from cookbench.agents import net
from cookbench.agents.actors import PolicyActor
from cookbench.agents.policy import ArchVariant, PolicyParams, init_policy, sample_actions
from cookbench.env.core import CookingEnv
from cookbench.env.layout import get_layout
from cookbench.env.observations import FEATURE_LENGTH, feature_observation
from cookbench.rollout import run_pair_episodes

from .config import CheckpointInfo, RunRecord, TrainConfig, run_id_for


class TrainingDiverged(RuntimeError):
    """Raised when a policy or value loss stops being finite."""


class _Stream:
    """One (env, seat) lane: frame stack plus the open trajectory segment."""

    __slots__ = ("env_idx", "seat", "policy_idx", "frames", "obs", "actions", "rewards", "values")

    def __init__(self, env_idx: int, seat: int):
        self.env_idx = env_idx
        self.seat = seat
        self.policy_idx = -1
        self.frames = None
        self.obs: list[np.ndarray] = []
        self.actions: list[int] = []
        self.rewards: list[float] = []
        self.values: list[float] = []

    def assign(self, policy_idx: int, stack: int):
        self.policy_idx = policy_idx
        self.frames = np.zeros((stack, FEATURE_LENGTH), dtype=np.float32)

    def push_obs(self, state) -> np.ndarray:
        if self.frames.shape[0] > 1:
            self.frames[:-1] = self.frames[1:]
        feature_observation(state, self.seat, out=self.frames[-1])
        return self.frames.reshape(-1).copy()

    def peek_obs(self, state) -> np.ndarray:
        """Next-step observation for bootstrapping, without mutating the stack."""
        if self.frames.shape[0] == 1:
            return feature_observation(state, self.seat)
        stacked = np.concatenate([self.frames[1:].reshape(-1), feature_observation(state, self.seat)])
        return stacked.astype(np.float32)

    def clear_segment(self):
        self.obs = []
        self.actions = []
        self.rewards = []
        self.values = []


def _compute_returns(rewards, bootstrap, discount):
    out = np.empty(len(rewards), dtype=np.float32)
    acc = bootstrap
    for t in range(len(rewards) - 1, -1, -1):
        acc = rewards[t] + discount * acc
        out[t] = acc
    return out


class _Learner:
    """Parameters + optimizer + gradient step for one policy."""

    def __init__(self, params: PolicyParams, config: TrainConfig):
        self.params = params
        self.config = config
        self.opt = net.Adam(len(params.weights), lr=config.learning_rate)
        self.obs_len = params.obs_length
        self.hidden = params.arch.hidden_width

    def forward(self, X):
        logits, values, _, _ = net.forward(self.params.weights, X, self.obs_len, self.hidden)
        return net.softmax(logits), values

    def entropy_coef(self, global_step: int) -> float:
        cfg = self.config
        if cfg.entropy_bonus_final is None:
            return cfg.entropy_bonus
        frac = min(global_step / max(cfg.total_steps, 1), 1.0)
        return cfg.entropy_bonus + (cfg.entropy_bonus_final - cfg.entropy_bonus) * frac

    def update(self, X, actions, returns, entropy_coef: float | None = None):
        cfg = self.config
        if entropy_coef is None:
            entropy_coef = cfg.entropy_bonus
        with np.errstate(over="ignore", invalid="ignore"):
            logits, values, h1, h2 = net.forward(self.params.weights, X, self.obs_len, self.hidden)
            probs = net.softmax(logits)
            logp = np.log(np.maximum(probs, 1e-12))
            entropy = -(probs * logp).sum(axis=1)
            adv = returns - values
            policy_loss = float(np.mean(-logp[np.arange(len(actions)), actions] * adv))
            value_loss = float(0.5 * np.mean((values - returns) ** 2))
        if not (np.isfinite(policy_loss) and np.isfinite(value_loss)):
            raise TrainingDiverged(f"non-finite loss at step_trained={self.params.step_trained}")
        if cfg.normalize_advantage:
            adv = (adv - adv.mean()) / (adv.std() + 1e-8)

        B = len(actions)
        onehot = np.zeros_like(probs)
        onehot[np.arange(B), actions] = 1.0
        d_logits = (probs - onehot) * adv[:, None]
        d_logits += entropy_coef * probs * (logp + entropy[:, None])
        d_logits /= B
        d_values = cfg.value_loss_coef * (values - returns) / B
        grad = net.backward(self.params.weights, X, h1, h2, d_logits.astype(np.float32), d_values.astype(np.float32), self.obs_len, self.hidden)
        net.clip_global_norm(grad, cfg.max_grad_norm)
        self.opt.step(self.params.weights, grad)
        return policy_loss, value_loss


def measure_selfplay(params: PolicyParams, config: TrainConfig, seed: int) -> tuple[float, float]:
    """Frozen self-play measurement: K episodes spread round-robin across the
    configured layouts; returns (mean deliveries, mean return)."""
    K = config.eval_episodes_per_checkpoint
    layouts = [get_layout(name) for name in config.layouts]
    counts = [K // len(layouts)] * len(layouts)
    for i in range(K % len(layouts)):
        counts[i] += 1
    deliveries, returns, total = 0.0, 0.0, 0
    for i, lay in enumerate(layouts):
        if counts[i] == 0:
            continue
        stats = run_pair_episodes(
            lay,
            PolicyActor(params, stochastic=True),
            PolicyActor(params, stochastic=True),
            episodes=counts[i],
            horizon=config.horizon,
            seed=int(np.random.SeedSequence([seed, 0xC0FFEE, i]).generate_state(1)[0]),
        )
        for st in stats:
            deliveries += st.deliveries
            returns += st.episode_return
            total += 1
    return deliveries / total, returns / total


def co_train(
    config: TrainConfig,
    archs: list[ArchVariant],
    seed: int,
    method: str,
    progress=None,
) -> list[RunRecord]:
    """Train ``N = config.population_size`` policies (arch per policy) with
    with-replacement pairing. Returns one RunRecord per policy."""
    N = config.population_size
    if len(archs) != N:
        raise ValueError(f"need {N} arch entries, got {len(archs)}")

    root = np.random.SeedSequence(seed)
    policy_seed_ss, pair_ss, action_ss, env_ss, eval_ss = root.spawn(5)
    policy_seeds = [int(s.generate_state(1)[0]) % (1 << 31) for s in policy_seed_ss.spawn(N)]
    learners = [_Learner(init_policy(archs[i], policy_seeds[i]), config) for i in range(N)]
    pair_rng = np.random.default_rng(pair_ss)
    action_rngs = [np.random.default_rng(s) for s in action_ss.spawn(N)]
    env_rngs = [np.random.default_rng(s) for s in env_ss.spawn(config.n_envs)]
    eval_seed = int(eval_ss.generate_state(1)[0]) % (1 << 31)

    layouts = [get_layout(config.layouts[e % len(config.layouts)]) for e in range(config.n_envs)]
    envs = [CookingEnv(layouts[e], horizon=config.horizon) for e in range(config.n_envs)]
    streams = [_Stream(e, s) for e in range(config.n_envs) for s in (0, 1)]

    pairing_counts = np.zeros((N, N), dtype=np.int64)

    def start_episode(e: int):
        envs[e].reset(int(env_rngs[e].integers(1 << 31)))
        i, j = (int(x) for x in pair_rng.integers(0, N, size=2))
        pairing_counts[i, j] += 1
        streams[2 * e].assign(i, archs[i].stack)
        streams[2 * e + 1].assign(j, archs[j].stack)
        streams[2 * e].clear_segment()
        streams[2 * e + 1].clear_segment()

    records = [
        RunRecord(
            run_id=run_id_for(method, archs[i], config, policy_seeds[i]),
            method=method,
            arch=archs[i],
            config=config,
            seed=policy_seeds[i],
            curve=[],
            checkpoints=[],
        )
        for i in range(N)
    ]

    def checkpoint_all(step: int):
        for i, learner in enumerate(learners):
            frozen = learner.params.clone()
            frozen.step_trained = step
            d, r = measure_selfplay(frozen, config, seed=eval_seed + 7919 * i + step)
            records[i].checkpoints.append(
                CheckpointInfo(step=step, params=frozen, selfplay_deliveries=d, selfplay_return=r)
            )
            records[i].curve.append({"step": step, "mean_return": r, "mean_deliveries": d})
        if progress is not None:
            progress(step, records)

    for e in range(config.n_envs):
        start_episode(e)
    checkpoint_all(0)

    # Per-policy segment batches closed during the current chunk.
    pending: list[list[tuple]] = [[] for _ in range(N)]

    def close_segment(stream: _Stream, bootstrap: float):
        if not stream.actions:
            return
        returns = _compute_returns(stream.rewards, bootstrap, config.discount)
        pending[stream.policy_idx].append((np.stack(stream.obs), np.array(stream.actions), returns))
        stream.clear_segment()

    global_step = 0
    chunk = config.n_envs * config.rollout_length
    n_chunks = config.total_steps // chunk
    for _ in range(n_chunks):
        for _t in range(config.rollout_length):
            # Group streams by policy and act.
            groups: dict[int, list[int]] = {}
            for sid, stream in enumerate(streams):
                groups.setdefault(stream.policy_idx, []).append(sid)
            actions = np.empty(len(streams), dtype=np.int64)
            for p, sids in sorted(groups.items()):
                X = np.stack([streams[sid].push_obs(envs[streams[sid].env_idx].state) for sid in sids])
                probs, values = learners[p].forward(X)
                acts = sample_actions(probs, action_rngs[p])
                for k, sid in enumerate(sids):
                    actions[sid] = acts[k]
                    streams[sid].obs.append(X[k])
                    streams[sid].actions.append(int(acts[k]))
                    streams[sid].values.append(float(values[k]))
            # Step environments.
            for e in range(config.n_envs):
                outcome = envs[e].step((actions[2 * e], actions[2 * e + 1]))
                r = outcome.rewards[0] * config.reward_scale
                streams[2 * e].rewards.append(r)
                streams[2 * e + 1].rewards.append(r)
                if outcome.done:
                    close_segment(streams[2 * e], bootstrap=0.0)
                    close_segment(streams[2 * e + 1], bootstrap=0.0)
                    start_episode(e)
            global_step += config.n_envs

        # Bootstrap open segments at the chunk cut.
        open_groups: dict[int, list[int]] = {}
        for sid, stream in enumerate(streams):
            if stream.actions:
                open_groups.setdefault(stream.policy_idx, []).append(sid)
        for p, sids in sorted(open_groups.items()):
            X = np.stack([streams[sid].peek_obs(envs[streams[sid].env_idx].state) for sid in sids])
            _, values = learners[p].forward(X)
            for k, sid in enumerate(sids):
                close_segment(streams[sid], bootstrap=float(values[k]))

        for p in range(N):
            if pending[p]:
                X = np.concatenate([seg[0] for seg in pending[p]])
                acts = np.concatenate([seg[1] for seg in pending[p]])
                rets = np.concatenate([seg[2] for seg in pending[p]])
                learners[p].update(X, acts, rets, entropy_coef=learners[p].entropy_coef(global_step))
                learners[p].params.step_trained = global_step
                pending[p] = []

        if global_step % config.checkpoint_every == 0:
            checkpoint_all(global_step)

    counts = pairing_counts.tolist()
    for rec in records:
        rec.pairing_counts = counts
    return records


def train_self_play(config: TrainConfig, arch: ArchVariant, seed: int, progress=None) -> RunRecord:
    """One policy trained with both seats under its own control."""
    cfg = config.replace(population_size=1)
    return co_train(cfg, [arch], seed, method="SP", progress=progress)[0]


def train_population_play(config: TrainConfig, seed: int, arch: ArchVariant | None = None, progress=None) -> list[RunRecord]:
    """Co-train a population of ``config.population_size`` policies."""
    arch = arch or ArchVariant(64, "reactive")
    return co_train(config, [arch] * config.population_size, seed, method="PP", progress=progress)
