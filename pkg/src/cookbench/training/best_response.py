"""Stage-2 training: a single learner against a frozen partner pool."""

from __future__ import annotations

import numpy as np

from cookbench.agents.policy import ArchVariant, PolicyParams, init_policy, sample_actions
from cookbench.agents.spec import AgentSpec
from cookbench.env.core import CookingEnv
from cookbench.env.layout import get_layout
from cookbench.env.observations import FEATURE_LENGTH, feature_observation
from cookbench.rollout import run_pair_episodes
from cookbench.agents.actors import PolicyActor, make_actor

from .config import CheckpointInfo, RunRecord, TrainConfig, run_id_for
from .engine import _Learner, _Stream, _compute_returns
from .pool import CheckpointPool, PoolEntry


def measure_vs_pool(params: PolicyParams, pool: CheckpointPool, config: TrainConfig, seed: int) -> tuple[float, float]:
    """Mean (deliveries, return) over K episodes cycling partners and layouts
    round-robin; the learning-curve metric for best-response runs."""
    K = config.eval_episodes_per_checkpoint
    deliveries, returns = 0.0, 0.0
    for k in range(K):
        lay = get_layout(config.layouts[k % len(config.layouts)])
        entry = pool.entries[k % len(pool.entries)]
        stats = run_pair_episodes(
            lay,
            PolicyActor(params, stochastic=True),
            make_actor(entry.agent, stochastic=True),
            episodes=1,
            horizon=config.horizon,
            seed=int(np.random.SeedSequence([seed, 0xFEED, k]).generate_state(1)[0]),
            seat_of_a=k % 2,
        )
        deliveries += stats[0].deliveries
        returns += stats[0].episode_return
    return deliveries / K, returns / K


class _PartnerLane:
    """Frozen pool partner occupying one seat of one environment."""

    __slots__ = ("entry_idx", "seat", "frames")

    def __init__(self):
        self.entry_idx = -1
        self.seat = 1
        self.frames = None

    def assign(self, entry_idx: int, seat: int, stack: int):
        self.entry_idx = entry_idx
        self.seat = seat
        self.frames = np.zeros((stack, FEATURE_LENGTH), dtype=np.float32)

    def push_obs(self, state) -> np.ndarray:
        if self.frames.shape[0] > 1:
            self.frames[:-1] = self.frames[1:]
        feature_observation(state, self.seat, out=self.frames[-1])
        return self.frames.reshape(-1)


def train_best_response(
    pool: CheckpointPool,
    config: TrainConfig,
    seed: int,
    arch: ArchVariant | None = None,
    method: str = "FCP",
    init_from: PolicyParams | None = None,
    progress=None,
) -> AgentSpec:
    """Train one policy as the best response to the frozen pool.

    Each episode draws a partner uniformly from the pool and assigns the
    learner's seat per ``config.br_role_assignment`` ("random" or "alternate").
    Partner parameters are never touched. ``init_from`` warm-starts the learner
    from an existing policy (same architecture) instead of a fresh seeded
    initialization; ablation variants sharing one warm start stay comparable.
    """
    if len(pool.entries) == 0:
        raise ValueError("partner pool is empty")
    arch = arch or (init_from.arch if init_from is not None else ArchVariant(64, "reactive"))

    root = np.random.SeedSequence([seed, 0xB357])
    init_ss, draw_ss, action_ss, partner_action_ss, env_ss, eval_ss = root.spawn(6)
    learner_seed = int(init_ss.generate_state(1)[0]) % (1 << 31)
    if init_from is not None:
        if init_from.arch != arch:
            raise ValueError("init_from architecture does not match the learner architecture")
        start = init_from.clone()
        start.seed = init_from.seed
        start.step_trained = 0
        learner = _Learner(start, config)
    else:
        learner = _Learner(init_policy(arch, learner_seed), config)
    draw_rng = np.random.default_rng(draw_ss)
    action_rng = np.random.default_rng(action_ss)
    partner_rng = np.random.default_rng(partner_action_ss)
    env_rngs = [np.random.default_rng(s) for s in env_ss.spawn(config.n_envs)]
    eval_seed = int(eval_ss.generate_state(1)[0]) % (1 << 31)

    entries = pool.entries
    frozen_hashes = pool.weights_hashes()
    draw_counts = np.zeros(len(entries), dtype=np.int64)
    seat_counts = np.zeros(2, dtype=np.int64)

    layouts = [get_layout(config.layouts[e % len(config.layouts)]) for e in range(config.n_envs)]
    envs = [CookingEnv(layouts[e], horizon=config.horizon) for e in range(config.n_envs)]
    streams = [_Stream(e, 0) for e in range(config.n_envs)]
    partners = [_PartnerLane() for _ in range(config.n_envs)]

    def start_episode(e: int):
        envs[e].reset(int(env_rngs[e].integers(1 << 31)))
        entry_idx = int(draw_rng.integers(0, len(entries)))
        if config.br_role_assignment == "random":
            learner_seat = int(draw_rng.integers(0, 2))
        else:
            learner_seat = e % 2
        draw_counts[entry_idx] += 1
        seat_counts[learner_seat] += 1
        streams[e].seat = learner_seat
        streams[e].assign(0, arch.stack)
        streams[e].clear_segment()
        partners[e].assign(entry_idx, 1 - learner_seat, entries[entry_idx].agent.params.arch.stack)

    extra = {"pool": pool.source_runs, "variant": pool.variant}
    if init_from is not None:
        import hashlib

        extra["init"] = hashlib.sha256(init_from.weights.tobytes()).hexdigest()
    run_id = run_id_for(method, arch, config, seed, extra=extra)
    record = RunRecord(run_id=run_id, method=method, arch=arch, config=config, seed=seed)

    def checkpoint(step: int):
        frozen = learner.params.clone()
        frozen.step_trained = step
        d, r = measure_vs_pool(frozen, pool, config, seed=eval_seed + step)
        record.checkpoints.append(CheckpointInfo(step=step, params=frozen, selfplay_deliveries=d, selfplay_return=r))
        record.curve.append({"step": step, "mean_return": r, "mean_deliveries": d})
        if progress is not None:
            progress(step, [record])

    for e in range(config.n_envs):
        start_episode(e)
    checkpoint(0)

    pending: list[tuple] = []

    def close_segment(stream: _Stream, bootstrap: float):
        if not stream.actions:
            return
        returns = _compute_returns(stream.rewards, bootstrap, config.discount)
        pending.append((np.stack(stream.obs), np.array(stream.actions), returns))
        stream.clear_segment()

    global_step = 0
    chunk = config.n_envs * config.rollout_length
    for _ in range(config.total_steps // chunk):
        for _t in range(config.rollout_length):
            # Learner acts on all envs in one batch.
            X = np.stack([streams[e].push_obs(envs[e].state) for e in range(config.n_envs)])
            probs, values = learner.forward(X)
            learner_actions = sample_actions(probs, action_rng)
            for e in range(config.n_envs):
                streams[e].obs.append(X[e])
                streams[e].actions.append(int(learner_actions[e]))
                streams[e].values.append(float(values[e]))
            # Partners act, grouped by pool entry.
            partner_actions = np.empty(config.n_envs, dtype=np.int64)
            groups: dict[int, list[int]] = {}
            for e in range(config.n_envs):
                groups.setdefault(partners[e].entry_idx, []).append(e)
            for entry_idx, es in sorted(groups.items()):
                params = entries[entry_idx].agent.params
                Xp = np.stack([partners[e].push_obs(envs[e].state) for e in es])
                pprobs, _ = _forward_params(params, Xp)
                acts = sample_actions(pprobs, partner_rng)
                for k, e in enumerate(es):
                    partner_actions[e] = acts[k]

            for e in range(config.n_envs):
                if streams[e].seat == 0:
                    joint = (int(learner_actions[e]), int(partner_actions[e]))
                else:
                    joint = (int(partner_actions[e]), int(learner_actions[e]))
                outcome = envs[e].step(joint)
                streams[e].rewards.append(outcome.rewards[0] * config.reward_scale)
                if outcome.done:
                    close_segment(streams[e], bootstrap=0.0)
                    start_episode(e)
            global_step += config.n_envs

        open_ids = [e for e in range(config.n_envs) if streams[e].actions]
        if open_ids:
            Xb = np.stack([streams[e].peek_obs(envs[e].state) for e in open_ids])
            _, vboot = learner.forward(Xb)
            for k, e in enumerate(open_ids):
                close_segment(streams[e], bootstrap=float(vboot[k]))
        if pending:
            Xu = np.concatenate([seg[0] for seg in pending])
            au = np.concatenate([seg[1] for seg in pending])
            ru = np.concatenate([seg[2] for seg in pending])
            learner.update(Xu, au, ru, entropy_coef=learner.entropy_coef(global_step))
            learner.params.step_trained = global_step
            pending = []
        if global_step % config.checkpoint_every == 0:
            checkpoint(global_step)

    if pool.weights_hashes() != frozen_hashes:
        raise RuntimeError("partner pool weights changed during best-response training")

    final = record.final_checkpoint
    provenance = {
        "run_id": run_id,
        "checkpoint_index": len(record.checkpoints) - 1,
        "stage1_runs": list(pool.source_runs),
        "pool_variant": pool.variant,
        "seed": seed,
        "curve": record.curve,
        "partner_draw_counts": draw_counts.tolist(),
        "learner_seat_counts": seat_counts.tolist(),
    }
    if init_from is not None:
        provenance["init_seed"] = int(init_from.seed)
    return AgentSpec(
        id=run_id,
        method=method,
        params=final.params,
        provenance=provenance,
    )


def _forward_params(params: PolicyParams, X: np.ndarray):
    from cookbench.agents import net

    logits, values, _, _ = net.forward(params.weights, X, params.obs_length, params.arch.hidden_width)
    return net.softmax(logits), values


def train_bcp(bc_partner: AgentSpec, config: TrainConfig, seed: int, arch: ArchVariant | None = None, progress=None) -> AgentSpec:
    """Best response to a single frozen behavioral-cloning partner."""
    if bc_partner.method != "BC":
        raise ValueError("train_bcp requires a BC partner")
    if bc_partner.provenance.get("split") not in (None, "partner"):
        raise ValueError("BCP must train against the 'partner' split model, not the evaluation proxy")
    pool = CheckpointPool(
        entries=[PoolEntry(agent=bc_partner, selfplay_reward=float("nan"), stage="final")],
        source_runs=[bc_partner.id],
        variant="FCP",
    )
    return train_best_response(pool, config, seed, arch=arch, method="BCP", progress=progress)
