"""Population-size sweep: the full two-stage pipeline per size."""

from __future__ import annotations

from cookbench.agents.policy import ArchVariant
from cookbench.agents.spec import AgentSpec
from cookbench.evaluation.crossplay import cross_play
from cookbench.evaluation.heldout import build_heldout

from .config import TrainConfig
from .pool import stage1_arch_plan


def _train_one_br(store_root: str, pool, cfg, seed: int, init_from=None):
    from cookbench.harness.stages import ensure_br_agent
    from cookbench.harness.store import ArtifactStore

    return ensure_br_agent(ArtifactStore(store_root), pool, cfg, seed, method="FCP", init_from=init_from)


def population_size_sweep(
    sizes: list[int],
    config: TrainConfig,
    seeds: list[int] | None = None,
    store=None,
    proxy: AgentSpec | None = None,
    stage1_seed_base: int = 9001,
    br_config: TrainConfig | None = None,
    init_from=None,
    eval_episodes: int = 10,
    eval_horizon: int = 540,
    n_workers: int = 1,
    progress=None,
) -> dict:
    """For each population size, build the partner pool and train best
    responses for each seed, then evaluate against a fixed proxy partner.

    Stage-1 runs are shared across sizes (size N uses the first N partners),
    mirroring how the ablations share stage-1 training. ``br_config`` lets the
    stage-2 budget differ from stage 1. Returns the sweep table; the size
    trend is reported, not asserted.
    """
    from cookbench.harness.stages import ensure_fcp_pool, ensure_sp_run
    from cookbench.harness.store import ArtifactStore

    if sorted(sizes) != list(sizes):
        raise ValueError("sizes must be sorted ascending")
    seeds = seeds or [1, 2, 3, 4, 5]
    store = store or ArtifactStore()
    br_config = br_config or config
    say = progress or (lambda msg: None)
    if proxy is None:
        proxy = AgentSpec(
            id="scripted-sloppy-proxy",
            method="Scripted",
            script={"style": "sloppy", "epsilon": 0.5, "seed": 0},
        )
    population = build_heldout("HumanProxy", proxy=proxy)

    n_max = max(sizes)
    archs = stage1_arch_plan("FCP", n_max)
    runs = []
    for i in range(n_max):
        say(f"sweep stage 1: partner {i + 1}/{n_max}")
        runs.append(ensure_sp_run(store, config, archs[i], stage1_seed_base + i))

    jobs = []
    pools = {}
    for n in sizes:
        pools[n] = ensure_fcp_pool(store, runs[:n], "FCP")
        for seed in seeds:
            jobs.append((n, seed))
    agents = {}
    if n_workers > 1:
        import concurrent.futures as cf

        with cf.ProcessPoolExecutor(max_workers=n_workers) as ex:
            futures = {
                ex.submit(_train_one_br, str(store.root), pools[n], br_config.replace(population_size=n), seed, init_from): (n, seed)
                for n, seed in jobs
            }
            for fut in cf.as_completed(futures):
                agents[futures[fut]] = fut.result()
    else:
        for n, seed in jobs:
            say(f"sweep N={n}: best response seed {seed}")
            agents[(n, seed)] = _train_one_br(str(store.root), pools[n], br_config.replace(population_size=n), seed, init_from)

    results: dict[int, list[float]] = {}
    for n in sizes:
        per_seed = []
        for seed in seeds:
            report = cross_play(
                [agents[(n, seed)]],
                population,
                layouts=list(config.layouts),
                horizon=eval_horizon,
                episodes=eval_episodes,
                seed=seed,
                enforce_disjoint=False,
            )
            per_seed.append(report.aggregate()["pooled"]["mean"])
        results[n] = per_seed

    from cookbench.evaluation.tables import sweep_table

    return sweep_table(results)
