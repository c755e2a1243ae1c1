"""Island model: independent sub-populations joined by ring migration.

The population is split into contiguous blocks of ``NP // islands`` members.
Each block evolves as its own DE/rand/1/bin population (donor indices are
drawn inside the block) but keeps the random streams of its global member
indices, so a run is reproducible regardless of how islands are scheduled.
Every ``interval`` generations, synchronously, island ``k`` sends copies of
its ``migrants`` best members to island ``k + 1`` (mod the island count),
where they replace the worst members.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np

from ..core import LOWER, UPPER, ConfigurationError, ControlParams, Population
from ..functions.evaluate import eval_rows
from . import kernels
from .models import Budget, Observer, Run, RunResult, _method, _new_population


def island_slices(NP: int, islands: int) -> list[slice]:
    if islands < 2:
        raise ConfigurationError("the island model needs at least 2 islands")
    if NP % islands:
        raise ConfigurationError(f"NP={NP} is not divisible by {islands} islands")
    m = NP // islands
    if m < 4:
        raise ConfigurationError(f"each island needs at least 4 members, got {m}")
    return [slice(k * m, (k + 1) * m) for k in range(islands)]


def migrate_ring(pop: Population, islands: int, migrants: int) -> Population:
    """Return a new population after one synchronous ring migration.

    Emigrants are chosen from the pre-migration state of every island, so the
    result does not depend on the order in which islands are visited.  Ties in
    fitness are broken by position (stable sort).
    """
    slices = island_slices(pop.NP, islands)
    m = pop.NP // islands
    if not 0 <= migrants < m:
        raise ConfigurationError(f"migrants must lie in [0, {m - 1}]")
    out = pop.copy()
    if migrants == 0:
        return out
    emigrants = []
    for s in slices:
        order = np.argsort(pop.fitness[s], kind="stable")[:migrants]
        emigrants.append(s.start + order)
    for k, s in enumerate(slices):
        src = emigrants[k - 1]
        worst = s.start + np.argsort(-pop.fitness[s], kind="stable")[:migrants]
        out.positions[worst] = pop.positions[src]
        out.fitness[worst] = pop.fitness[src]
        if pop.F is not None:
            out.F[worst] = pop.F[src]
            out.CR[worst] = pop.CR[src]
    return out


def run_island(
    spec,
    params: ControlParams,
    budget: Budget,
    rng_seed: int,
    islands: int = 4,
    interval: Optional[int] = None,
    migrants: int = 1,
    workers: int = 1,
    observer: Optional[Observer] = None,
) -> RunResult:
    """Island-model DE; ``interval=None`` disables migration entirely."""
    slices = island_slices(params.NP, islands)
    if params.index_method == "displacement" and params.NP // islands < 7:
        raise ConfigurationError("displacement index selection needs at least 7 members per island")
    run = Run("island", spec, params, budget, rng_seed, observer)
    p = spec.packed
    NP, D = params.NP, spec.D
    m = NP // islands
    method = _method(params)
    seed = run.seed
    idx = np.empty((NP, 3), dtype=np.int64)
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None

    def each_island(fn):
        if pool is None:
            for k, s in enumerate(slices):
                fn(k, s)
        else:
            for f in [pool.submit(fn, k, s) for k, s in enumerate(slices)]:
                f.result()

    try:
        pos = np.empty((NP, D))
        fit = np.empty(NP)
        kernels.init_positions(seed, 0, LOWER, UPPER, pos, 0, NP)
        eval_rows(pos, *p, fit, 0, NP)
        run.begin(_new_population(pos, fit, params))
        while not run.done():
            pop = run.state.population
            g = pop.generation + 1
            nxt = Population(np.empty_like(pop.positions), np.empty(NP), np.empty(NP), np.empty(NP))

            def step(k, s, pop=pop, nxt=nxt, g=g):
                local_idx = idx[s]
                kernels.select_indices(seed, g, s.start, m, method, local_idx, 0, m)
                kernels.fused_pass(
                    pop.positions[s], pop.fitness[s], pop.F[s], pop.CR[s], local_idx,
                    params.jde, seed, g, s.start, LOWER, UPPER, *p,
                    nxt.positions[s], nxt.fitness[s], nxt.F[s], nxt.CR[s], 0, m,
                )

            each_island(step)
            run.state.barrier_count += 1
            if interval is not None and migrants > 0 and g % interval == 0:
                nxt = migrate_ring(nxt, islands, migrants)
            run.commit(nxt)
    finally:
        if pool is not None:
            pool.shutdown()
    return run.result()
