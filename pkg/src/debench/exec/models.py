"""Execution models sharing one deterministic DE/rand/1/bin trajectory.

``sequential``, ``master_slave`` and ``batch_offload`` build trials one
individual at a time with the reference operators in :mod:`debench.core`;
``phased`` and ``fused`` run compiled passes over index ranges of the
population on a thread pool.  All five are generational: trials of generation
``g`` read only generation ``g - 1`` and replacements go to a second buffer.
Given the same seed they produce bit-identical populations.
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from ..core import (
    LOWER,
    UPPER,
    ConfigurationError,
    ControlParams,
    Individual,
    Population,
    adapt_jde,
    crossover_binomial,
    mutate_rand_1,
    repair_bounds,
    select_indices_displacement,
    select_indices_rejection,
    select_replace,
)
from ..functions.evaluate import eval_rows
from ..rng import CROSSOVER, INDEX, INIT, JDE, MAX_INDIVIDUALS, RngStream
from ..termination import StoppingRule, check_termination
from . import kernels

Observer = Callable[["RunState"], None]
Budget = Union[int, StoppingRule]

VARIANTS = ("sequential", "master_slave", "batch_offload", "phased", "fused", "island")


@dataclass(frozen=True)
class ExecutionModel:
    """Which execution strategy to run, with its knobs.

    ``interval=None`` means islands never migrate.
    """

    variant: str = "sequential"
    workers: int = 1
    islands: int = 2
    interval: Optional[int] = None
    migrants: int = 1
    evaluator: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigurationError(f"unknown execution model {self.variant!r}; choose from {VARIANTS}")
        if self.workers < 1:
            raise ConfigurationError("workers must be at least 1")
        if self.variant == "island":
            if self.islands < 2:
                raise ConfigurationError("the island model needs at least 2 islands")
            if self.interval is not None and self.interval < 1:
                raise ConfigurationError("migration interval must be at least 1")
            if self.migrants < 0:
                raise ConfigurationError("migrants must be non-negative")


@dataclass
class RunState:
    population: Population
    fe_count: int = 0
    best_fitness: float = np.inf
    best_index: int = -1
    started: float = 0.0
    transfer_count: int = 0
    barrier_count: int = 0
    overlapped_tasks: int = 0
    solved: bool = False
    solved_index: int = -1

    @property
    def generation(self) -> int:
        return self.population.generation

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.started


@dataclass
class RunResult:
    model: str
    population: Population
    best_x: np.ndarray
    best_fitness: float
    fe_count: int
    generations: int
    wall_clock: float
    stop_reason: str
    solved: bool
    solved_index: int
    transfer_count: int = 0
    barrier_count: int = 0
    overlapped_tasks: int = 0

    @property
    def error(self) -> float:
        return self.best_fitness


def aligned_rule(budget: Budget, NP: int) -> StoppingRule:
    """Round the budget down to whole generations (initialization included)."""
    rule = budget if isinstance(budget, StoppingRule) else StoppingRule(int(budget))
    usable = NP * (rule.max_fes // NP)
    if usable < NP:
        raise ConfigurationError(f"budget {rule.max_fes} cannot cover the {NP} initial evaluations")
    return StoppingRule(usable, rule.target_error)


class Run:
    """Bookkeeping common to every model: budget, best, early stop, observer."""

    def __init__(self, model: str, spec, params: ControlParams, budget: Budget, seed: int, observer: Optional[Observer] = None):
        if seed < 0 or seed >= 2**63:
            raise ConfigurationError("seed must lie in [0, 2**63)")
        if params.NP > MAX_INDIVIDUALS:
            raise ConfigurationError("population too large for the stream layout")
        self.model = model
        self.spec = spec
        self.params = params
        self.seed = int(seed)
        self.rule = aligned_rule(budget, params.NP)
        self.observer = observer
        self.state: Optional[RunState] = None
        self.reason: Optional[str] = None
        self._t0 = time.perf_counter()

    def begin(self, population: Population) -> None:
        self.state = RunState(population, started=self._t0)
        self._account(population)

    def commit(self, population: Population) -> None:
        population.generation = self.state.generation + 1
        self.state.population = population
        self._account(population)
        if self.observer is not None:
            self.observer(self.state)

    def _account(self, population: Population) -> None:
        s = self.state
        s.fe_count += population.NP
        s.best_index = population.best_index()
        s.best_fitness = float(population.fitness[s.best_index])
        if not s.solved:
            hits = np.flatnonzero(population.fitness <= self.rule.target_error)
            if hits.size:
                s.solved = True
                s.solved_index = int(hits[0])

    def done(self) -> bool:
        decision = check_termination(self.state, self.rule)
        if decision.stop:
            self.reason = decision.reason
        return decision.stop

    def result(self) -> RunResult:
        s = self.state
        pop = s.population
        return RunResult(
            model=self.model,
            population=pop,
            best_x=pop.positions[s.best_index].copy(),
            best_fitness=s.best_fitness,
            fe_count=s.fe_count,
            generations=pop.generation,
            wall_clock=time.perf_counter() - self._t0,
            stop_reason=self.reason or "budget",
            solved=s.solved,
            solved_index=s.solved_index,
            transfer_count=s.transfer_count,
            barrier_count=s.barrier_count,
            overlapped_tasks=s.overlapped_tasks,
        )


def _new_population(positions: np.ndarray, fitness: np.ndarray, params: ControlParams) -> Population:
    NP = positions.shape[0]
    return Population(positions, fitness, np.full(NP, float(params.F)), np.full(NP, float(params.CR)))


def _chunks(n: int, k: int) -> list[tuple[int, int]]:
    edges = np.linspace(0, n, k + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


# ---------------------------------------------------------------------------
# per-individual (reference operator) path


def initial_positions(seed: int, NP: int, D: int) -> np.ndarray:
    pos = np.empty((NP, D))
    for i in range(NP):
        u, _ = RngStream.for_individual(seed, 0, i, INIT).uniforms(D)
        pos[i] = LOWER + u * (UPPER - LOWER)
    return pos


def make_trial(pop: Population, i: int, params: ControlParams, seed: int, generation: int):
    """Trial vector for target ``i`` plus the (F, CR) it was built with."""
    F, CR = params.F, params.CR
    if params.jde:
        (F, CR), _ = adapt_jde(pop[i], RngStream.for_individual(seed, generation, i, JDE))
    select = select_indices_displacement if params.index_method == "displacement" else select_indices_rejection
    (r1, r2, r3), _ = select(i, pop.NP, RngStream.for_individual(seed, generation, i, INDEX))
    mutant = mutate_rand_1(pop, r1, r2, r3, F)
    trial, _ = crossover_binomial(pop.positions[i], mutant, CR, RngStream.for_individual(seed, generation, i, CROSSOVER))
    return repair_bounds(trial, LOWER, UPPER), F, CR


def _replace_all(pop: Population, trials: np.ndarray, tfit: np.ndarray, Ft, CRt) -> Population:
    nxt = pop.copy()
    for i in range(pop.NP):
        parent = Individual(pop.positions[i], float(pop.fitness[i]))
        child = Individual(trials[i], float(tfit[i]))
        if select_replace(parent, child) is child:
            nxt.positions[i] = trials[i]
            nxt.fitness[i] = tfit[i]
            nxt.F[i] = Ft[i]
            nxt.CR[i] = CRt[i]
    return nxt


def _build_trials(pop: Population, params: ControlParams, seed: int, generation: int):
    trials = np.empty_like(pop.positions)
    Ft = np.empty(pop.NP)
    CRt = np.empty(pop.NP)
    for i in range(pop.NP):
        trials[i], Ft[i], CRt[i] = make_trial(pop, i, params, seed, generation)
    return trials, Ft, CRt


def run_sequential(spec, params: ControlParams, budget: Budget, rng_seed: int, observer: Optional[Observer] = None) -> RunResult:
    """Single-threaded generational DE/rand/1/bin."""
    run = Run("sequential", spec, params, budget, rng_seed, observer)
    pos = initial_positions(run.seed, params.NP, spec.D)
    fit = np.array([spec(x) for x in pos])
    run.begin(_new_population(pos, fit, params))
    while not run.done():
        pop = run.state.population
        g = pop.generation + 1
        nxt = pop.copy()
        for i in range(pop.NP):
            trial, F, CR = make_trial(pop, i, params, run.seed, g)
            child = Individual(trial, spec(trial))
            parent = Individual(pop.positions[i], float(pop.fitness[i]))
            if select_replace(parent, child) is child:
                nxt.positions[i] = trial
                nxt.fitness[i] = child.fitness
                nxt.F[i] = F
                nxt.CR[i] = CR
        run.commit(nxt)
    return run.result()


def run_master_slave(spec, params: ControlParams, budget: Budget, rng_seed: int, workers: int = 4, observer: Optional[Observer] = None) -> RunResult:
    """Synchronous master-slave: the master builds trials, a thread pool evaluates them."""
    if workers < 1:
        raise ConfigurationError("workers must be at least 1")
    run = Run("master_slave", spec, params, budget, rng_seed, observer)
    chunks = _chunks(params.NP, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:

        def evaluate(X: np.ndarray) -> np.ndarray:
            out = np.empty(X.shape[0])
            futures = [pool.submit(spec.evaluate, X, out, a, b) for a, b in chunks]
            for f in futures:
                f.result()
            run_barrier()
            return out

        def run_barrier():
            if run.state is not None:
                run.state.barrier_count += 1

        pos = initial_positions(run.seed, params.NP, spec.D)
        run.begin(_new_population(pos, evaluate(pos), params))
        while not run.done():
            pop = run.state.population
            trials, Ft, CRt = _build_trials(pop, params, run.seed, pop.generation + 1)
            tfit = evaluate(trials)
            run.commit(_replace_all(pop, trials, tfit, Ft, CRt))
    return run.result()


def run_batch_offload(
    spec,
    params: ControlParams,
    budget: Budget,
    rng_seed: int,
    evaluator: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    observer: Optional[Observer] = None,
) -> RunResult:
    """Whole-population evaluation across an explicit byte-buffer boundary.

    Each offloaded batch (the initial population, then one trial population
    per generation) crosses the boundary twice: positions out, fitness back.
    """
    run = Run("batch_offload", spec, params, budget, rng_seed, observer)
    evaluator = evaluator or spec.evaluate
    transfers = 0

    def offload(X: np.ndarray) -> np.ndarray:
        nonlocal transfers
        outbound = X.tobytes()
        transfers += 1
        device_X = np.frombuffer(bytearray(outbound), dtype=np.float64).reshape(X.shape)
        device_f = np.asarray(evaluator(device_X), dtype=np.float64)
        if device_f.shape != (X.shape[0],):
            raise RuntimeError(f"evaluator returned {device_f.size} values for a batch of {X.shape[0]}")
        inbound = device_f.tobytes()
        transfers += 1
        return np.frombuffer(bytearray(inbound), dtype=np.float64)

    pos = initial_positions(run.seed, params.NP, spec.D)
    fit = offload(pos)
    run.begin(_new_population(pos, fit, params))
    run.state.transfer_count = transfers
    while not run.done():
        pop = run.state.population
        trials, Ft, CRt = _build_trials(pop, params, run.seed, pop.generation + 1)
        tfit = offload(trials)
        run.state.transfer_count = transfers
        run.commit(_replace_all(pop, trials, tfit, Ft, CRt))
    return run.result()


# ---------------------------------------------------------------------------
# compiled data-parallel path


class _Passes:
    """Runs a range function over population chunks, one barrier per call."""

    def __init__(self, NP: int, workers: int, extra_threads: int = 0):
        self.chunks = _chunks(NP, workers)
        self.pool = ThreadPoolExecutor(max_workers=workers + extra_threads) if workers + extra_threads > 1 else None

    def run(self, fn, *args, side=None) -> None:
        """Apply ``fn(*args, start, stop)`` on every chunk; ``side`` runs alongside."""
        if self.pool is None:
            if side is not None:
                side()
            for a, b in self.chunks:
                fn(*args, a, b)
            return
        futures = [self.pool.submit(side)] if side is not None else []
        futures += [self.pool.submit(fn, *args, a, b) for a, b in self.chunks]
        for f in futures:
            f.result()

    def close(self) -> None:
        if self.pool is not None:
            self.pool.shutdown()


def _method(params: ControlParams) -> int:
    return kernels.DISPLACEMENT if params.index_method == "displacement" else kernels.REJECTION


def _compiled_init(run: Run, passes: _Passes) -> Population:
    p = run.spec.packed
    NP, D = run.params.NP, run.spec.D
    pos = np.empty((NP, D))
    fit = np.empty(NP)
    passes.run(kernels.init_positions, run.seed, 0, LOWER, UPPER, pos)
    passes.run(eval_rows, pos, *p, fit)
    return _new_population(pos, fit, run.params)


def run_phased(spec, params: ControlParams, budget: Budget, rng_seed: int, workers: int = 4, observer: Optional[Observer] = None) -> RunResult:
    """One barriered data-parallel pass per DE operation.

    Per generation: index selection, trial generation, evaluation, replacement.
    """
    run = Run("phased", spec, params, budget, rng_seed, observer)
    passes = _Passes(params.NP, workers)
    p = spec.packed
    NP, D = params.NP, spec.D
    idx = np.empty((NP, 3), dtype=np.int64)
    trials = np.empty((NP, D))
    tfit = np.empty(NP)
    Ft = np.empty(NP)
    CRt = np.empty(NP)
    method = _method(params)
    try:
        run.begin(_compiled_init(run, passes))
        while not run.done():
            pop = run.state.population
            g = pop.generation + 1
            nxt = Population(np.empty_like(pop.positions), np.empty(NP), np.empty(NP), np.empty(NP))
            passes.run(kernels.select_indices, run.seed, g, 0, NP, method, idx)
            passes.run(kernels.generate_trials, pop.positions, idx, pop.F, pop.CR, params.jde, run.seed, g, 0, LOWER, UPPER, trials, Ft, CRt)
            passes.run(eval_rows, trials, *p, tfit)
            passes.run(kernels.replace, pop.positions, pop.fitness, pop.F, pop.CR, trials, tfit, Ft, CRt,
                       nxt.positions, nxt.fitness, nxt.F, nxt.CR)
            run.state.barrier_count += 4
            run.commit(nxt)
    finally:
        passes.close()
    return run.result()


def run_fused(spec, params: ControlParams, budget: Budget, rng_seed: int, workers: int = 4, observer: Optional[Observer] = None) -> RunResult:
    """Generate, evaluate and replace in a single pass per generation.

    Index selection for the next generation runs as a side task during the pass
    and writes only the next-generation index buffer.
    """
    run = Run("fused", spec, params, budget, rng_seed, observer)
    # the overlapped index task gets its own thread whenever there is a pool
    passes = _Passes(params.NP, workers, extra_threads=1 if workers > 1 else 0)
    p = spec.packed
    NP = params.NP
    idx = np.empty((NP, 3), dtype=np.int64)
    idx_next = np.empty((NP, 3), dtype=np.int64)
    method = _method(params)
    seed = run.seed
    try:
        run.begin(_compiled_init(run, passes))
        kernels.select_indices(seed, 1, 0, NP, method, idx, 0, NP)
        while not run.done():
            pop = run.state.population
            g = pop.generation + 1
            nxt = Population(np.empty_like(pop.positions), np.empty(NP), np.empty(NP), np.empty(NP))

            def next_indices(g=g, buf=idx_next):
                kernels.select_indices(seed, g + 1, 0, NP, method, buf, 0, NP)

            passes.run(
                kernels.fused_pass,
                pop.positions, pop.fitness, pop.F, pop.CR, idx, params.jde, seed, g, 0, LOWER, UPPER,
                *p,
                nxt.positions, nxt.fitness, nxt.F, nxt.CR,
                side=next_indices,
            )
            run.state.barrier_count += 1
            run.state.overlapped_tasks += 1
            idx, idx_next = idx_next, idx
            run.commit(nxt)
    finally:
        passes.close()
    return run.result()


def run_model(spec, params: ControlParams, budget: Budget, rng_seed: int, model: ExecutionModel, observer: Optional[Observer] = None) -> RunResult:
    v = model.variant
    if v == "sequential":
        return run_sequential(spec, params, budget, rng_seed, observer)
    if v == "master_slave":
        return run_master_slave(spec, params, budget, rng_seed, model.workers, observer)
    if v == "batch_offload":
        return run_batch_offload(spec, params, budget, rng_seed, model.evaluator, observer)
    if v == "phased":
        return run_phased(spec, params, budget, rng_seed, model.workers, observer)
    if v == "fused":
        return run_fused(spec, params, budget, rng_seed, model.workers, observer)
    from .island import run_island

    return run_island(spec, params, budget, rng_seed, model.islands, model.interval, model.migrants, model.workers, observer)
