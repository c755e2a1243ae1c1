"""Domain types and the DE/rand/1/bin operators, one individual at a time.

These are the reference operators.  The data-parallel kernels in
:mod:`debench.exec.kernels` compute the same arithmetic on whole populations
and must reproduce these results bit for bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .rng import RngStream

LOWER = -100.0
UPPER = 100.0

# jDE constants (Brest et al. 2006)
TAU_F = 0.1
TAU_CR = 0.1
F_LOWER = 0.1
F_UPPER = 0.9


class ConfigurationError(ValueError):
    """Invalid run configuration (population too small, bad ratios, ...)."""


@dataclass(frozen=True)
class ControlParams:
    """Differential weight, crossover rate and population size.

    With ``jde=True`` the ``F`` and ``CR`` values only seed each individual's
    own parameters, which then adapt during the run.
    """

    F: float = 0.5
    CR: float = 0.3
    NP: int = 250
    jde: bool = False
    index_method: str = "rejection"

    def __post_init__(self):
        if not (0.0 < self.F <= 2.0):
            raise ConfigurationError(f"F must lie in (0, 2], got {self.F}")
        if not (0.0 <= self.CR <= 1.0):
            raise ConfigurationError(f"CR must lie in [0, 1], got {self.CR}")
        if self.NP < 4:
            raise ConfigurationError(f"NP must be at least 4, got {self.NP}")
        if self.index_method not in ("rejection", "displacement"):
            raise ConfigurationError(f"unknown index method {self.index_method!r}")
        if self.index_method == "displacement" and self.NP < 7:
            raise ConfigurationError("displacement index selection needs NP >= 7")


@dataclass
class Individual:
    vector: np.ndarray
    fitness: Optional[float] = None
    params: Optional[tuple[float, float]] = None

    @property
    def evaluated(self) -> bool:
        return self.fitness is not None


@dataclass
class Population:
    """NP individuals stored as arrays; ``F``/``CR`` are per-individual for jDE."""

    positions: np.ndarray
    fitness: np.ndarray
    F: Optional[np.ndarray] = None
    CR: Optional[np.ndarray] = None
    generation: int = 0

    def __post_init__(self):
        if self.positions.ndim != 2:
            raise ValueError("positions must be an (NP, D) array")
        if self.positions.shape[0] < 4:
            raise ConfigurationError("a population needs at least 4 members")
        if self.fitness.shape != (self.positions.shape[0],):
            raise ValueError("fitness must have one entry per member")

    @property
    def NP(self) -> int:
        return self.positions.shape[0]

    @property
    def D(self) -> int:
        return self.positions.shape[1]

    def __len__(self) -> int:
        return self.NP

    def __getitem__(self, i: int) -> Individual:
        f = float(self.fitness[i])
        params = None
        if self.F is not None:
            params = (float(self.F[i]), float(self.CR[i]))
        return Individual(self.positions[i], None if math.isnan(f) else f, params)

    def __iter__(self) -> Iterator[Individual]:
        return (self[i] for i in range(self.NP))

    def best_index(self) -> int:
        return int(np.argmin(self.fitness))

    def copy(self) -> "Population":
        return Population(
            self.positions.copy(),
            self.fitness.copy(),
            None if self.F is None else self.F.copy(),
            None if self.CR is None else self.CR.copy(),
            self.generation,
        )


def _check_target(target: int, NP: int, minimum: int, hint: str = "") -> None:
    if NP < minimum:
        raise ConfigurationError(f"index selection needs NP >= {minimum}, got {NP}{hint}")
    if not 0 <= target < NP:
        raise ValueError(f"target {target} outside population of {NP}")


def select_indices_rejection(target: int, NP: int, rng: RngStream):
    """Trial-and-error draw of three distinct indices, all different from ``target``.

    Returns ``((r1, r2, r3), rng)``.
    """
    _check_target(target, NP, 4)
    r1, rng = rng.below(NP)
    while r1 == target:
        r1, rng = rng.below(NP)
    r2, rng = rng.below(NP)
    while r2 == target or r2 == r1:
        r2, rng = rng.below(NP)
    r3, rng = rng.below(NP)
    while r3 == target or r3 == r1 or r3 == r2:
        r3, rng = rng.below(NP)
    return (r1, r2, r3), rng


def displacement_tuple(target: int, NP: int, d1: int, d2: int, d3: int) -> tuple[int, int, int]:
    """Partial sums of the three displacements, modulo NP."""
    r1 = (target + d1) % NP
    r2 = (r1 + d2) % NP
    r3 = (r2 + d3) % NP
    return r1, r2, r3


def select_indices_displacement(target: int, NP: int, rng: RngStream):
    """Three displacements (one in ``[1, NP-1]``, two in ``[1, NP//3]``) summed mod NP.

    A tuple that wraps onto the target or repeats an index is thrown away and
    the three displacements are redrawn.
    """
    _check_target(target, NP, 7, " (use the rejection method for small populations)")
    third = NP // 3
    while True:
        u, rng = rng.uniforms(3)
        d1 = 1 + int(u[0] * (NP - 1))
        d2 = 1 + int(u[1] * third)
        d3 = 1 + int(u[2] * third)
        r = displacement_tuple(target, NP, d1, d2, d3)
        if target not in r and len(set(r)) == 3:
            return r, rng


def mutate_rand_1(pop, r1: int, r2: int, r3: int, F: float) -> np.ndarray:
    """Mutant ``x[r1] + F * (x[r2] - x[r3])``; no clamping."""
    x = pop.positions if isinstance(pop, Population) else np.asarray(pop)
    return x[r1] + F * (x[r2] - x[r3])


def crossover_binomial(target: np.ndarray, mutant: np.ndarray, CR: float, rng):
    """Binomial crossover.

    Draw order: ``j_rand`` first, then one uniform per position.  A position
    takes the mutant value when its uniform is ``<= CR`` or it is ``j_rand``.
    """
    target = np.asarray(target)
    mutant = np.asarray(mutant)
    if target.shape != mutant.shape:
        raise ValueError(f"dimension mismatch: {target.shape} vs {mutant.shape}")
    D = target.shape[0]
    j_rand, rng = rng.below(D)
    u, rng = rng.uniforms(D)
    take = u <= CR
    take[j_rand] = True
    return np.where(take, mutant, target), rng


def repair_bounds(v: np.ndarray, lower: float = LOWER, upper: float = UPPER) -> np.ndarray:
    """Clamp every out-of-range coordinate to the bound it violates."""
    return np.minimum(np.maximum(v, lower), upper)


def select_replace(target: Individual, trial: Individual) -> Individual:
    """Keep the trial when it is at least as good as the target (minimization)."""
    if not (target.evaluated and trial.evaluated):
        raise ValueError("both individuals must be evaluated before selection")
    return trial if trial.fitness <= target.fitness else target


def adapt_jde(ind: Individual, rng):
    """Propose per-individual (F, CR) for this individual's next trial.

    Consumes four draws: a test and a value for F, then a test and a value for CR.
    Returns ``((F, CR), rng)``.
    """
    if ind.params is None:
        raise ValueError("jDE adaptation needs per-individual parameters")
    F, CR = ind.params
    u, rng = rng.uniforms(4)
    if u[0] < TAU_F:
        F = F_LOWER + float(u[1]) * F_UPPER
    if u[2] < TAU_CR:
        CR = float(u[3])
    return (F, CR), rng
