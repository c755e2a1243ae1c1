"""Stopping rules shared by the execution models and the benchmark runner."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

TARGET_ERROR = 1e-8


def default_max_fes(D: int) -> int:
    """5,000,000 at D=50 and 10,000,000 at D=100, i.e. 100,000 x D."""
    return 100_000 * D


@dataclass(frozen=True)
class StoppingRule:
    max_fes: int
    target_error: float = TARGET_ERROR

    def __post_init__(self):
        if self.max_fes <= 0:
            raise ValueError("max_fes must be positive")
        if self.target_error <= 0:
            raise ValueError("target_error must be positive")

    @classmethod
    def for_dimension(cls, D: int, max_fes: Optional[int] = None) -> "StoppingRule":
        return cls(default_max_fes(D) if max_fes is None else max_fes)


@dataclass(frozen=True)
class Decision:
    stop: bool
    reason: Optional[str] = None  # "solved" | "budget"

    def __bool__(self) -> bool:
        return self.stop


CONTINUE = Decision(False)


def check_termination(state, rule: StoppingRule) -> Decision:
    """Stop once the best error reaches the target or the budget is spent.

    ``state`` needs ``best_fitness`` (the error; every objective's optimum is 0)
    and ``fe_count``.
    """
    if state.best_fitness <= rule.target_error:
        return Decision(True, "solved")
    if state.fe_count >= rule.max_fes:
        return Decision(True, "budget")
    return CONTINUE
