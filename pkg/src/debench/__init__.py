"""CPU reference implementation of a GPU-oriented DE benchmark suite."""
from .core import ConfigurationError, ControlParams, Individual, Population
from .exec import ExecutionModel, RunResult, run_model
from .functions import build_objective
from .termination import StoppingRule, check_termination

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "ControlParams",
    "ExecutionModel",
    "Individual",
    "Population",
    "RunResult",
    "StoppingRule",
    "build_objective",
    "check_termination",
    "run_model",
]
