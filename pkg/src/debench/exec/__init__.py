from .island import migrate_ring, run_island
from .models import (
    VARIANTS,
    ExecutionModel,
    RunResult,
    RunState,
    aligned_rule,
    initial_positions,
    make_trial,
    run_batch_offload,
    run_fused,
    run_master_slave,
    run_model,
    run_phased,
    run_sequential,
)

__all__ = [
    "VARIANTS",
    "ExecutionModel",
    "RunResult",
    "RunState",
    "aligned_rule",
    "initial_positions",
    "make_trial",
    "migrate_ring",
    "run_batch_offload",
    "run_fused",
    "run_island",
    "run_master_slave",
    "run_model",
    "run_phased",
    "run_sequential",
]
