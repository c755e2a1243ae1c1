"""Trial orchestration, result records and rank-sum scoring."""
from __future__ import annotations

import csv
import io
import json
import os
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy.stats import rankdata

from .core import ConfigurationError, ControlParams
from .exec import ExecutionModel, run_model
from .functions import build_objective
from .termination import Decision, StoppingRule, check_termination

__all__ = [
    "AlgorithmConfig",
    "Decision",
    "FunctionRanking",
    "RankingReport",
    "StoppingRule",
    "TrialRecord",
    "aggregate_report",
    "check_termination",
    "load_records",
    "rank_function",
    "rank_records",
    "run_trials",
]


@dataclass(frozen=True)
class TrialRecord:
    algorithm_id: str
    function_id: int
    dimension: int
    seed: int
    final_error: float
    fes_used: int
    wall_clock_seconds: float
    solved: bool
    population_size: int = 0
    model: str = ""

    def key(self) -> tuple:
        return (self.algorithm_id, self.function_id, self.dimension, self.seed)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "TrialRecord":
        names = {f.name for f in fields(cls)}
        missing = {"algorithm_id", "function_id", "dimension", "seed", "final_error", "fes_used", "wall_clock_seconds", "solved"} - d.keys()
        if missing:
            raise ValueError(f"record is missing fields {sorted(missing)}")
        return cls(**{k: v for k, v in d.items() if k in names})


@dataclass(frozen=True)
class AlgorithmConfig:
    """An optimizer configuration: DE control parameters plus an execution model."""

    params: ControlParams = field(default_factory=ControlParams)
    model: ExecutionModel = field(default_factory=ExecutionModel)
    name: Optional[str] = None

    @property
    def algorithm_id(self) -> str:
        if self.name:
            return self.name
        base = "jde" if self.params.jde else "de"
        return f"{base}-{self.model.variant}-NP{self.params.NP}"


# ---------------------------------------------------------------------------
# persistence


def load_records(path) -> list[TrialRecord]:
    """Read a JSON-lines results file.

    A truncated final line (an interrupted write) is ignored; malformed lines
    anywhere else raise ``ValueError``.
    """
    path = Path(path)
    if not path.exists():
        return []
    lines = path.read_text().splitlines()
    out = []
    for n, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            out.append(TrialRecord.from_dict(json.loads(line)))
        except (json.JSONDecodeError, TypeError, ValueError) as exc:
            if n == len(lines):
                break
            raise ValueError(f"{path}:{n}: bad record ({exc})") from None
    return out


def _append(path: Path, rec: TrialRecord) -> None:
    # repair a truncated last line before appending so the file stays parseable
    if path.exists() and path.stat().st_size:
        with open(path, "rb") as fh:
            fh.seek(-1, os.SEEK_END)
            last = fh.read(1)
        if last != b"\n":
            data = path.read_bytes()
            path.write_bytes(data[: data.rfind(b"\n") + 1])
    with open(path, "a") as fh:
        fh.write(rec.to_json() + "\n")
        fh.flush()
        os.fsync(fh.fileno())


# ---------------------------------------------------------------------------
# running


def _run_one(job) -> TrialRecord:
    algo, fid, D, seed, max_fes, data_dir, gen_seed = job
    spec = _objective(fid, D, data_dir, gen_seed)
    rule = StoppingRule.for_dimension(D, max_fes)
    res = run_model(spec, algo.params, rule, seed, algo.model)
    return TrialRecord(
        algorithm_id=algo.algorithm_id,
        function_id=fid,
        dimension=D,
        seed=seed,
        final_error=float(res.best_fitness),
        fes_used=int(res.fe_count),
        wall_clock_seconds=round(res.wall_clock, 3),
        solved=bool(res.best_fitness <= rule.target_error),
        population_size=algo.params.NP,
        model=algo.model.variant,
    )


_OBJECTIVES: dict = {}


def _objective(fid, D, data_dir, gen_seed):
    key = (fid, D, None if data_dir is None else str(data_dir), gen_seed)
    if key not in _OBJECTIVES:
        _OBJECTIVES[key] = build_objective(fid, D, seed=gen_seed, data_dir=data_dir)
    return _OBJECTIVES[key]


def run_trials(
    algorithms: Sequence[AlgorithmConfig],
    functions: Iterable[int],
    dims: Iterable[int],
    n_trials: int,
    base_seed: int = 0,
    *,
    max_fes: Optional[int] = None,
    data_dir=None,
    gen_seed: int = 0,
    out_path=None,
    processes: int = 1,
    accuracy_only: bool = False,
    on_record: Optional[Callable[[TrialRecord], None]] = None,
) -> list[TrialRecord]:
    """Run every (algorithm, function, dimension, trial) combination.

    Trial ``t`` uses seed ``base_seed + t`` for every algorithm.  With
    ``out_path`` each record is appended as soon as it completes, and records
    already present are reused instead of being re-run.  ``processes > 1`` is
    allowed only with ``accuracy_only=True`` since concurrent trials distort
    each other's wall-clock.
    """
    if n_trials < 1:
        raise ConfigurationError("n_trials must be at least 1")
    if processes > 1 and not accuracy_only:
        raise ConfigurationError("concurrent trials are only allowed in accuracy-only mode")
    functions, dims = list(functions), list(dims)
    ids = [a.algorithm_id for a in algorithms]
    if len(set(ids)) != len(ids):
        raise ConfigurationError(f"duplicate algorithm ids: {ids}")
    path = Path(out_path) if out_path is not None else None
    done = {r.key(): r for r in load_records(path)} if path is not None else {}

    jobs = []
    for algo in algorithms:
        for fid in functions:
            for D in dims:
                for t in range(n_trials):
                    jobs.append((algo, fid, D, base_seed + t, max_fes, data_dir, gen_seed))
    pending = [j for j in jobs if (j[0].algorithm_id, j[1], j[2], j[3]) not in done]

    def finish(rec: TrialRecord) -> None:
        done[rec.key()] = rec
        if path is not None:
            _append(path, rec)
        if on_record is not None:
            on_record(rec)

    if processes > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=processes) as pool:
            for rec in pool.map(_run_one, pending):
                finish(rec)
    else:
        for job in pending:
            finish(_run_one(job))
    return [done[(j[0].algorithm_id, j[1], j[2], j[3])] for j in jobs]


# ---------------------------------------------------------------------------
# ranking


@dataclass
class FunctionRanking:
    """Ranks of every trial on one function and the resulting scores.

    ``ranks[a]`` lists algorithm ``a``'s trial ranks (``n * m`` is best).
    """

    function_id: int
    dimension: Optional[int]
    n: int
    ranks: dict[str, list[float]]
    scores: dict[str, float]

    @property
    def m(self) -> int:
        return len(self.scores)

    def placement(self) -> dict[str, int]:
        """1 for the highest score; tied scores share the better place."""
        return _placement(self.scores)


def _placement(scores: dict[str, float]) -> dict[str, int]:
    names = list(scores)
    places = rankdata([-scores[a] for a in names], method="min")
    return {a: int(p) for a, p in zip(names, places)}


def _goodness_key(rec: TrialRecord) -> tuple:
    # smaller is better: solved trials first (by wall-clock in whole ms), then error
    if rec.solved:
        return (0, int(round(rec.wall_clock_seconds * 1000)))
    return (1, float(rec.final_error))


def rank_function(trials: Sequence[TrialRecord]) -> FunctionRanking:
    """Rank-sum scores of all algorithms on a single function.

    The best trial gets rank ``n * m``; tied trials share the average rank;
    each algorithm scores the sum of its ranks minus ``n (n + 1) / 2``.
    """
    if not trials:
        raise ValueError("no trials to rank")
    fids = {t.function_id for t in trials}
    dims = {t.dimension for t in trials}
    if len(fids) != 1:
        raise ValueError(f"trials span several functions: {sorted(fids)}")
    by_algo: dict[str, list[TrialRecord]] = defaultdict(list)
    for t in trials:
        by_algo[t.algorithm_id].append(t)
    counts = {a: len(v) for a, v in by_algo.items()}
    if len(set(counts.values())) != 1:
        raise ConfigurationError(f"every algorithm needs the same number of trials, got {counts}")
    n = next(iter(counts.values()))

    keys = [_goodness_key(t) for t in trials]
    order = {k: i for i, k in enumerate(sorted(set(keys)))}
    ranks = rankdata([-order[k] for k in keys], method="average")
    per_algo: dict[str, list[float]] = defaultdict(list)
    for t, r in zip(trials, ranks):
        per_algo[t.algorithm_id].append(float(r))
    names = sorted(per_algo)
    correction = n * (n + 1) / 2
    return FunctionRanking(
        function_id=fids.pop(),
        dimension=dims.pop() if len(dims) == 1 else None,
        n=n,
        ranks={a: per_algo[a] for a in names},
        scores={a: sum(per_algo[a]) - correction for a in names},
    )


@dataclass
class RankingReport:
    functions: list[FunctionRanking]
    final_scores: dict[str, float]
    population_sizes: dict[str, int] = field(default_factory=dict)

    @property
    def algorithms(self) -> list[str]:
        return list(self.final_scores)

    def final_placement(self) -> dict[str, int]:
        return _placement(self.final_scores)

    def conserved(self) -> bool:
        """Check the rank-sum identity on every function."""
        for fr in self.functions:
            n, m = fr.n, fr.m
            total = sum(s + n * (n + 1) / 2 for s in fr.scores.values())
            if not np.isclose(total, n * m * (n * m + 1) / 2, rtol=0, atol=1e-9):
                return False
        return True

    def rows(self) -> list[list]:
        """Table layout: algorithm, NP, one placement per function, final placement."""
        places = [fr.placement() for fr in self.functions]
        final = self.final_placement()
        out = []
        for a in self.algorithms:
            npop = self.population_sizes.get(a, "")
            out.append([a, npop] + [p[a] for p in places] + [final[a]])
        return out

    def header(self) -> list[str]:
        return ["algorithm", "NP"] + [f"F{fr.function_id:02d}" for fr in self.functions] + ["Rank"]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header() + ["final_score"])
        for row in self.rows():
            w.writerow(row + [self.final_scores[row[0]]])
        return buf.getvalue()

    def scores_csv(self) -> str:
        """Per-function scores (long format)."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["function_id", "dimension", "algorithm", "score"])
        for fr in self.functions:
            for a, s in fr.scores.items():
                w.writerow([fr.function_id, fr.dimension, a, s])
        return buf.getvalue()

    def to_table(self) -> str:
        rows = [self.header()] + [[str(c) for c in r] for r in self.rows()]
        widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
        lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
        lines.insert(1, "-" * len(lines[0]))
        return "\n".join(lines)


def aggregate_report(rankings: Sequence[FunctionRanking], population_sizes: Optional[dict] = None) -> RankingReport:
    """Sum per-function scores into final scores; the algorithm sets must agree."""
    if not rankings:
        raise ValueError("no function rankings to aggregate")
    algos = set(rankings[0].scores)
    for fr in rankings[1:]:
        if set(fr.scores) != algos:
            raise ConfigurationError(f"function F{fr.function_id:02d} ranks a different algorithm set")
    ordered = sorted(rankings, key=lambda fr: (fr.function_id, fr.dimension or 0))
    names = _table_order(algos, population_sizes or {})
    final = {a: float(sum(fr.scores[a] for fr in ordered)) for a in names}
    return RankingReport(ordered, final, dict(population_sizes or {}))


def _table_order(algos, nps: dict) -> list[str]:
    def key(a):
        np_ = nps.get(a)
        stem = a.rsplit("-NP", 1)[0] if np_ is not None else a
        return (stem, np_ if np_ is not None else -1, a)

    return sorted(algos, key=key)


def rank_records(records: Sequence[TrialRecord]) -> RankingReport:
    """Group records by (function, dimension), rank each group, aggregate."""
    groups: dict[tuple, list[TrialRecord]] = defaultdict(list)
    nps: dict[str, int] = {}
    for r in records:
        groups[(r.function_id, r.dimension)].append(r)
        if r.population_size:
            nps[r.algorithm_id] = r.population_size
    return aggregate_report([rank_function(g) for g in groups.values()], nps)


