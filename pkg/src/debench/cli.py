"""``debench`` command line.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 runtime failure.  Settings resolve as command-line flag, then the optional
JSON ``--config`` file, then built-in defaults.
"""
from __future__ import annotations

import argparse
import csv
import json
import statistics
import sys
from collections import defaultdict
from pathlib import Path
from typing import Optional

from .bench import AlgorithmConfig, load_records, rank_records, run_trials
from .core import ConfigurationError, ControlParams
from .exec import VARIANTS, ExecutionModel, run_model
from .functions import (
    CATALOG,
    DataError,
    build_objective,
    catalog_markdown,
    generate_transform_data,
    write_transform_data,
)
from .functions.data import default_data_dir, missing_files
from .termination import StoppingRule

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_RUNTIME = 0, 1, 2, 3
ALL_FUNCTIONS = sorted(CATALOG)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _add_problem(p: argparse.ArgumentParser, multi: bool) -> None:
    if multi:
        p.add_argument("--function", "-f", type=int, nargs="+", default=ALL_FUNCTIONS, help="function ids 1-10 (default: all)")
        p.add_argument("--dim", "-d", type=int, nargs="+", default=[50], help="dimensions (default: 50)")
    else:
        p.add_argument("--function", "-f", type=int, default=1, help="function id 1-10 (default: 1)")
        p.add_argument("--dim", "-d", type=int, default=50, help="dimension (default: 50)")
    p.add_argument("--data-dir", default=None, help="directory of transform files (default: $DEBENCH_DATA_DIR)")
    p.add_argument("--gen-seed", type=int, default=None, help="generate transform data from this seed instead of reading files")
    p.add_argument("--model", choices=VARIANTS, default="sequential", help="execution model (default: sequential)")
    p.add_argument("--workers", type=int, default=4, help="worker threads for parallel models (default: 4)")
    p.add_argument("--islands", type=int, default=2, help="island count (default: 2)")
    p.add_argument("--interval", type=int, default=None, help="migration interval in generations (default: never)")
    p.add_argument("--migrants", type=int, default=1, help="migrants per island (default: 1)")
    p.add_argument("--np", type=int, default=250, help="population size (default: 250)")
    p.add_argument("--F", type=float, default=0.5, help="differential weight (default: 0.5)")
    p.add_argument("--CR", type=float, default=0.3, help="crossover rate (default: 0.3)")
    p.add_argument("--jde", action="store_true", default=False, help="self-adapt F and CR (jDE)")
    p.add_argument("--index-method", choices=("rejection", "displacement"), default="rejection")
    p.add_argument("--max-fes", type=int, default=None, help="evaluation budget (default: 100000 x dim)")
    p.add_argument("--seed", type=int, default=0, help="base run seed (default: 0)")
    p.add_argument("--config", default=None, help="JSON file of option values")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="debench", description="GPU-style DE benchmark suite on the CPU")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run benchmark trials")
    _add_problem(run, multi=True)
    run.add_argument("--trials", type=int, default=1, help="trials per function (default: 1)")
    run.add_argument("--out", default="results.jsonl", help="results file, appended to (default: results.jsonl)")
    run.add_argument("--name", default=None, help="algorithm id recorded with the results")
    run.add_argument("--processes", type=int, default=1, help="concurrent trials; needs --accuracy-only")
    run.add_argument("--accuracy-only", action="store_true", default=False)

    gen = sub.add_parser("gen-data", help="write generated transform data files")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--dim", "-d", type=int, nargs="+", default=[50, 100])
    gen.add_argument("--function", "-f", type=int, nargs="+", default=ALL_FUNCTIONS)
    gen.add_argument("--out-dir", required=True)

    rank = sub.add_parser("rank", help="rank stored results")
    rank.add_argument("files", nargs="+")
    rank.add_argument("--out-dir", default=None, help="write ranking.csv and scores.csv here")

    trace = sub.add_parser("trace", help="convergence trace of a single trial as CSV")
    _add_problem(trace, multi=False)
    trace.add_argument("--stride", type=int, default=1, help="emit every n-th generation (default: 1)")
    trace.add_argument("--out", default=None, help="CSV path (default: stdout)")

    sub.add_parser("list-functions", help="print the benchmark catalog")
    return parser


def parse_args(argv) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        try:
            cfg = json.loads(Path(args.config).read_text())
        except FileNotFoundError:
            raise DataError(f"config file not found: {args.config}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file {args.config}: {exc}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a JSON object")
        known = set(vars(args))
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
        unknown = set(cfg) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        # re-parse with the file as defaults so explicit flags still win
        sub = parser._subparsers._group_actions[0].choices[args.command]
        sub.set_defaults(**cfg)
        args = parser.parse_args(argv)
    return args


# ---------------------------------------------------------------------------


def _algorithm(args) -> AlgorithmConfig:
    params = ControlParams(F=args.F, CR=args.CR, NP=args.np, jde=args.jde, index_method=args.index_method)
    model = ExecutionModel(args.model, workers=args.workers, islands=args.islands, interval=args.interval, migrants=args.migrants)
    return AlgorithmConfig(params, model, getattr(args, "name", None))


def _data_source(args, functions, dims):
    """(data_dir, gen_seed) to use, after checking that files exist."""
    data_dir = args.data_dir or default_data_dir()
    if data_dir is None:
        return None, 0 if args.gen_seed is None else args.gen_seed
    if args.gen_seed is not None:
        return None, args.gen_seed
    gone = [str(p) for f in functions for D in dims for p in missing_files(data_dir, f, D)]
    if gone:
        raise DataError("missing transform data files (pass --gen-seed to generate instead):\n  " + "\n  ".join(gone))
    return data_dir, 0


def _check_functions(functions) -> None:
    bad = [f for f in functions if f not in CATALOG]
    if bad:
        raise UsageError(f"unknown function ids {bad}; valid ids are 1-10")


def cmd_run(args) -> int:
    _check_functions(args.function)
    algo = _algorithm(args)
    data_dir, gen_seed = _data_source(args, args.function, args.dim)
    for f in args.function:
        for D in args.dim:
            # build once up front so data problems surface before any trial runs
            build_objective(f, D, seed=gen_seed, data_dir=data_dir)

    def progress(rec):
        print(f"{rec.algorithm_id} F{rec.function_id:02d} D={rec.dimension} seed={rec.seed} "
              f"error={rec.final_error:.6g} fes={rec.fes_used} time={rec.wall_clock_seconds:.3f}s", file=sys.stderr)

    records = run_trials(
        [algo], args.function, args.dim, args.trials, args.seed,
        max_fes=args.max_fes, data_dir=data_dir, gen_seed=gen_seed, out_path=args.out,
        processes=args.processes, accuracy_only=args.accuracy_only, on_record=progress,
    )
    groups = defaultdict(list)
    for r in records:
        groups[(r.algorithm_id, r.function_id, r.dimension)].append(r)
    print(f"{'algorithm':<28} {'func':>4} {'D':>4} {'trials':>6} {'solved':>6} {'median_error':>14} {'median_time_s':>13}")
    for (a, f, D), rs in groups.items():
        med_e = statistics.median(r.final_error for r in rs)
        med_t = statistics.median(r.wall_clock_seconds for r in rs)
        print(f"{a:<28} F{f:02d} {D:>4} {len(rs):>6} {sum(r.solved for r in rs):>6} {med_e:>14.6g} {med_t:>13.3f}")
    print(f"results: {args.out}")
    return EXIT_OK


def cmd_gen_data(args) -> int:
    _check_functions(args.function)
    written = 0
    for D in args.dim:
        for f in args.function:
            td = generate_transform_data(args.seed, f, D)
            written += len(write_transform_data(args.out_dir, f, td))
    print(f"wrote {written} files to {args.out_dir}")
    return EXIT_OK


def cmd_rank(args) -> int:
    records = []
    for path in args.files:
        if not Path(path).exists():
            raise DataError(f"results file not found: {path}")
        try:
            records.extend(load_records(path))
        except ValueError as exc:
            raise DataError(str(exc)) from None
    if not records:
        raise DataError("no records to rank")
    report = rank_records(records)
    print(report.to_table())
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "ranking.csv").write_text(report.to_csv())
        (out / "scores.csv").write_text(report.scores_csv())
    return EXIT_OK


def trace_rows(spec, params: ControlParams, rule: StoppingRule, seed: int, model: ExecutionModel, stride: int = 1):
    """(generation, fe_count, elapsed_seconds, best_error) every ``stride`` generations."""
    if stride < 1:
        raise ConfigurationError("stride must be at least 1")
    rows = []

    def observe(state):
        if state.generation % stride == 0:
            rows.append((state.generation, state.fe_count, state.elapsed, state.best_fitness))

    run_model(spec, params, rule, seed, model, observer=observe)
    return rows


def cmd_trace(args) -> int:
    _check_functions([args.function])
    algo = _algorithm(args)
    data_dir, gen_seed = _data_source(args, [args.function], [args.dim])
    spec = build_objective(args.function, args.dim, seed=gen_seed, data_dir=data_dir)
    rule = StoppingRule.for_dimension(args.dim, args.max_fes)
    rows = trace_rows(spec, algo.params, rule, args.seed, algo.model, args.stride)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["generation", "fe_count", "elapsed_seconds", "best_error"])
        for g, fe, t, e in rows:
            w.writerow([g, fe, f"{t:.6f}", repr(e)])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_list_functions(args) -> int:
    print(catalog_markdown())
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "gen-data": cmd_gen_data,
    "rank": cmd_rank,
    "trace": cmd_trace,
    "list-functions": cmd_list_functions,
}


def main(argv: Optional[list] = None) -> int:
    try:
        args = parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"debench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigurationError as exc:
        print(f"debench: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"debench: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except KeyboardInterrupt:
        print("debench: interrupted; completed records are saved", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001 - last-resort exit status
        print(f"debench: failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
