"""Fixed-parameter DE against jDE at several population sizes, ranked per function.

Runs the trials (resumable, appended to --out), then prints the ranking table
with one row per (algorithm, NP) and a final-rank column.

Example (reduced budget):
    python scripts/rank_de_vs_jde.py --dim 50 --trials 5 --max-fes 200000 --out de_vs_jde.jsonl
"""
import argparse
from pathlib import Path

from debench.bench import AlgorithmConfig, rank_records, run_trials
from debench.core import ControlParams
from debench.exec import ExecutionModel


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dim", type=int, default=50)
    ap.add_argument("--pop-sizes", type=int, nargs="+", default=[50, 100, 250, 500])
    ap.add_argument("--functions", type=int, nargs="+", default=list(range(1, 11)))
    ap.add_argument("--trials", type=int, default=30)
    ap.add_argument("--max-fes", type=int, default=None, help="default: 100000 x dim")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="de_vs_jde.jsonl")
    ap.add_argument("--report-dir", default=None)
    args = ap.parse_args()

    model = ExecutionModel("fused", workers=args.workers)
    algos = []
    for NP in args.pop_sizes:
        algos.append(AlgorithmConfig(ControlParams(NP=NP, F=0.5, CR=0.3), model, name=f"de-NP{NP}"))
    for NP in args.pop_sizes:
        algos.append(AlgorithmConfig(ControlParams(NP=NP, F=0.5, CR=0.9, jde=True), model, name=f"jde-NP{NP}"))

    def progress(r):
        print(f"{r.algorithm_id:<10} F{r.function_id:02d} seed={r.seed} error={r.final_error:.4g} t={r.wall_clock_seconds:.2f}s")

    records = run_trials(algos, args.functions, [args.dim], args.trials, args.seed,
                         max_fes=args.max_fes, out_path=args.out, on_record=progress)
    report = rank_records(records)
    print()
    print(report.to_table())
    if args.report_dir:
        out = Path(args.report_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "ranking.csv").write_text(report.to_csv())
        (out / "scores.csv").write_text(report.scores_csv())


if __name__ == "__main__":
    main()
