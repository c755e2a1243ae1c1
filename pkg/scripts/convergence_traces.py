"""Error-versus-time traces for several configurations on one function, as CSV.

Each row: config, generation, fe_count, elapsed_seconds, best_error.  Plot with
any tool; nothing here draws figures.

Example:
    python scripts/convergence_traces.py --function 10 --dim 50 --max-fes 500000 --stride 20 > f10.csv
"""
import argparse
import csv
import sys

from debench.cli import trace_rows
from debench.core import ControlParams
from debench.exec import ExecutionModel
from debench.functions import build_objective
from debench.termination import StoppingRule


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--function", type=int, default=10)
    ap.add_argument("--dim", type=int, default=50)
    ap.add_argument("--pop-sizes", type=int, nargs="+", default=[50, 100, 250])
    ap.add_argument("--max-fes", type=int, default=None)
    ap.add_argument("--stride", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    spec = build_objective(args.function, args.dim)
    rule = StoppingRule.for_dimension(args.dim, args.max_fes)
    model = ExecutionModel("fused", workers=1)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["config", "generation", "fe_count", "elapsed_seconds", "best_error"])
    for NP in args.pop_sizes:
        for label, params in (("de", ControlParams(NP=NP)), ("jde", ControlParams(NP=NP, CR=0.9, jde=True))):
            for g, fe, t, e in trace_rows(spec, params, rule, args.seed, model, args.stride):
                w.writerow([f"{label}-NP{NP}", g, fe, f"{t:.6f}", repr(e)])


if __name__ == "__main__":
    main()
