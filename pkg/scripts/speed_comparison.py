"""Wall-clock comparison of the execution models (desk-scale analog of a speedup table).

Example:
    python scripts/speed_comparison.py --functions 8 9 10 --dim 100 --max-fes 250000 --repeats 5
"""
import argparse
import os
import statistics

from debench.core import ControlParams
from debench.exec import ExecutionModel, run_model
from debench.functions import build_objective
from debench.termination import StoppingRule

MODELS = ["sequential", "master_slave", "batch_offload", "phased", "fused"]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--functions", type=int, nargs="+", default=[8, 9, 10])
    ap.add_argument("--dim", type=int, default=100)
    ap.add_argument("--np", type=int, default=250)
    ap.add_argument("--max-fes", type=int, default=250_000)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--models", nargs="+", default=MODELS, choices=MODELS)
    args = ap.parse_args()

    params = ControlParams(NP=args.np)
    rule = StoppingRule(args.max_fes)
    print(f"cores={os.cpu_count()} workers={args.workers} D={args.dim} NP={args.np} FEs={args.max_fes}")
    header = f"{'model':<14}" + "".join(f"{'F%02d' % f:>12}" for f in args.functions)
    print(header + f"{'speedup':>10}")
    base = None
    for name in args.models:
        model = ExecutionModel(name, workers=args.workers)
        meds = []
        for fid in args.functions:
            spec = build_objective(fid, args.dim)
            run_model(spec, params, StoppingRule(args.np * 2), 0, model)  # warm-up / compile
            times = [run_model(spec, params, rule, s, model).wall_clock for s in range(args.repeats)]
            meds.append(statistics.median(times))
        base = base or meds
        speedup = statistics.mean(b / m for b, m in zip(base, meds))
        print(f"{name:<14}" + "".join(f"{m:>12.3f}" for m in meds) + f"{speedup:>9.2f}x")


if __name__ == "__main__":
    main()
