#!/usr/bin/env python3
"""Sweep the cost model across sizes and print the predicted-rate table.

For every size the script synthesizes a plan, estimates it, and reports
traffic and predicted GFLOPS, so the single-threadgroup ramp and the
four-step cliff are visible at a glance. With --designs it instead ranks
the fixed 4096-point design variants at each batch size.
"""

import argparse
import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from fftforge.cost_model import DESIGN_NAMES, design_plan, estimate, rank_designs
from fftforge.planner import M1, synthesize


def sweep_sizes(sizes, batch):
    rows = []
    for n in sizes:
        plan = synthesize(n)
        est = estimate(plan, hw=M1, batch=batch)
        rows.append(
            {
                "n": n,
                "kind": plan.kind,
                "flops": est.flops,
                "device_bytes": est.device_bytes,
                "barriers": est.barriers,
                "predicted_s": est.predicted_seconds,
                "gflops": est.gflops_predicted,
            }
        )
    return rows


def sweep_designs(n, batches):
    rows = []
    plans = {name: design_plan(name, n) for name in DESIGN_NAMES}
    names = {id(plan): name for name, plan in plans.items()}
    for batch in batches:
        ranked = rank_designs(list(plans.values()), hw=M1, batch=batch)
        rows.append(
            {
                "batch": batch,
                "order": [names[id(p)] for p, _ in ranked],
                "gflops": {names[id(p)]: e.gflops_predicted for p, e in ranked},
            }
        )
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="*", default=[1 << k for k in range(8, 16)])
    ap.add_argument("--batch", type=int, default=256)
    ap.add_argument("--designs", action="store_true", help="rank design variants instead")
    ap.add_argument("--json", action="store_true", help="machine-readable output")
    args = ap.parse_args(argv)

    if args.designs:
        rows = sweep_designs(4096, batches=[1, 16, args.batch])
        if args.json:
            print(json.dumps(rows, indent=2))
            return 0
        for row in rows:
            rates = ", ".join(f"{k}={v:.1f}" for k, v in row["gflops"].items())
            print(f"batch {row['batch']:>5}: {' > '.join(row['order'])}  ({rates})")
        return 0

    rows = sweep_sizes(args.sizes, args.batch)
    if args.json:
        print(json.dumps(rows, indent=2))
        return 0
    print(f"{'n':>7} {'kind':<22} {'device MiB':>10} {'barriers':>8} {'pred us':>9} {'GFLOPS':>8}")
    for row in rows:
        print(
            f"{row['n']:>7} {row['kind']:<22} {row['device_bytes'] / 2**20:>10.2f} "
            f"{row['barriers']:>8} {row['predicted_s'] * 1e6:>9.2f} {row['gflops']:>8.1f}"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
