"""Command-line front end: plan, run, validate, cost, emit, bench.

Exit codes are a stable contract: 0 success, 1 for validation or
tolerance failures, 2 for usage errors (argparse's native convention).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import statistics
import sys
import time
from pathlib import Path

import numpy as np

from . import cost_model, oracle, planner, signal_io
from .four_step import FourStepPlan, execute_plan, execute_plan_inverse
from .msl import emit_four_step_kernels, emit_kernel, structural_check
from .stockham import PREFER4, PREFER8, PURE2, FftPlan

_POLICIES = {"prefer8": PREFER8, "prefer4": PREFER4, "pure2": PURE2}
_DEFAULT_VALIDATE_SIZES = tuple(1 << k for k in range(8, 15))  # 256 .. 16384
_TOLERANCE = {"single": 1e-5, "double": 1e-12}
_DTYPE = {"single": np.complex64, "double": np.complex128}
_PRECISION_BYTES = {"single": 8, "double": 16}  # bytes per complex element


def _power_of_two(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if value < 2 or value & (value - 1):
        raise argparse.ArgumentTypeError(f"{value} is not a power of two >= 2")
    return value


def _size_list(text):
    return tuple(_power_of_two(part) for part in text.split(",") if part)


def _design_list(text):
    names = tuple(part.strip() for part in text.split(",") if part.strip())
    for name in names:
        if name not in cost_model.DESIGN_NAMES:
            raise argparse.ArgumentTypeError(
                f"unknown design {name!r}; choose from {', '.join(cost_model.DESIGN_NAMES)}"
            )
    return names


def _hardware(text):
    try:
        return planner.get_model(text)
    except (FileNotFoundError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _plan_dict(plan):
    if isinstance(plan, (planner.DecompositionPlan, FftPlan, FourStepPlan)):
        out = dataclasses.asdict(plan)
        _strip_nested(plan, out)
        return out
    raise TypeError(f"cannot serialize {type(plan).__name__}")


def _strip_nested(plan, out):
    # asdict flattens nested dataclasses but loses their type names; keep them
    if isinstance(plan, planner.DecompositionPlan):
        out["inner"] = _plan_dict(plan.inner)
    elif isinstance(plan, FourStepPlan):
        out["plan_type"] = "four_step"
        out["inner_plan"] = _plan_dict(plan.inner_plan)
        out["outer_plan"] = _plan_dict(plan.outer_plan)
    elif isinstance(plan, FftPlan):
        out["plan_type"] = "single_threadgroup"


def _render_fft_plan(plan, indent):
    pad = " " * indent
    lines = [
        f"{pad}stages ({len(plan.stages)}):",
    ]
    for i, st in enumerate(plan.stages):
        lines.append(
            f"{pad}  [{i}] radix {st.radix}  span {st.span}  "
            f"twiddles {st.twiddle_policy}  access {st.access_class}"
        )
    lines.append(f"{pad}threads per threadgroup: {plan.threads}")
    lines.append(f"{pad}buffer strategy: {plan.buffer_strategy}")
    lines.append(f"{pad}threadgroup bytes: {plan.threadgroup_bytes}")
    lines.append(f"{pad}barriers: {plan.barrier_count}")
    return lines


def _render_plan(plan, indent=0):
    pad = " " * indent
    if isinstance(plan, planner.DecompositionPlan):
        lines = [f"{pad}kind: {plan.kind}", f"{pad}n: {plan.n}"]
        lines.extend(_render_plan(plan.inner, indent))
        lines.append(f"{pad}rationale:")
        lines.extend(f"{pad}  - {r}" for r in plan.rationale)
        return lines
    if isinstance(plan, FourStepPlan):
        lines = [f"{pad}split: {plan.n} = {plan.n1} x {plan.n2}"]
        lines.append(f"{pad}inner (rows of {plan.n2}):")
        lines.extend(_render_plan(plan.inner_plan, indent + 2))
        lines.append(f"{pad}outer (rows of {plan.n1}):")
        lines.extend(_render_plan(plan.outer_plan, indent + 2))
        return lines
    return _render_fft_plan(plan, indent)


def cmd_plan(args):
    policy = _POLICIES[args.policy] if args.policy else None
    plan = planner.synthesize(
        args.size,
        hw=args.hw,
        precision_bytes=_PRECISION_BYTES[args.precision],
        radix_policy=policy,
    )
    if args.json:
        print(json.dumps(_plan_dict(plan), indent=2))
    else:
        print("\n".join(_render_plan(plan)))
    return 0


def cmd_run(args):
    try:
        data = signal_io.read_signal(args.input)
    except (OSError, signal_io.SignalFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if data.size != args.size * args.batch:
        print(
            f"error: file holds {data.size} elements; expected "
            f"size*batch = {args.size * args.batch}",
            file=sys.stderr,
        )
        return 1

    bpe = 8 if data.dtype == np.complex64 else 16
    plan = planner.synthesize(args.size, hw=args.hw, precision_bytes=bpe)
    transform = execute_plan_inverse if args.inverse else execute_plan

    rows = data.reshape(args.batch, args.size)
    out = np.stack([transform(plan.inner, row) for row in rows])
    signal_io.write_signal(args.output, out.reshape(-1).astype(data.dtype))
    return 0


def cmd_validate(args):
    sizes = args.sizes or _DEFAULT_VALIDATE_SIZES
    tolerance = args.tolerance if args.tolerance is not None else _TOLERANCE[args.precision]
    dtype = _DTYPE[args.precision]
    bpe = _PRECISION_BYTES[args.precision]

    worst = None
    worst_label = ""
    failed = False
    for n in sizes:
        for policy_name, policy in _POLICIES.items():
            errs = []
            for trial in range(args.trials):
                x = oracle.random_signal(n, seed=1000 * trial + n, dtype=dtype)
                plan = planner.synthesize(n, hw=args.hw, precision_bytes=bpe, radix_policy=policy)
                got = execute_plan(plan.inner, x)
                ref = oracle.naive_dft(x.astype(np.complex128))
                errs.append(oracle.compare(got, ref))
            top = max(errs, key=lambda e: e.relative_l2)
            ok = top.relative_l2 < tolerance
            failed = failed or not ok
            if worst is None or top.relative_l2 > worst.relative_l2:
                worst, worst_label = top, f"n={n} policy={policy_name}"
            print(
                f"n={n:>6} policy={policy_name:<8} relative_l2={top.relative_l2:.3e} "
                f"{'ok' if ok else 'FAIL'}"
            )
    if worst is not None:
        print(
            f"worst: {worst_label}  relative_l2={worst.relative_l2:.3e}  "
            f"max_abs={worst.max_abs_componentwise:.3e}  tolerance={tolerance:g}"
        )
    return 1 if failed else 0


def _estimate_dict(est):
    return dataclasses.asdict(est)


def cmd_cost(args):
    hw = args.hw
    if args.designs:
        plans = [cost_model.design_plan(name, args.size, hw=hw) for name in args.designs]
        names = {id(plan): name for name, plan in zip(args.designs, plans)}
        ranked = cost_model.rank_designs(plans, hw=hw, batch=args.batch)
        if args.json:
            rows = [
                {"design": names[id(plan)], "estimate": _estimate_dict(est)}
                for plan, est in ranked
            ]
            print(json.dumps(rows, indent=2))
        else:
            print(f"{'design':<10} {'pred_us':>10} {'GFLOPS':>9} {'barriers':>8} {'device_MB':>10}")
            for plan, est in ranked:
                print(
                    f"{names[id(plan)]:<10} {est.predicted_seconds * 1e6:>10.2f} "
                    f"{est.gflops_predicted:>9.1f} {est.barriers:>8} "
                    f"{est.device_bytes / 1e6:>10.2f}"
                )
        return 0

    plan = planner.synthesize(args.size, hw=hw, precision_bytes=_PRECISION_BYTES[args.precision])
    est = cost_model.estimate(plan, hw=hw, batch=args.batch)
    if args.json:
        print(json.dumps({"kind": plan.kind, "estimate": _estimate_dict(est)}, indent=2))
    else:
        print(f"plan kind: {plan.kind}")
        print(f"flops: {est.flops}")
        print(f"threadgroup bytes moved: {est.tier1_bytes}")
        print(f"device bytes moved: {est.device_bytes}")
        print(f"barriers: {est.barriers}")
        print(f"predicted seconds: {est.predicted_seconds:.3e}")
        print(f"predicted GFLOPS: {est.gflops_predicted:.1f}")
    return 0


def cmd_emit(args):
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create {out_dir}: {exc}", file=sys.stderr)
        return 1

    plan = planner.synthesize(args.size, hw=args.hw, precision_bytes=_PRECISION_BYTES[args.precision])
    try:
        if isinstance(plan.inner, FourStepPlan):
            emission = emit_four_step_kernels(plan.inner)
            kernels = emission.kernels
            dispatches = [dataclasses.asdict(d) for d in emission.dispatches]
        else:
            source = emit_kernel(plan.inner)
            report = structural_check(source, plan.inner)
            if not report.passed:
                raise ValueError("structural checks failed: " + "; ".join(report.failures))
            kernels = (source,)
            dispatches = [
                {
                    "entry_point": source.entry_point,
                    "threads_per_threadgroup": plan.inner.threads,
                    "threadgroups_per_grid": "1 per transform",
                    "buffers": ["0: input", "1: natural-order output"],
                }
            ]
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    written = []
    for kernel in kernels:
        path = out_dir / f"{kernel.entry_point}.metal"
        path.write_text(kernel.text, encoding="utf-8")
        written.append(path)
    sidecar = out_dir / f"dispatch_n{args.size}.json"
    sidecar.write_text(json.dumps({"n": args.size, "steps": dispatches}, indent=2) + "\n", encoding="utf-8")
    written.append(sidecar)
    for path in written:
        print(path)
    return 0


def cmd_bench(args):
    dtype = _DTYPE[args.precision]
    plan = planner.synthesize(
        args.size, hw=args.hw, precision_bytes=_PRECISION_BYTES[args.precision]
    )
    rows = [
        oracle.random_signal(args.size, seed=i, dtype=dtype) for i in range(args.batch)
    ]

    def run_once():
        start = time.perf_counter()
        for row in rows:
            execute_plan(plan.inner, row)
        return time.perf_counter() - start

    for _ in range(args.warmup):
        run_once()
    samples = [run_once() for _ in range(args.iterations)]
    med = statistics.median(samples)
    per_fft = med / args.batch
    gflops = cost_model.fft_flops(args.size, args.batch) / med / 1e9
    print(f"host-CPU executor timings (not device numbers), n={args.size} batch={args.batch}")
    print(f"iterations: {args.iterations} (median), warmup: {args.warmup}")
    print(f"median seconds/iteration: {med:.6f}")
    print(f"median seconds/FFT: {per_fft:.6f}")
    print(f"host GFLOPS: {gflops:.3f}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fftforge",
        description="Plan, run, cost, and emit threadgroup-resident FFT decompositions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, precision=True):
        p.add_argument("--hw", type=_hardware, default=planner.M1,
                       help="hardware preset name or model file (default: m1)")
        if precision:
            p.add_argument("--precision", choices=("single", "double"), default="single")

    p = sub.add_parser("plan", help="print the synthesized decomposition for a size")
    p.add_argument("--size", type=_power_of_two, required=True)
    p.add_argument("--policy", choices=sorted(_POLICIES), default=None,
                   help="override the planner's radix choice")
    p.add_argument("--json", action="store_true")
    add_common(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("run", help="transform a signal file")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--size", type=_power_of_two, required=True)
    p.add_argument("--batch", type=int, default=1)
    p.add_argument("--inverse", action="store_true")
    add_common(p, precision=False)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("validate", help="compare the executor against the direct-sum oracle")
    p.add_argument("--sizes", type=_size_list, default=None,
                   help="comma-separated power-of-two sizes (default 256..16384)")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--tolerance", type=float, default=None,
                   help="relative l2 threshold (default: 1e-5 single, 1e-12 double)")
    add_common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("cost", help="evaluate the analytic cost model")
    p.add_argument("--size", type=_power_of_two, required=True)
    p.add_argument("--batch", type=int, default=1)
    p.add_argument("--designs", type=_design_list, default=None,
                   help=f"comma list from: {', '.join(cost_model.DESIGN_NAMES)}")
    p.add_argument("--json", action="store_true")
    add_common(p)
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("emit", help="write compute-kernel source and dispatch sidecar")
    p.add_argument("--size", type=_power_of_two, required=True)
    p.add_argument("--out", default=".")
    add_common(p)
    p.set_defaults(func=cmd_emit)

    p = sub.add_parser("bench", help="time the host executor (regression tracking only)")
    p.add_argument("--size", type=_power_of_two, required=True)
    p.add_argument("--batch", type=int, default=1)
    p.add_argument("--iterations", type=int, default=25)
    p.add_argument("--warmup", type=int, default=5)
    add_common(p)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
