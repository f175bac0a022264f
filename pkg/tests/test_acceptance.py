"""End-to-end acceptance: one test per shipping criterion.

Each test prints a single summary line (visible with -s; pytest -v gives
the pass/fail line per criterion either way) and asserts the stated
tolerance. Criteria that carry a runtime budget assert it too.
"""

import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from fftforge.butterflies import butterfly_radix8_splitradix, dft8_matrix, mma_complex_multiply, mma_flop_ratio
from fftforge.complex_core import DOUBLE
from fftforge.cost_model import DESIGN_NAMES, design_plan, estimate, rank_designs
from fftforge.four_step import build_four_step, execute_four_step
from fftforge.msl import KernelSource, emit_kernel, structural_check
from fftforge.oracle import compare, naive_dft_batch, random_signal
from fftforge.planner import DOUBLE_BUFFERED, M1, REGISTER_RESIDENT, REGISTER_TILED

REPO = Path(__file__).resolve().parents[1]


def test_criterion_1_oracle_equivalence():
    start = time.monotonic()
    from fftforge.stockham import PREFER4, PREFER8, make_plan, run_stages

    worst_single = 0.0
    worst_double = 0.0
    for k in range(2, 13):
        n = 1 << k
        signals = np.stack([random_signal(n, seed=100 * k + s) for s in range(20)])
        reference = naive_dft_batch(signals)
        for policy in (PREFER4, PREFER8):
            plan = make_plan(n, policy)
            out_d = run_stages(plan, signals)
            out_s = run_stages(plan, signals.astype(np.complex64))
            for row in range(20):
                err_d = compare(out_d[row], reference[row]).relative_l2
                err_s = compare(out_s[row], reference[row]).relative_l2
                worst_double = max(worst_double, err_d)
                worst_single = max(worst_single, err_s)
    elapsed = time.monotonic() - start
    assert worst_single < 1e-5, f"single-precision worst relative_l2 {worst_single:.3e}"
    assert worst_double < 1e-12, f"double-precision worst relative_l2 {worst_double:.3e}"
    assert elapsed < 60.0, f"criterion 1 runtime {elapsed:.1f}s exceeds 60s"
    print(
        f"criterion 1 PASS: oracle equivalence 4..4096 x2 policies x20 seeds, "
        f"worst single {worst_single:.2e}, double {worst_double:.2e}, {elapsed:.1f}s"
    )


def test_criterion_2_four_step_equivalence():
    start = time.monotonic()
    from fftforge.stockham import PREFER8, execute, make_plan

    worst_oracle = 0.0
    worst_cross = 0.0
    for n in (8192, 16384, 32768):
        plan = build_four_step(n, 4096, PREFER8)
        x = random_signal(n, seed=n)
        got = execute_four_step(plan, x)
        ref = naive_dft_batch(x[None, :])[0]
        worst_oracle = max(worst_oracle, compare(got, ref).relative_l2)

        xs = x.astype(np.complex64)
        direct = execute(make_plan(n, PREFER8), xs)
        stepped = execute_four_step(plan, xs)
        worst_cross = max(worst_cross, compare(stepped, direct).relative_l2)
    elapsed = time.monotonic() - start
    assert worst_oracle < 1e-12, f"four-step vs oracle worst {worst_oracle:.3e}"
    assert worst_cross < 1e-5, f"four-step vs direct worst {worst_cross:.3e}"
    assert elapsed < 120.0, f"criterion 2 runtime {elapsed:.1f}s exceeds 120s"
    print(
        f"criterion 2 PASS: four-step 8192/16384/32768, oracle {worst_oracle:.2e}, "
        f"vs direct {worst_cross:.2e}, {elapsed:.1f}s"
    )


def test_criterion_3_planner_constants():
    from fftforge.four_step import four_step_split
    from fftforge.planner import max_local_fft, select_radix
    from fftforge.stockham import PREFER4, make_plan

    assert max_local_fft(M1, 8, REGISTER_TILED) == 4096
    assert max_local_fft(M1, 8, DOUBLE_BUFFERED) == 2048
    assert max_local_fft(M1, 8, REGISTER_RESIDENT) == 8192
    assert four_step_split(8192, 4096) == (2, 4096)
    assert four_step_split(16384, 4096) == (4, 4096)
    table = {256: (64, 4), 512: (128, 5), 1024: (256, 5), 2048: (512, 6), 4096: (1024, 6)}
    for n, (threads, stages) in table.items():
        plan = make_plan(n, PREFER4)
        assert plan.threads == threads, f"n={n} threads {plan.threads} != {threads}"
        assert len(plan.stages) == stages, f"n={n} stages {len(plan.stages)} != {stages}"
    choice = select_radix(M1)
    assert choice.profile.radix == 8 and not choice.degraded
    print("criterion 3 PASS: capacity/split/thread/stage constants and radix selection exact")


def test_criterion_4_barrier_accounting():
    from fftforge.stockham import PREFER4, PREFER8, count_barriers, make_plan

    r8 = count_barriers(make_plan(4096, PREFER8))
    r4 = count_barriers(make_plan(4096, PREFER4))
    assert r8 == 6, f"radix-8 4096 barriers {r8} != 6"
    assert r4 == 10, f"radix-4 4096 barriers {r4} != 10"
    print("criterion 4 PASS: barrier counts 6 (radix-8) and 10 (radix-4) at n=4096")


def test_criterion_5_butterfly_identities():
    f8 = dft8_matrix(DOUBLE)
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(1000):
        x = (rng.uniform(-1, 1, 8) + 1j * rng.uniform(-1, 1, 8)).astype(np.complex64)
        got = butterfly_radix8_splitradix(x)
        want = f8 @ x.astype(np.complex128)
        worst = max(worst, float(np.abs(got - want).max()))
    assert worst < 1e-5, f"split-radix vs F8 worst componentwise {worst:.3e}"

    x = rng.uniform(-1, 1, (8, 8)) + 1j * rng.uniform(-1, 1, (8, 8))
    y_re, y_im = mma_complex_multiply(f8.real.copy(), f8.imag.copy(), x.real.copy(), x.imag.copy())
    want = f8 @ x
    assert np.abs(y_re - want.real).max() < 1e-5
    assert np.abs(y_im - want.imag).max() < 1e-5

    ratio = mma_flop_ratio()
    assert 3.0 <= ratio <= 4.0, f"mma flop ratio {ratio} outside [3, 4]"
    print(f"criterion 5 PASS: radix-8 worst {worst:.2e} over 1000 vectors, mma ratio {ratio:.2f}")


def test_criterion_6_cost_model_ordinal():
    from fftforge.planner import synthesize

    plans = [design_plan(name, 4096) for name in DESIGN_NAMES]
    names = {id(p): name for name, p in zip(DESIGN_NAMES, plans)}
    ranked = rank_designs(plans, batch=256)
    order = [names[id(p)] for p, _ in ranked]
    assert order[0] == "radix8", f"expected radix8 first, got {order}"
    assert order[-1] == "shuffle", f"expected shuffle last, got {order}"

    rates = [estimate(synthesize(n)).gflops_predicted for n in (256, 512, 1024, 2048, 4096)]
    assert all(b >= a for a, b in zip(rates, rates[1:])), f"rate trend broken: {rates}"
    rate_8k = estimate(synthesize(8192)).gflops_predicted
    assert rate_8k < rates[-1], f"no four-step cliff: {rate_8k} vs {rates[-1]}"
    print(f"criterion 6 PASS: ranking {order}, trend {['%.0f' % r for r in rates]} then {rate_8k:.0f}")


def test_criterion_7_emitter_structural_suite():
    from fftforge.planner import synthesize
    from fftforge.stockham import PREFER4, PREFER8, make_plan

    for k in range(8, 13):
        plan = synthesize(1 << k).inner
        report = structural_check(emit_kernel(plan), plan)
        assert report.passed, f"n={1 << k}: {report.failures}"

    golden = Path(__file__).parent / "golden"
    configs = [(n, PREFER4) for n in (256, 512, 1024, 2048, 4096)] + [(4096, PREFER8)]
    for n, policy in configs:
        src = emit_kernel(make_plan(n, policy))
        path = golden / f"{src.entry_point}.metal"
        assert path.read_text(encoding="utf-8") == src.text, f"golden drift: {path.name}"

    plan = make_plan(4096, PREFER8)
    src = emit_kernel(plan)
    broken = KernelSource(
        text=src.text.replace("threadgroup_barrier(mem_flags::mem_threadgroup);", "", 1),
        entry_point=src.entry_point,
        digest=src.digest,
    )
    assert not structural_check(broken, plan).passed
    assert not structural_check(src, make_plan(2048, PREFER8)).passed
    print("criterion 7 PASS: structural checks, byte-stable goldens, negatives reject")


def test_criterion_8_property_suite():
    result = subprocess.run(
        [sys.executable, "-m", "pytest", str(REPO / "tests" / "test_properties.py"),
         "-q", "-p", "no:cacheprovider"],
        capture_output=True,
        text=True,
        cwd=REPO,
    )
    assert result.returncode == 0, f"property suite failed:\n{result.stdout}\n{result.stderr}"
    summary = [ln for ln in result.stdout.splitlines() if "passed" in ln]
    print(f"criterion 8 PASS: property suite green under the generative harness ({summary[-1].strip()})")
