"""Metal compute-kernel source generation for Stockham plans.

The emitted kernels mirror the modeled execution exactly: one statically
unrolled block per stage with compile-time strides, device-memory bypass
on the first read and last write, a barrier pair per interior stage
boundary, and per-butterfly twiddles from a single sincos extended by
chained complex multiplies. Address formulas come from the same stage
geometry the host executor runs, so the oracle tests that pin the
executor pin the kernels' indexing too.

Nothing here talks to a GPU. Output is deterministic to the byte --
golden-file tests treat any drift as a failure -- and structural_check
verifies the invariants (barrier count, stage count, buffer size, thread
shape) without a Metal toolchain.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .four_step import FourStepPlan
from .stockham import (
    CHAINED_SINGLE_SINCOS,
    FftPlan,
    count_barriers,
    gather_index,
    scatter_index,
    stage_stride,
)

_BARRIER = "threadgroup_barrier(mem_flags::mem_threadgroup);"

_PREAMBLE = """\
#include <metal_stdlib>

using namespace metal;

static inline float2 cmul(float2 a, float2 b) {
    return float2(a.x * b.x - a.y * b.y, a.x * b.y + a.y * b.x);
}
"""

_RADIX2 = """\
static inline void radix2(thread float2* v) {
    const float2 a = v[0];
    v[0] = a + v[1];
    v[1] = a - v[1];
}
"""

_RADIX4 = """\
static inline void radix4(thread float2* v) {
    const float2 t0 = v[0] + v[2];
    const float2 t1 = v[0] - v[2];
    const float2 t2 = v[1] + v[3];
    const float2 t3 = float2(v[1].y - v[3].y, v[3].x - v[1].x);  // -i * (v1 - v3)
    v[0] = t0 + t2;
    v[1] = t1 + t3;
    v[2] = t0 - t2;
    v[3] = t1 - t3;
}
"""

_RADIX8 = """\
constant float RSQRT2 = 0.7071067811865476f;

static inline void radix8(thread float2* v) {
    float2 e[4] = { v[0], v[2], v[4], v[6] };
    float2 o[4] = { v[1], v[3], v[5], v[7] };
    radix4(e);
    radix4(o);
    o[1] = cmul(o[1], float2(RSQRT2, -RSQRT2));
    o[2] = cmul(o[2], float2(0.0f, -1.0f));
    o[3] = cmul(o[3], float2(-RSQRT2, -RSQRT2));
    v[0] = e[0] + o[0];
    v[1] = e[1] + o[1];
    v[2] = e[2] + o[2];
    v[3] = e[3] + o[3];
    v[4] = e[0] - o[0];
    v[5] = e[1] - o[1];
    v[6] = e[2] - o[2];
    v[7] = e[3] - o[3];
}
"""

_CORE_SNIPPETS = {2: _RADIX2, 4: _RADIX4, 8: _RADIX8}
_CORE_NAMES = {2: "radix2", 4: "radix4", 8: "radix8"}


@dataclass(frozen=True)
class PlanDigest:
    n: int
    radices: tuple[int, ...]
    threads: int
    barriers: int
    threadgroup_bytes: int


@dataclass(frozen=True)
class KernelSource:
    text: str
    entry_point: str
    digest: PlanDigest


@dataclass(frozen=True)
class DispatchStep:
    entry_point: str
    threads_per_threadgroup: int
    threadgroups_per_grid: str
    buffers: tuple[str, ...]


@dataclass(frozen=True)
class FourStepEmission:
    kernels: tuple[KernelSource, ...]
    dispatches: tuple[DispatchStep, ...]


@dataclass(frozen=True)
class CheckReport:
    passed: bool
    failures: tuple[str, ...]


def entry_point_name(plan):
    return f"fft_n{plan.n}_r" + "".join(str(r) for r in plan.radices)


def _offset_expr(base, terms):
    # render "base + c1*var1 + c2" style index expressions, dropping zeros
    parts = [base] if base else []
    for coeff, var in terms:
        if var is None:
            if coeff:
                parts.append(f"{coeff}u")
        elif coeff == 1:
            parts.append(var)
        elif coeff:
            parts.append(f"{coeff}u * {var}")
    return " + ".join(parts) if parts else "0u"


def _index_terms(index_fn, n, L, r, s, j, p_var, q_var):
    """Affine (coefficient, variable) terms of a shared index function.

    The emitters never hand-roll address formulas: coefficients are read
    off gather_index / scatter_index so the kernels, the vectorized
    executor, and the scalar reference all share one addressing
    definition. Probing the far corner guards against the functions ever
    becoming non-affine without this code noticing.
    """
    const = index_fn(n, L, r, 0, 0, j)
    p_coeff = index_fn(n, L, r, 1, 0, j) - const if L > 1 else 0
    q_coeff = index_fn(n, L, r, 0, 1, j) - const if s > 1 else 0
    corner = index_fn(n, L, r, L - 1, s - 1, j)
    if corner != const + p_coeff * (L - 1) + q_coeff * (s - 1):
        raise AssertionError("stage index function is not affine in (p, q)")
    return [(p_coeff, p_var), (q_coeff, q_var), (const, None)]


def _emit_stage(lines, plan, t, stage):
    n = plan.n
    r = stage.radix
    L = stage.span
    s = stage_stride(n, L, r)
    first = t == 0
    last = t == len(plan.stages) - 1
    bpt = max(1, n // (plan.threads * r))
    src = "in" if first else "buf"
    dst = "out" if last else "buf"
    src_base = "base" if first else None
    dst_base = "base" if last else None

    lines.append(f"    // pass {t}: radix {r}, span {L}, stride {s}")
    lines.append("    {")

    # register tiles and per-butterfly coordinates for every unroll rep
    for u in range(bpt):
        b = f"tid + {u * plan.threads}u" if u else "tid"
        if bpt > 1:
            lines.append(f"        const uint b{u} = {b};")
            b = f"b{u}"
        if L == 1:
            lines.append(f"        const uint q{u} = {b};")
        elif s == 1:
            lines.append(f"        const uint p{u} = {b};")
        else:
            lines.append(f"        const uint p{u} = {b} / {s}u;")
            lines.append(f"        const uint q{u} = {b} % {s}u;")
        lines.append(f"        float2 v{u}[{r}];")

    for u in range(bpt):
        for j in range(r):
            terms = _index_terms(gather_index, n, L, r, s, j, f"p{u}", f"q{u}")
            idx = _offset_expr(src_base, terms)
            lines.append(f"        v{u}[{j}] = {src}[{idx}];")

    if not first:
        lines.append("        " + _BARRIER + "  // all reads done; buf may be overwritten")

    # twiddle + butterfly + scatter per rep
    for u in range(bpt):
        if L > 1:
            m = L * r
            lines.append(f"        const float ang{u} = -2.0f * M_PI_F * (float)p{u} / {m}.0f;")
            lines.append(f"        float cw{u};")
            lines.append(f"        const float sw{u} = sincos(ang{u}, cw{u});")
            lines.append(f"        const float2 w1_{u} = float2(cw{u}, sw{u});")
            lines.append(f"        v{u}[1] = cmul(v{u}[1], w1_{u});")
            if r > 2:
                lines.append(f"        float2 wj{u} = w1_{u};")
                for j in range(2, r):
                    lines.append(f"        wj{u} = cmul(wj{u}, w1_{u});")
                    lines.append(f"        v{u}[{j}] = cmul(v{u}[{j}], wj{u});")
        lines.append(f"        {_CORE_NAMES[r]}(v{u});")
        for j in range(r):
            terms = _index_terms(scatter_index, n, L, r, s, j, f"p{u}", f"q{u}")
            idx = _offset_expr(dst_base, terms)
            lines.append(f"        {dst}[{idx}] = v{u}[{j}];")

    if not last:
        lines.append("        " + _BARRIER + "  // writes visible to every thread")
    lines.append("    }")


def emit_kernel(plan):
    """Render one single-threadgroup plan as Metal source.

    One threadgroup per transform: threadgroup_position_in_grid selects
    the batch element. Rejects four-step plans (use
    emit_four_step_kernels) and plans whose stages use the direct twiddle
    policy, which exists for error-bounding on the host only.
    """
    if isinstance(plan, FourStepPlan):
        raise ValueError("four-step plans emit a kernel set; use emit_four_step_kernels")
    if not isinstance(plan, FftPlan):
        raise TypeError(f"expected an FftPlan, got {type(plan).__name__}")
    for stage in plan.stages:
        if stage.twiddle_policy != CHAINED_SINGLE_SINCOS:
            raise ValueError("kernels implement the chained single-sincos twiddle scheme only")
    if plan.shuffle_boundaries:
        raise ValueError("the shuffle-hybrid variant is a cost-model template; it has no emitter")
    if plan.n % (plan.threads * min(plan.radices)) and plan.n // min(plan.radices) % plan.threads:
        raise ValueError(f"threads={plan.threads} does not tile n={plan.n} butterflies evenly")

    entry = entry_point_name(plan)
    single_stage = len(plan.stages) == 1
    radix_set = sorted(set(plan.radices))
    if 8 in radix_set and 4 not in radix_set:
        radix_set.insert(0, 4)  # radix8 builds on the radix4 core

    parts = [_PREAMBLE]
    for r in radix_set:
        parts.append(_CORE_SNIPPETS[r])

    lines = []
    lines.append(f"[[max_total_threads_per_threadgroup({plan.threads})]]")
    lines.append(f"kernel void {entry}(")
    lines.append("    device const float2* in [[buffer(0)]],")
    lines.append("    device float2* out [[buffer(1)]],")
    lines.append("    uint tid [[thread_position_in_threadgroup]],")
    lines.append("    uint tgid [[threadgroup_position_in_grid]])")
    lines.append("{")
    if not single_stage:
        lines.append(f"    threadgroup float2 buf[{plan.n}];")
    lines.append(f"    const uint base = tgid * {plan.n}u;")
    for t, stage in enumerate(plan.stages):
        lines.append("")
        _emit_stage(lines, plan, t, stage)
    lines.append("}")
    parts.append("\n".join(lines) + "\n")

    text = "\n".join(parts)
    digest = PlanDigest(
        n=plan.n,
        radices=plan.radices,
        threads=plan.threads,
        barriers=count_barriers(plan),
        threadgroup_bytes=plan.threadgroup_bytes,
    )
    return KernelSource(text=text, entry_point=entry, digest=digest)


def _emit_transpose(n, n1, n2):
    entry = f"twiddle_transpose_{n1}x{n2}"
    text = f"""{_PREAMBLE}
kernel void {entry}(
    device const float2* in [[buffer(0)]],
    device float2* out [[buffer(1)]],
    uint gid [[thread_position_in_grid]])
{{
    if (gid >= {n}u) {{
        return;
    }}
    const uint j = gid / {n2}u;
    const uint k = gid % {n2}u;
    const float ang = -2.0f * M_PI_F * (float)((j * k) % {n}u) / {n}.0f;
    float cw;
    const float sw = sincos(ang, cw);
    out[k * {n1}u + j] = cmul(in[gid], float2(cw, sw));
}}
"""
    digest = PlanDigest(n=n, radices=(), threads=256, barriers=0, threadgroup_bytes=0)
    return KernelSource(text=text, entry_point=entry, digest=digest)


def emit_four_step_kernels(plan):
    """Kernel set + dispatch sequence for a four-step plan.

    Inner FFT, twiddle-transpose, outer FFT -- the inner kernel is
    byte-identical to what emit_kernel produces for the same inner plan
    standalone. Multi-level plans flatten recursively: the outer slot
    expands into its own (inner, transpose, outer) triple.
    """
    if not isinstance(plan, FourStepPlan):
        raise TypeError(f"expected a FourStepPlan, got {type(plan).__name__}")
    inner = emit_kernel(plan.inner_plan)
    transpose = _emit_transpose(plan.n, plan.n1, plan.n2)

    kernels = [inner, transpose]
    dispatches = [
        DispatchStep(
            entry_point=inner.entry_point,
            threads_per_threadgroup=plan.inner_plan.threads,
            threadgroups_per_grid=f"{plan.n1} per transform",
            buffers=("0: stride-permuted input", "1: row-transform scratch"),
        ),
        DispatchStep(
            entry_point=transpose.entry_point,
            threads_per_threadgroup=256,
            threadgroups_per_grid=f"{(plan.n + 255) // 256} per transform",
            buffers=("0: row-transform scratch", "1: transposed scratch"),
        ),
    ]
    if isinstance(plan.outer_plan, FourStepPlan):
        sub = emit_four_step_kernels(plan.outer_plan)
        kernels.extend(sub.kernels)
        dispatches.extend(sub.dispatches)
    else:
        outer = emit_kernel(plan.outer_plan)
        kernels.append(outer)
        dispatches.append(
            DispatchStep(
                entry_point=outer.entry_point,
                threads_per_threadgroup=plan.outer_plan.threads,
                threadgroups_per_grid=f"{plan.n2} per transform",
                buffers=("0: transposed scratch", "1: natural-order output"),
            )
        )
    return FourStepEmission(kernels=tuple(kernels), dispatches=tuple(dispatches))


_BUF_DECL = re.compile(r"threadgroup float2 buf\[(\d+)\];")
_THREAD_ATTR = re.compile(r"\[\[max_total_threads_per_threadgroup\((\d+)\)\]\]")


def structural_check(source, plan):
    """Verify a kernel's structure against its plan without compiling.

    Checks: barrier statements match count_barriers, one pass block per
    stage, the threadgroup buffer is declared at exactly n (or absent for
    a single-stage bypass plan), and the thread-shape attribute and digest
    agree with the plan.
    """
    failures = []

    barriers = source.text.count(_BARRIER)
    expected = count_barriers(plan)
    if barriers != expected:
        failures.append(f"barrier count {barriers} != expected {expected}")

    passes = len(re.findall(r"^    // pass \d+:", source.text, flags=re.M))
    if passes != len(plan.stages):
        failures.append(f"pass blocks {passes} != stages {len(plan.stages)}")

    decls = _BUF_DECL.findall(source.text)
    if len(plan.stages) == 1:
        if decls:
            failures.append("single-stage plan must not declare a threadgroup buffer")
    elif len(decls) != 1:
        failures.append(f"expected exactly one threadgroup buffer declaration, found {len(decls)}")
    elif int(decls[0]) != plan.n:
        failures.append(f"threadgroup buffer length {decls[0]} != n {plan.n}")

    attr = _THREAD_ATTR.search(source.text)
    if attr is None:
        failures.append("missing max_total_threads_per_threadgroup attribute")
    elif int(attr.group(1)) != plan.threads:
        failures.append(f"thread attribute {attr.group(1)} != plan threads {plan.threads}")

    if source.digest.threads != plan.threads:
        failures.append(f"digest threads {source.digest.threads} != plan threads {plan.threads}")
    if source.digest.n != plan.n:
        failures.append(f"digest n {source.digest.n} != plan n {plan.n}")
    if source.digest.radices != plan.radices:
        failures.append(f"digest radices {source.digest.radices} != plan {plan.radices}")

    return CheckReport(passed=not failures, failures=tuple(failures))
