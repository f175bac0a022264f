"""Analytical cost model over the two-tier memory hierarchy.

Estimates are for *ranking* designs, not for predicting wall clock:
compute assumes every ALU busy, memory assumes rated peak bandwidth
per access class, and the two overlap perfectly (predicted time is their
max, plus serialized barrier cost). Absolute GFLOPS out of this model are
therefore optimistic; the orderings -- fewer barriers beating more,
sequential access beating scattered, the four-step cliff past the
single-threadgroup ceiling -- are the product.

FLOP counts use the 5*n*log2(n) reporting convention throughout so rates
stay comparable across designs regardless of each radix's true operation
mix.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .four_step import FourStepPlan
from .planner import (
    M1,
    DecompositionPlan,
    SINGLE_THREADGROUP,
    max_local_fft,
    thread_count,
)
from .stockham import (
    FftPlan,
    PREFER4,
    PREFER8,
    SCATTERED,
    SEQUENTIAL,
    count_barriers,
    make_plan,
    require_power_of_two,
)

DESIGN_NAMES = ("radix4", "radix8", "shuffle")

# Twiddle cost of a four-step transpose: one complex multiply per element.
_TRANSPOSE_FLOPS_PER_ELEMENT = 6


@dataclass(frozen=True)
class CostEstimate:
    flops: int
    tier1_bytes: int
    tier2_bytes: int
    device_bytes: int
    barriers: int
    barrier_cycles: float
    predicted_seconds: float
    gflops_predicted: float


@dataclass(frozen=True)
class ThesisComparison:
    """Capability ratios between two hardware models (b relative to a)."""

    max_local_fft_a: int
    max_local_fft_b: int
    local_fft_ratio: float
    shared_memory_ratio: float
    register_file_ratio: float
    dram_bandwidth_ratio: float


def fft_flops(n, batch=1):
    """Reported FLOPs for a batch of n-point transforms: 5*n*log2(n)*batch."""
    require_power_of_two(n, "fft size")
    if batch < 1:
        raise ValueError(f"batch must be >= 1, got {batch}")
    return 5 * n * (n.bit_length() - 1) * batch


@dataclass
class _Traffic:
    # per-transform totals, accumulated over the plan tree
    flops: int = 0
    tier1_bytes: int = 0
    tier2_bytes: int = 0
    tg_seconds: float = 0.0
    transpose_device_bytes: int = 0
    barriers: int = 0

    def add_scaled(self, other, k):
        self.flops += k * other.flops
        self.tier1_bytes += k * other.tier1_bytes
        self.tier2_bytes += k * other.tier2_bytes
        self.tg_seconds += k * other.tg_seconds
        self.transpose_device_bytes += k * other.transpose_device_bytes
        self.barriers += k * other.barriers


def _tg_bandwidth(hw, access_class):
    # scattered access degrades to the strided figure; the model carries
    # no separate bandwidth for it.
    if access_class == SEQUENTIAL:
        return hw.tg_bw_sequential_bytes_per_sec
    return hw.tg_bw_strided_bytes_per_sec


def _plan_traffic(plan, hw, bpe):
    t = _Traffic()
    if isinstance(plan, FourStepPlan):
        inner = _plan_traffic(plan.inner_plan, hw, bpe)
        outer = _plan_traffic(plan.outer_plan, hw, bpe)
        t.add_scaled(inner, plan.n1)
        t.add_scaled(outer, plan.n2)
        # transpose: one full write + read pass through device memory,
        # plus one twiddle multiply per element on the way through
        t.transpose_device_bytes += 2 * plan.n * bpe
        t.flops += _TRANSPOSE_FLOPS_PER_ELEMENT * plan.n
        return t

    n = plan.n
    stages = plan.stages
    t.flops = fft_flops(n)
    t.tier1_bytes = 2 * len(stages) * n * bpe
    t.barriers = count_barriers(plan)
    for i, stage in enumerate(stages):
        read_b = 0 if i == 0 else n * bpe          # first stage reads device
        write_b = 0 if i == len(stages) - 1 else n * bpe  # last writes device
        t.tier2_bytes += read_b + write_b
        t.tg_seconds += (read_b + write_b) / _tg_bandwidth(hw, stage.access_class)
    return t


def estimate(plan, hw=M1, batch=1, bytes_per_element=8):
    """Cost a DecompositionPlan (or bare FftPlan/FourStepPlan) at a batch size.

    predicted_seconds = max(compute, memory) + barriers; memory covers
    threadgroup traffic at per-access-class bandwidth plus device traffic
    for input, output and four-step transposes; barriers are serialized at
    the model's per-barrier cycle cost.
    """
    if isinstance(plan, DecompositionPlan):
        plan = plan.inner
    if batch < 1:
        raise ValueError(f"batch must be >= 1, got {batch}")
    t = _plan_traffic(plan, hw, bytes_per_element)
    n = plan.n

    flops = t.flops * batch
    tier1 = t.tier1_bytes * batch
    tier2 = t.tier2_bytes * batch
    device_bytes = (2 * n * bytes_per_element + t.transpose_device_bytes) * batch
    barriers = t.barriers * batch

    compute_s = flops / (hw.gpu_cores * hw.fp32_flops_per_cycle_per_core * hw.clock_hz)
    memory_s = t.tg_seconds * batch + device_bytes / hw.dram_bandwidth_bytes_per_sec
    barrier_cycles = barriers * hw.barrier_cost_cycles
    barrier_s = barrier_cycles / hw.clock_hz

    predicted = max(compute_s, memory_s) + barrier_s
    return CostEstimate(
        flops=flops,
        tier1_bytes=tier1,
        tier2_bytes=tier2,
        device_bytes=device_bytes,
        barriers=barriers,
        barrier_cycles=barrier_cycles,
        predicted_seconds=predicted,
        gflops_predicted=flops / predicted / 1e9,
    )


def design_plan(name, n, hw=M1, precision_bytes=8):
    """Named single-threadgroup design variants for side-by-side costing.

    radix4 / radix8 are the real executable plans. shuffle is the
    SIMD-shuffle hybrid *template*: radix-8 stage structure whose
    inter-SIMD exchanges are scattered-access and whose first boundary
    moves through shuffles instead of the threadgroup buffer (hence two
    fewer barriers). Its arithmetic is never executed here -- it exists so
    the model can measure whether saved barriers buy back the worse access
    pattern.
    """
    if name not in DESIGN_NAMES:
        raise ValueError(f"unknown design {name!r}; want one of {DESIGN_NAMES}")
    if name == "radix4":
        plan = make_plan(n, PREFER4, bytes_per_element=precision_bytes)
        rationale = ("radix-4 single-threadgroup baseline",)
    else:
        plan = make_plan(n, PREFER8, bytes_per_element=precision_bytes)
        rationale = ("radix-8 single-threadgroup",)
    plan = replace(plan, threads=thread_count(n, plan.stages[0].radix, hw))
    if name == "shuffle":
        stages = tuple(replace(s, access_class=SCATTERED) for s in plan.stages)
        plan = replace(plan, stages=stages, shuffle_boundaries=min(1, len(stages) - 1))
        plan = replace(plan, barrier_count=count_barriers(plan))
        rationale = ("SIMD-shuffle hybrid template: fewer barriers, scattered access",)
    if plan.n > max_local_fft(hw, precision_bytes):
        raise ValueError(f"design {name} is single-threadgroup only; n={n} exceeds the ceiling")
    return DecompositionPlan(kind=SINGLE_THREADGROUP, n=n, inner=plan, rationale=rationale)


def rank_designs(plans, hw=M1, batch=1, bytes_per_element=8):
    """(plan, estimate) pairs sorted ascending by predicted time; stable."""
    costed = [(p, estimate(p, hw, batch, bytes_per_element)) for p in plans]
    return sorted(costed, key=lambda pe: pe[1].predicted_seconds)


def thesis_comparison(hw_a, hw_b):
    """Capability ratios of model b over model a (local FFT reach, memories)."""
    a_fft = max_local_fft(hw_a, 8, "register_tiled")
    b_fft = max_local_fft(hw_b, 8, "register_tiled")
    return ThesisComparison(
        max_local_fft_a=a_fft,
        max_local_fft_b=b_fft,
        local_fft_ratio=b_fft / a_fft,
        shared_memory_ratio=hw_b.threadgroup_memory_bytes / hw_a.threadgroup_memory_bytes,
        register_file_ratio=hw_b.register_file_bytes / hw_a.register_file_bytes,
        dram_bandwidth_ratio=hw_b.dram_bandwidth_bytes_per_sec / hw_a.dram_bandwidth_bytes_per_sec,
    )
