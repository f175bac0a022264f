"""Decomposition planner built on a two-tier GPU memory model.

Tier 1 is the per-thread register file, tier 2 the shared threadgroup
memory; device DRAM sits below both. The planner turns a size, a hardware
model, and a precision into either a single-threadgroup Stockham plan
(when the signal fits tier 2 under the chosen buffering discipline) or a
four-step decomposition whose inner size does.

Radix choice is a register-pressure question: each candidate radix has a
measured per-thread GPR cost, and the largest radix whose cost stays
within half the architectural GPR budget wins -- past that point register
spills cost more than the extra stages they save.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, replace
from typing import NamedTuple

from .four_step import FourStepPlan, build_four_step
from .stockham import (
    FftPlan,
    PREFER4,
    PREFER8,
    PURE2,
    make_plan,
    require_power_of_two,
)

REGISTER_TILED = "register_tiled"
DOUBLE_BUFFERED = "double_buffered"
REGISTER_RESIDENT = "register_resident"
CAPACITY_STRATEGIES = (REGISTER_TILED, DOUBLE_BUFFERED, REGISTER_RESIDENT)

SINGLE_THREADGROUP = "single_threadgroup"
FOUR_STEP = "four_step"
MULTI_LEVEL_FOUR_STEP = "multi_level_four_step"

# A plain four-step level handles up to this multiple of the
# single-threadgroup ceiling; past it the plan is labeled multi-level and
# intermediates are assumed cache- rather than threadgroup-resident.
FOUR_STEP_CEILING_FACTOR = 4

# Register-resident working set: threads per group x complex elements per
# thread at 8 bytes each. Capacity in other precisions scales from these
# bytes.
_REG_RESIDENT_THREADS = 256
_REG_RESIDENT_ELEMENTS = 32


@dataclass(frozen=True)
class HardwareModel:
    """Flat description of one GPU, defaults matching an 8-core M1.

    local_fft_override pins the register-tiled local-FFT capacity (in
    complex elements at 8 bytes) for hardware whose known capability
    does not derive from the threadgroup-memory formula -- the 2015-era
    integrated-GPU baseline packs its working set across registers and
    local memory in a way the formula does not capture.
    reg_tg_copy_bw_bytes_per_sec is characterized but has no consumer in
    the cost model yet.
    """

    name: str = "m1"
    gpu_cores: int = 8
    alus_per_core: int = 128
    fp32_flops_per_cycle_per_core: int = 256
    simd_width: int = 32
    max_threads_per_threadgroup: int = 1024
    gprs_per_thread: int = 128
    register_file_bytes: int = 208 * 1024
    threadgroup_memory_bytes: int = 32 * 1024
    dram_bandwidth_bytes_per_sec: float = 68e9
    clock_hz: float = 1.278e9
    tg_bw_sequential_bytes_per_sec: float = 688e9
    tg_bw_strided_bytes_per_sec: float = 217e9
    shuffle_bw_bytes_per_sec: float = 262e9
    reg_tg_copy_bw_bytes_per_sec: float = 413e9
    barrier_cost_cycles: float = 2.0
    local_fft_override: int | None = None

    def __post_init__(self):
        for field_name in (
            "gpu_cores",
            "alus_per_core",
            "fp32_flops_per_cycle_per_core",
            "simd_width",
            "max_threads_per_threadgroup",
            "gprs_per_thread",
            "register_file_bytes",
            "threadgroup_memory_bytes",
            "dram_bandwidth_bytes_per_sec",
            "clock_hz",
            "tg_bw_sequential_bytes_per_sec",
            "tg_bw_strided_bytes_per_sec",
            "shuffle_bw_bytes_per_sec",
            "reg_tg_copy_bw_bytes_per_sec",
            "barrier_cost_cycles",
        ):
            if getattr(self, field_name) <= 0:
                raise ValueError(f"{field_name} must be positive")
        if self.threadgroup_memory_bytes > self.register_file_bytes:
            raise ValueError("threadgroup memory larger than the register file is not a supported model")


M1 = HardwareModel()

# 2015-era integrated-GPU baseline used for capability comparisons; the
# execution-unit counts and clocks are representative desk values, the
# memory figures and the 2^10 local-FFT ceiling are the characterized ones.
INTEL_EU = HardwareModel(
    name="intel-eu",
    gpu_cores=16,
    alus_per_core=8,
    fp32_flops_per_cycle_per_core=16,
    simd_width=8,
    max_threads_per_threadgroup=256,
    gprs_per_thread=128,
    register_file_bytes=2 * 1024,
    threadgroup_memory_bytes=2 * 1024,
    dram_bandwidth_bytes_per_sec=25.6e9,
    clock_hz=1.15e9,
    tg_bw_sequential_bytes_per_sec=64e9,
    tg_bw_strided_bytes_per_sec=20e9,
    shuffle_bw_bytes_per_sec=32e9,
    reg_tg_copy_bw_bytes_per_sec=40e9,
    barrier_cost_cycles=8.0,
    local_fft_override=1024,
)

PRESETS = {"m1": M1, "intel-eu": INTEL_EU}


@dataclass(frozen=True)
class RadixProfile:
    """Per-butterfly resource profile of one radix at n=4096.

    flops_per_butterfly includes the stage's chained twiddle arithmetic,
    gprs_per_thread is the compiler-reported register cost, stages and
    barrier_estimate describe a 4096-point plan built purely from this
    radix.
    """

    radix: int
    flops_per_butterfly: int
    gprs_per_thread: int
    stages_for_4096: int
    barrier_estimate: int


DEFAULT_PROFILES = (
    RadixProfile(radix=2, flops_per_butterfly=10, gprs_per_thread=8, stages_for_4096=12, barrier_estimate=22),
    RadixProfile(radix=4, flops_per_butterfly=34, gprs_per_thread=18, stages_for_4096=6, barrier_estimate=10),
    RadixProfile(radix=8, flops_per_butterfly=94, gprs_per_thread=38, stages_for_4096=4, barrier_estimate=6),
    RadixProfile(radix=16, flops_per_butterfly=214, gprs_per_thread=78, stages_for_4096=3, barrier_estimate=4),
)


class RadixChoice(NamedTuple):
    profile: RadixProfile
    degraded: bool


@dataclass(frozen=True)
class DecompositionPlan:
    kind: str
    n: int
    inner: "FftPlan | FourStepPlan"
    rationale: tuple[str, ...]


def _floor_pow2(v):
    v = int(v)
    if v < 1:
        raise ValueError(f"capacity underflow: {v}")
    return 1 << (v.bit_length() - 1)


def max_local_fft(hw, bytes_per_element=8, strategy=REGISTER_TILED):
    """Largest power-of-two FFT one threadgroup can hold under a strategy.

    register_tiled: the whole signal lives once in threadgroup memory
    (registers carry the in-flight butterfly). double_buffered: classic
    ping-pong, half the capacity. register_resident: the signal lives in
    the register file, 256 threads x 32 complex elements at 8 bytes.
    """
    if bytes_per_element not in (4, 8, 16):
        raise ValueError(f"bytes_per_element must be 4, 8 or 16, got {bytes_per_element}")
    if strategy not in CAPACITY_STRATEGIES:
        raise ValueError(f"unknown capacity strategy {strategy!r}")
    if strategy == REGISTER_RESIDENT:
        cap_bytes = min(hw.register_file_bytes, _REG_RESIDENT_THREADS * _REG_RESIDENT_ELEMENTS * 8)
        return _floor_pow2(cap_bytes // bytes_per_element)
    if hw.local_fft_override is not None:
        cap_bytes = hw.local_fft_override * 8
    else:
        cap_bytes = hw.threadgroup_memory_bytes
    if strategy == DOUBLE_BUFFERED:
        cap_bytes //= 2
    return _floor_pow2(cap_bytes // bytes_per_element)


def select_radix(hw, profiles=DEFAULT_PROFILES, headroom=0.5):
    """Largest radix whose GPR cost fits within headroom * the GPR budget.

    Register spills past ~half the budget cost more than the stages a
    bigger radix saves, hence the default. When nothing fits, the
    smallest-GPR profile is returned with degraded=True rather than
    failing: some plan beats no plan.
    """
    if not profiles:
        raise ValueError("need at least one radix profile")
    budget = headroom * hw.gprs_per_thread
    fitting = [p for p in profiles if p.gprs_per_thread <= budget]
    if fitting:
        return RadixChoice(max(fitting, key=lambda p: p.radix), False)
    return RadixChoice(min(profiles, key=lambda p: p.gprs_per_thread), True)


def thread_count(n, radix, hw):
    """One butterfly per thread, floored to a SIMD multiple.

    min(n/radix, threadgroup limit), rounded down to a multiple of the
    SIMD width, never below one SIMD group.
    """
    t = min(n // radix, hw.max_threads_per_threadgroup)
    t = (t // hw.simd_width) * hw.simd_width
    return max(t, hw.simd_width)


_RADIX_TO_POLICY = {2: PURE2, 4: PREFER4}


def synthesize(n, hw=M1, precision_bytes=8, radix_policy=None):
    """Choose and build the full decomposition for a size.

    radix_policy=None lets select_radix drive (radix 16 profiles map onto
    prefer8: the executable butterfly set tops out at 8); pass an explicit
    policy to reproduce fixed configurations. Deterministic: equal inputs
    give equal plans.
    """
    require_power_of_two(n)
    b_max = max_local_fft(hw, precision_bytes, REGISTER_TILED)
    rationale = [f"single-threadgroup ceiling: {b_max} elements at {precision_bytes} B"]

    if radix_policy is None:
        choice = select_radix(hw)
        policy = _RADIX_TO_POLICY.get(choice.profile.radix, PREFER8)
        note = (
            f"radix {choice.profile.radix}: {choice.profile.gprs_per_thread} GPRs fits "
            f"half of {hw.gprs_per_thread}"
        )
        if choice.degraded:
            note += " (degraded: nothing fit the headroom)"
        rationale.append(note)
    else:
        policy = radix_policy
        rationale.append(f"radix policy pinned by caller: {policy}")

    if n <= b_max:
        plan = make_plan(n, policy, bytes_per_element=precision_bytes)
        plan = replace(plan, threads=thread_count(n, plan.stages[0].radix, hw))
        rationale.append(f"n={n} fits one threadgroup ({plan.threadgroup_bytes} B tier-2)")
        return DecompositionPlan(
            kind=SINGLE_THREADGROUP, n=n, inner=plan, rationale=tuple(rationale)
        )

    fsp = build_four_step(n, b_max, policy, bytes_per_element=precision_bytes)
    if n <= FOUR_STEP_CEILING_FACTOR * b_max:
        kind = FOUR_STEP
        rationale.append(f"one four-step level: {n} = {fsp.n1} x {fsp.n2}")
    else:
        kind = MULTI_LEVEL_FOUR_STEP
        rationale.append(
            f"multi-level four-step: {n} = {fsp.n1} x {fsp.n2}, intermediates cache-resident"
        )
    return DecompositionPlan(kind=kind, n=n, inner=fsp, rationale=tuple(rationale))


def hardware_model_to_file(hw, path):
    """Write a model as a flat key/value JSON object (units in key names)."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(asdict(hw), fh, indent=2, sort_keys=True)
        fh.write("\n")


def hardware_model_from_file(path):
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a flat JSON object of model fields")
    known = {f for f in HardwareModel.__dataclass_fields__}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"{path}: unknown model fields {sorted(unknown)}")
    return HardwareModel(**data)


def get_model(spec):
    """Resolve a preset name or a model-file path to a HardwareModel."""
    if isinstance(spec, HardwareModel):
        return spec
    if spec in PRESETS:
        return PRESETS[spec]
    return hardware_model_from_file(spec)
