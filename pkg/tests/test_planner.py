import dataclasses
import json

import pytest

from fftforge.four_step import FourStepPlan
from fftforge.planner import (
    DOUBLE_BUFFERED,
    FOUR_STEP,
    INTEL_EU,
    M1,
    MULTI_LEVEL_FOUR_STEP,
    PRESETS,
    REGISTER_RESIDENT,
    REGISTER_TILED,
    SINGLE_THREADGROUP,
    DEFAULT_PROFILES,
    HardwareModel,
    get_model,
    hardware_model_from_file,
    hardware_model_to_file,
    max_local_fft,
    select_radix,
    synthesize,
    thread_count,
)
from fftforge.stockham import PREFER4, PURE2


# -------------------------------------------------------------- capacities

def test_capacity_register_tiled():
    assert max_local_fft(M1, 8, REGISTER_TILED) == 4096


def test_capacity_double_buffered():
    assert max_local_fft(M1, 8, DOUBLE_BUFFERED) == 2048


def test_capacity_register_resident():
    assert max_local_fft(M1, 8, REGISTER_RESIDENT) == 8192
    # halving element size doubles reach (the FP16 headroom claim)
    assert max_local_fft(M1, 4, REGISTER_RESIDENT) == 16384


def test_capacity_double_precision():
    assert max_local_fft(M1, 16, REGISTER_TILED) == 2048


def test_capacity_validation():
    with pytest.raises(ValueError):
        max_local_fft(M1, 7)
    with pytest.raises(ValueError):
        max_local_fft(M1, 8, "heroic")


# ------------------------------------------------------------ radix choice

def test_select_radix_on_default_model():
    choice = select_radix(M1)
    assert choice.profile.radix == 8
    assert choice.profile.gprs_per_thread == 38
    assert not choice.degraded


def test_select_radix_tight_budget():
    small = dataclasses.replace(M1, gprs_per_thread=64)
    assert select_radix(small).profile.radix == 4  # 18 <= 32 < 38


def test_select_radix_huge_budget_takes_largest():
    big = dataclasses.replace(M1, gprs_per_thread=512)
    assert select_radix(big).profile.radix == 16


def test_select_radix_degraded_when_nothing_fits():
    starved = dataclasses.replace(M1, gprs_per_thread=8)
    choice = select_radix(starved)
    assert choice.degraded
    assert choice.profile.radix == 2  # smallest GPR cost wins by default


def test_select_radix_monotone_in_budget():
    last = 0
    for gprs in (8, 16, 32, 64, 128, 256, 512):
        hw = dataclasses.replace(M1, gprs_per_thread=gprs)
        radix = select_radix(hw).profile.radix
        assert radix >= last
        last = radix


def test_default_profiles_pin_resource_figures():
    rows = {p.radix: p for p in DEFAULT_PROFILES}
    assert rows[2].flops_per_butterfly == 10
    assert rows[4].flops_per_butterfly == 34
    assert rows[8].flops_per_butterfly == 94
    assert rows[16].flops_per_butterfly == 214
    assert rows[8].gprs_per_thread == 38
    assert rows[16].gprs_per_thread == 78
    assert rows[8].stages_for_4096 == 4
    assert [rows[r].barrier_estimate for r in (2, 4, 8, 16)] == [22, 10, 6, 4]


# ------------------------------------------------------------ thread counts

def test_thread_count_examples():
    assert thread_count(4096, 8, M1) == 512
    assert thread_count(4096, 4, M1) == 1024
    assert thread_count(256, 4, M1) == 64


def test_thread_count_rounds_to_simd_multiple():
    hw = dataclasses.replace(M1, simd_width=32)
    assert thread_count(8, 2, hw) == 32  # floor of a SIMD group
    assert thread_count(96 * 8, 8, hw) == 96


# ---------------------------------------------------------------- synthesis

def test_synthesize_flagship():
    plan = synthesize(4096)
    assert plan.kind == SINGLE_THREADGROUP
    assert plan.inner.radices == (8, 8, 8, 8)
    assert plan.inner.threads == 512
    assert plan.inner.barrier_count == 6


def test_synthesize_kind_boundaries():
    assert synthesize(4096).kind == SINGLE_THREADGROUP
    assert synthesize(8192).kind == FOUR_STEP
    assert synthesize(16384).kind == FOUR_STEP
    assert synthesize(32768).kind == MULTI_LEVEL_FOUR_STEP
    assert synthesize(1 << 16).kind == MULTI_LEVEL_FOUR_STEP


def test_synthesize_four_step_splits():
    for n, n1 in [(8192, 2), (16384, 4), (1 << 16, 16)]:
        plan = synthesize(n)
        assert isinstance(plan.inner, FourStepPlan)
        assert plan.inner.n1 == n1
        assert plan.inner.n2 == 4096


def test_synthesize_single_threadgroup_band():
    for k in range(8, 13):
        plan = synthesize(1 << k)
        assert plan.kind == SINGLE_THREADGROUP
        assert plan.inner.threadgroup_bytes <= 32768


def test_synthesize_respects_radix_policy_override():
    plan = synthesize(4096, radix_policy=PREFER4)
    assert plan.inner.radices == (4,) * 6
    assert plan.inner.threads == 1024


def test_synthesize_deterministic():
    assert synthesize(8192) == synthesize(8192)


def test_synthesize_rationale_mentions_rule():
    plan = synthesize(8192)
    joined = " ".join(plan.rationale)
    assert "4096" in joined and "8192" in joined


def test_synthesize_double_precision_shrinks_ceiling():
    # 16-byte elements halve the single-threadgroup band
    assert synthesize(4096, precision_bytes=16).kind == FOUR_STEP
    assert synthesize(2048, precision_bytes=16).kind == SINGLE_THREADGROUP


# ---------------------------------------------------------------- model IO

def test_model_file_round_trip(tmp_path):
    path = tmp_path / "hw.json"
    hardware_model_to_file(M1, path)
    assert hardware_model_from_file(path) == M1


def test_model_file_rejects_unknown_fields(tmp_path):
    path = tmp_path / "hw.json"
    data = dataclasses.asdict(M1)
    data["favourite_colour"] = "blue"
    path.write_text(json.dumps(data))
    with pytest.raises(ValueError, match="favourite_colour"):
        hardware_model_from_file(path)


def test_model_validation():
    with pytest.raises(ValueError):
        dataclasses.replace(M1, clock_hz=0)
    with pytest.raises(ValueError):
        # two-tier ordering: threadgroup memory can't exceed the register file
        dataclasses.replace(M1, threadgroup_memory_bytes=1 << 30)


def test_get_model_resolution(tmp_path):
    assert get_model("m1") is M1
    assert get_model("intel-eu") is INTEL_EU
    assert get_model(M1) is M1
    path = tmp_path / "hw.json"
    hardware_model_to_file(INTEL_EU, path)
    assert get_model(str(path)) == INTEL_EU
    with pytest.raises((ValueError, FileNotFoundError)):
        get_model("no-such-model")


def test_presets_registered():
    assert set(PRESETS) == {"m1", "intel-eu"}


def test_intel_eu_capacity_uses_measured_override():
    # the comparison target resolves to a 1024-point local FFT
    assert max_local_fft(INTEL_EU, 8, REGISTER_TILED) == 1024


def test_synthesize_on_intel_model():
    plan = synthesize(4096, hw=INTEL_EU)
    assert plan.kind == FOUR_STEP
    assert plan.inner.n2 == 1024


def test_m1_headline_numbers():
    assert M1.gpu_cores == 8
    assert M1.threadgroup_memory_bytes == 32 * 1024
    assert M1.register_file_bytes == 208 * 1024
    assert M1.gprs_per_thread == 128
    assert M1.max_threads_per_threadgroup == 1024
    assert M1.simd_width == 32
    assert M1.barrier_cost_cycles == 2.0
