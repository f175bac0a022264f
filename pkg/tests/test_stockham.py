import numpy as np
import pytest

from fftforge.oracle import compare, naive_dft, random_signal
from fftforge.stockham import (
    CHAINED_SINGLE_SINCOS,
    DIRECT,
    DOUBLE_BUFFER,
    PREFER4,
    PREFER8,
    PURE2,
    FftPlan,
    count_barriers,
    execute,
    execute_inverse,
    execute_reference,
    gather_index,
    make_plan,
    plan_radices,
    run_stages,
    scatter_index,
    stage_geometry,
    stage_stride,
)

p = pytest.mark.parametrize


# ---------------------------------------------------------------- planning

def test_plan_radices_prefer8():
    assert plan_radices(4096, PREFER8) == (8, 8, 8, 8)
    assert plan_radices(8192, PREFER8) == (8, 8, 8, 8, 2)
    assert plan_radices(16384, PREFER8) == (8, 8, 8, 8, 4)
    assert plan_radices(2, PREFER8) == (2,)


def test_plan_radices_prefer4():
    assert plan_radices(256, PREFER4) == (4, 4, 4, 4)
    assert plan_radices(512, PREFER4) == (4, 4, 4, 4, 2)
    assert plan_radices(1024, PREFER4) == (4, 4, 4, 4, 4)
    assert plan_radices(2048, PREFER4) == (4, 4, 4, 4, 4, 2)
    assert plan_radices(4096, PREFER4) == (4, 4, 4, 4, 4, 4)


def test_plan_radices_pure2():
    assert plan_radices(32, PURE2) == (2,) * 5


@p("n", [2, 4, 8, 64, 1024, 1 << 20])
@p("policy", [PREFER8, PREFER4, PURE2])
def test_radices_multiply_to_n(n, policy):
    radices = plan_radices(n, policy)
    assert int(np.prod(radices)) == n


def test_plan_radices_rejects_bad_sizes():
    for bad in (0, 1, 3, 6, 4095):
        with pytest.raises(ValueError):
            plan_radices(bad, PREFER8)
    with pytest.raises(ValueError):
        plan_radices(8, "prefer16")


def test_stage_geometry_span_stride():
    geo = stage_geometry(4096, (8, 8, 8, 8))
    assert geo == [(1, 512), (8, 64), (64, 8), (512, 1)]
    for (span, stride), r in zip(geo, (8, 8, 8, 8)):
        assert stride == stage_stride(4096, span, r)
        assert span * r * stride == 4096


def test_make_plan_table_values():
    # the radix-4 reference ladder: threads n/4, stages, tg bytes n*8
    rows = {256: (64, 4), 512: (128, 5), 1024: (256, 5), 2048: (512, 6), 4096: (1024, 6)}
    for n, (threads, stages) in rows.items():
        plan = make_plan(n, PREFER4)
        assert plan.threads == threads
        assert len(plan.stages) == stages
        assert plan.threadgroup_bytes == n * 8


def test_make_plan_radix8_flagship():
    plan = make_plan(4096, PREFER8)
    assert plan.radices == (8, 8, 8, 8)
    assert plan.threads == 512
    assert plan.threadgroup_bytes == 32768
    assert plan.barrier_count == 6


def test_make_plan_single_stage_needs_no_buffer():
    plan = make_plan(8, PREFER8)
    assert len(plan.stages) == 1
    assert plan.threadgroup_bytes == 0
    assert plan.barrier_count == 0


def test_make_plan_thread_cap():
    assert make_plan(16384, PREFER8).threads == 1024
    assert make_plan(2, PURE2).threads == 1


def test_double_buffer_strategy_doubles_bytes_halves_barriers():
    single = make_plan(4096, PREFER8)
    ping = make_plan(4096, PREFER8, buffer_strategy=DOUBLE_BUFFER)
    assert ping.threadgroup_bytes == 2 * single.threadgroup_bytes
    assert ping.barrier_count == single.barrier_count // 2


def test_count_barriers_shuffle_discount():
    plan = make_plan(4096, PREFER8)
    hybrid = plan.__class__(**{**plan.__dict__, "shuffle_boundaries": 1})
    assert count_barriers(hybrid) == count_barriers(plan) - 2


def test_barrier_counts_across_radix_ladders():
    # barrier column of the radix table: 22 / 10 / 6 at n=4096
    assert make_plan(4096, PURE2).barrier_count == 22
    assert make_plan(4096, PREFER4).barrier_count == 10
    assert make_plan(4096, PREFER8).barrier_count == 6


# ---------------------------------------------------------------- addressing

@p("n,radices", [(64, (8, 8)), (64, (4, 4, 4)), (32, (8, 4)), (16, (2,) * 4)])
def test_stage_addressing_is_a_bijection(n, radices):
    for (span, stride), r in zip(stage_geometry(n, radices), radices):
        reads = set()
        writes = set()
        for pp in range(span):
            for q in range(stride):
                for j in range(r):
                    reads.add(gather_index(n, span, r, pp, q, j))
                    writes.add(scatter_index(n, span, r, pp, q, j))
        assert reads == set(range(n))
        assert writes == set(range(n))


def test_reference_executor_agrees_with_vectorized():
    for n, policy in [(64, PREFER8), (128, PREFER4), (32, PURE2), (8, PREFER8)]:
        plan = make_plan(n, policy)
        x = random_signal(n, seed=n)
        assert compare(execute(plan, x), execute_reference(plan, x)).relative_l2 < 1e-15


# ---------------------------------------------------------------- execution

def test_delta_gives_flat_spectrum():
    plan = make_plan(256, PREFER8)
    x = np.zeros(256, dtype=np.complex128)
    x[0] = 1
    assert np.abs(execute(plan, x) - 1).max() < 1e-12


def test_constant_gives_dc_spike():
    plan = make_plan(64, PREFER4)
    out = execute(plan, np.ones(64, dtype=np.complex128))
    assert abs(out[0] - 64) < 1e-12
    assert np.abs(out[1:]).max() < 1e-12


@p("policy", [PREFER8, PREFER4, PURE2])
@p("n", [4, 16, 256, 1024, 4096])
def test_execute_matches_oracle_double(n, policy):
    plan = make_plan(n, policy)
    x = random_signal(n, seed=3 * n)
    assert compare(execute(plan, x), naive_dft(x)).relative_l2 < 1e-12


@p("policy", [PREFER8, PREFER4])
def test_execute_matches_oracle_single(policy):
    n = 2048
    plan = make_plan(n, policy)
    x = random_signal(n, seed=n, dtype=np.complex64)
    out = execute(plan, x)
    assert out.dtype == np.complex64
    assert compare(out, naive_dft(x)).relative_l2 < 1e-5


def test_direct_twiddles_agree_with_chained():
    n = 512
    chained = make_plan(n, PREFER8)
    direct = make_plan(n, PREFER8, twiddle_policy=DIRECT)
    x = random_signal(n, seed=12)
    assert compare(execute(chained, x), execute(direct, x)).relative_l2 < 1e-13


def test_run_stages_batch_consistency():
    plan = make_plan(128, PREFER8)
    rows = np.stack([random_signal(128, seed=s) for s in range(5)])
    batched = run_stages(plan, rows)
    for k in range(5):
        assert compare(batched[k], execute(plan, rows[k])).relative_l2 < 1e-15


def test_inverse_round_trip():
    plan = make_plan(1024, PREFER8)
    x = random_signal(1024, seed=77)
    back = execute_inverse(plan, execute(plan, x))
    assert compare(back, x).relative_l2 < 1e-12

    xs = random_signal(1024, seed=78, dtype=np.complex64)
    back_s = execute_inverse(plan, execute(plan, xs))
    assert compare(back_s, xs).relative_l2 < 1e-5


def test_execute_validates_input():
    plan = make_plan(64, PREFER8)
    with pytest.raises(ValueError):
        execute(plan, np.zeros(63, dtype=np.complex128))
    with pytest.raises(ValueError):
        execute(plan, np.zeros((2, 64), dtype=np.complex128))
    with pytest.raises(ValueError):
        run_stages(plan, np.zeros(64, dtype=np.complex128))


def test_integer_input_promotes_to_double():
    plan = make_plan(16, PREFER4)
    out = execute(plan, np.arange(16))
    assert out.dtype == np.complex128
    assert compare(out, naive_dft(np.arange(16).astype(np.complex128))).relative_l2 < 1e-13
