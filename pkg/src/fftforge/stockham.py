"""Stockham autosort FFT executor.

A plan is an ordered list of stages. Stage t with radix r and span L
(L = product of all earlier radices) gathers its butterflies with

    inputj  = q + s*(r*p + j)          s = n / (L*r),  p < L,  q < s
    twiddle = W_(L*r)^(p*j)            applied before the butterfly core
    outputj = q + s*(p + j*L)

which is the self-sorting decimation-in-time permutation: output lands in
natural order with no bit-reversal pass. Execution ping-pongs between two
buffers regardless of what buffer_strategy the plan models -- the strategy
field drives memory and barrier *accounting*, not host arithmetic.

Geometry helpers here (stage_stride / stage_geometry) are the single
source of addressing truth; the kernel emitter renders the same formulas
as source text.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .butterflies import BUTTERFLIES
from .complex_core import DOUBLE, SINGLE, twiddle, twiddle_chain

# enum-ish string constants; plans are plain data and serialize naturally
PREFER8 = "prefer8"
PREFER4 = "prefer4"
PURE2 = "pure2"
RADIX_POLICIES = (PREFER8, PREFER4, PURE2)

CHAINED_SINGLE_SINCOS = "chained_single_sincos"
DIRECT = "direct"
TWIDDLE_POLICIES = (CHAINED_SINGLE_SINCOS, DIRECT)

SEQUENTIAL = "sequential"
STRIDED = "strided"
SCATTERED = "scattered"
ACCESS_CLASSES = (SEQUENTIAL, STRIDED, SCATTERED)

REGISTER_TILED = "register_tiled_single_buffer"
DOUBLE_BUFFER = "double_buffer"
BUFFER_STRATEGIES = (REGISTER_TILED, DOUBLE_BUFFER)

MAX_SIGNAL = 1 << 24
MAX_THREADS = 1024

_POLICY_DIVISOR = {PREFER8: 8, PREFER4: 4, PURE2: 2}


@dataclass(frozen=True)
class StageDescriptor:
    radix: int
    span: int
    twiddle_policy: str = CHAINED_SINGLE_SINCOS
    access_class: str = SEQUENTIAL


@dataclass(frozen=True)
class FftPlan:
    n: int
    stages: tuple[StageDescriptor, ...]
    threads: int
    buffer_strategy: str = REGISTER_TILED
    threadgroup_bytes: int = 0
    barrier_count: int = 0
    # Stage boundaries exchanged through intra-SIMD shuffles instead of the
    # threadgroup buffer (the shuffle-hybrid design variant); each such
    # boundary drops its barrier pair.
    shuffle_boundaries: int = 0

    @property
    def radices(self):
        return tuple(st.radix for st in self.stages)


def require_power_of_two(n, what="signal length"):
    if not isinstance(n, (int, np.integer)) or n < 2 or n & (n - 1):
        raise ValueError(f"{what} must be a power of two >= 2, got {n!r}")
    if n > MAX_SIGNAL:
        raise ValueError(f"{what} {n} exceeds the supported maximum {MAX_SIGNAL}")


def plan_radices(n, radix_policy):
    """Stage radices for a size under a policy.

    prefer8 greedily emits radix-8 stages plus at most one radix-4 or
    radix-2 remainder; prefer4 does the same with radix-4 and a radix-2
    remainder; pure2 is all radix-2.
    """
    require_power_of_two(n)
    k = n.bit_length() - 1
    if radix_policy == PREFER8:
        rem = {0: (), 1: (2,), 2: (4,)}[k % 3]
        return (8,) * (k // 3) + rem
    if radix_policy == PREFER4:
        return (4,) * (k // 2) + (2,) * (k % 2)
    if radix_policy == PURE2:
        return (2,) * k
    raise ValueError(f"unknown radix policy {radix_policy!r}; want one of {RADIX_POLICIES}")


def stage_stride(n, span, radix):
    """Distance s between a butterfly's consecutive inputs at this stage."""
    return n // (span * radix)


def gather_index(n, span, radix, p, q, j):
    """Read address of column j for butterfly (p, q) at a stage.

    p in [0, span) walks butterfly groups, q in [0, stride) walks the
    interleave within a group, j in [0, radix) walks the butterfly's
    inputs. This is the single source of truth for Stockham addressing:
    the host executors and the kernel emitter both derive from it, so the
    oracle tests that pin one pin the other.
    """
    s = stage_stride(n, span, radix)
    return q + s * (radix * p + j)


def scatter_index(n, span, radix, p, q, j):
    """Write address of output j for butterfly (p, q); the autosort step.

    Outputs land span apart so the next stage sees its inputs already in
    digit-reversed-free order -- no bit-reversal pass ever runs.
    """
    s = stage_stride(n, span, radix)
    return q + s * (p + j * span)


def stage_geometry(n, radices):
    """(span, stride) per stage; span follows the Stockham recurrence."""
    out = []
    span = 1
    for r in radices:
        out.append((span, stage_stride(n, span, r)))
        span *= r
    return out


def count_barriers(plan):
    """Modeled threadgroup barrier count for a plan.

    Register-tiled single-buffer execution spends a barrier pair per
    interior stage boundary: one to make writes visible, one to clear the
    buffer for reuse. The device-memory bypass keeps the first read and
    the last write out of the threadgroup buffer, so boundaries number
    len(stages) - 1 and nothing more. Boundaries exchanged by intra-SIMD
    shuffle need no threadgroup traffic and drop their pair. Ping-pong
    double buffering has no reuse hazard and pays one barrier per
    boundary.
    """
    boundaries = max(0, len(plan.stages) - 1 - plan.shuffle_boundaries)
    per_boundary = 2 if plan.buffer_strategy == REGISTER_TILED else 1
    return per_boundary * boundaries


def make_plan(
    n,
    radix_policy=PREFER8,
    *,
    twiddle_policy=CHAINED_SINGLE_SINCOS,
    buffer_strategy=REGISTER_TILED,
    bytes_per_element=8,
):
    """Build a single-threadgroup Stockham plan.

    Threads follow the one-butterfly-per-thread rule for the policy's
    leading radix (n/8 for prefer8, n/4 for prefer4, n/2 for pure2),
    capped at the 1024-thread threadgroup limit. threadgroup_bytes is the
    modeled tier-2 footprint: n complex elements for the register-tiled
    single buffer, twice that for ping-pong, zero when a single stage
    bypasses the buffer entirely.
    """
    if twiddle_policy not in TWIDDLE_POLICIES:
        raise ValueError(f"unknown twiddle policy {twiddle_policy!r}")
    if buffer_strategy not in BUFFER_STRATEGIES:
        raise ValueError(f"unknown buffer strategy {buffer_strategy!r}")
    radices = plan_radices(n, radix_policy)
    stages = tuple(
        StageDescriptor(radix=r, span=span, twiddle_policy=twiddle_policy)
        for r, (span, _) in zip(radices, stage_geometry(n, radices))
    )
    threads = max(1, min(MAX_THREADS, n // _POLICY_DIVISOR[radix_policy]))
    if len(stages) == 1:
        tg_bytes = 0
    else:
        tg_bytes = n * bytes_per_element * (2 if buffer_strategy == DOUBLE_BUFFER else 1)
    plan = FftPlan(
        n=n,
        stages=stages,
        threads=threads,
        buffer_strategy=buffer_strategy,
        threadgroup_bytes=tg_bytes,
    )
    return replace(plan, barrier_count=count_barriers(plan))


def _stage_twiddles(stage, n, dtype):
    """(span, radix) table W[p, j] = W_(span*radix)^(p*j), or None at span 1."""
    L, r = stage.span, stage.radix
    if L == 1:
        return None
    m = L * r
    p = np.arange(L)
    if stage.twiddle_policy == CHAINED_SINGLE_SINCOS:
        w1 = twiddle(m, p, dtype=dtype)            # one sincos per butterfly
        powers = twiddle_chain(w1, r - 1)          # (r-1, L) chained products
        table = np.empty((L, r), dtype=dtype)
        table[:, 0] = 1
        table[:, 1:] = powers.T
        return table
    return twiddle(m, np.outer(p, np.arange(r)), dtype=dtype)


def _apply_stage(stage, n, src, dst, dtype):
    # src, dst: (batch, n)
    L, r = stage.span, stage.radix
    s = stage_stride(n, L, r)
    x = src.reshape(-1, L, r, s)
    table = _stage_twiddles(stage, n, dtype)
    if table is not None:
        x = x * table[None, :, :, None]
    v = np.moveaxis(x, 2, 0)                       # (r, batch, L, s)
    out = BUTTERFLIES[r](v)
    dst.reshape(-1, r, L, s)[...] = np.moveaxis(out, 0, 1)


def run_stages(plan, rows):
    """Transform each row of a (batch, n) array in place of a loop of FFTs."""
    rows = np.asarray(rows)
    if rows.ndim != 2 or rows.shape[1] != plan.n:
        raise ValueError(f"expected (batch, {plan.n}) input, got {rows.shape}")
    dtype = rows.dtype if rows.dtype in (SINGLE, DOUBLE) else DOUBLE
    a = rows.astype(dtype, copy=True)
    b = np.empty_like(a)
    for stage in plan.stages:
        _apply_stage(stage, plan.n, a, b, dtype)
        a, b = b, a
    return a


def execute_reference(plan, x):
    """Scalar per-butterfly executor driven by the shared index functions.

    Same arithmetic as execute, but every element moves through an
    explicit gather_index / scatter_index call instead of vectorized
    reshapes. Slow by design; it exists so tests can pin the vectorized
    path and the kernel emitter to one addressing definition.
    """
    x = np.asarray(x)
    if x.shape != (plan.n,):
        raise ValueError(f"expected shape ({plan.n},), got {x.shape}")
    dtype = x.dtype if x.dtype in (SINGLE, DOUBLE) else DOUBLE
    a = x.astype(dtype, copy=True)
    b = np.empty_like(a)
    n = plan.n
    for stage in plan.stages:
        L, r = stage.span, stage.radix
        s = stage_stride(n, L, r)
        table = _stage_twiddles(stage, n, dtype)
        for p in range(L):
            for q in range(s):
                v = np.array(
                    [a[gather_index(n, L, r, p, q, j)] for j in range(r)], dtype=dtype
                )
                if table is not None:
                    v *= table[p]
                v = BUTTERFLIES[r](v)
                for j in range(r):
                    b[scatter_index(n, L, r, p, q, j)] = v[j]
        a, b = b, a
    return a


def execute(plan, x):
    """Forward transform of one signal; output is natural-order.

    Arithmetic runs in the signal's own precision (complex64 stays
    complex64); anything else is promoted to complex128.
    """
    x = np.asarray(x)
    if x.ndim != 1:
        raise ValueError("execute expects a 1-d signal")
    if x.size != plan.n:
        raise ValueError(f"signal length {x.size} does not match plan n={plan.n}")
    return run_stages(plan, x[None, :])[0]


def execute_inverse(plan, x):
    """Inverse transform as conjugate -> forward -> conjugate, scaled by 1/n."""
    x = np.asarray(x)
    out = np.conj(execute(plan, np.conj(x)))
    return out / out.dtype.type(plan.n)
