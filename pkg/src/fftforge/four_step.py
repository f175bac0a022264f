"""Four-step decomposition for sizes past the single-threadgroup ceiling.

An n = n1*n2 transform becomes: load the signal through the stride
permutation M[j, k] = x[k*n1 + j] (an n1 x n2 matrix), run n1 contiguous
row FFTs of size n2, scale element (j, k) by W_n^(j*k) while transposing
to n2 x n1, run n2 row FFTs of size n1, and read the result back out
transposed. Output is natural-order; the orientation is pinned by the
oracle tests, not by convention.

Transposes are materialized full intermediate buffers -- the model is two
device-memory passes per transpose, and the host execution mirrors that
rather than fusing. When n1 itself exceeds the ceiling the outer side
recurses into another FourStepPlan; depth is unbounded in principle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complex_core import DOUBLE, SINGLE, twiddle
from .stockham import (
    FftPlan,
    PREFER8,
    execute,
    make_plan,
    require_power_of_two,
    run_stages,
)


@dataclass(frozen=True)
class FourStepPlan:
    n: int
    n1: int
    n2: int
    inner_plan: FftPlan
    outer_plan: "FftPlan | FourStepPlan"


def _floor_pow2(v):
    return 1 << (int(v).bit_length() - 1)


def four_step_split(n, b_max):
    """Split n into (n1, n2) with n2 the largest power of two <= b_max.

    Requires n > b_max: sizes that fit a single threadgroup have nothing
    to split and are rejected.
    """
    require_power_of_two(n)
    if b_max < 2:
        raise ValueError(f"b_max must be >= 2, got {b_max}")
    if n <= b_max:
        raise ValueError(f"n={n} fits the single-threadgroup ceiling {b_max}; no split needed")
    n2 = min(_floor_pow2(b_max), n // 2)
    return n // n2, n2


def build_four_step(n, b_max, radix_policy=PREFER8, **plan_kwargs):
    """Recursive four-step plan; the outer side splits again while n1 > b_max."""
    n1, n2 = four_step_split(n, b_max)
    inner = make_plan(n2, radix_policy, **plan_kwargs)
    if n1 > b_max:
        outer = build_four_step(n1, b_max, radix_policy, **plan_kwargs)
    else:
        outer = make_plan(n1, radix_policy, **plan_kwargs)
    return FourStepPlan(n=n, n1=n1, n2=n2, inner_plan=inner, outer_plan=outer)


def transpose_with_twiddle(matrix, n, *, conjugate=False):
    """Transpose an n1 x n2 matrix, scaling element (j, k) by W_n^(j*k).

    Returns a new n2 x n1 array (the intermediate buffer is materialized,
    never fused). Applying the op twice with conjugate=True the second
    time recovers the original matrix, which the tests use as a self-check.
    """
    matrix = np.asarray(matrix)
    if matrix.ndim != 2:
        raise ValueError("transpose_with_twiddle expects a 2-d matrix")
    n1, n2 = matrix.shape
    if n1 * n2 != n:
        raise ValueError(f"matrix {n1}x{n2} does not tile a length-{n} signal")
    dtype = matrix.dtype if matrix.dtype in (SINGLE, DOUBLE) else DOUBLE
    jk = np.outer(np.arange(n1), np.arange(n2))
    w = twiddle(n, jk, dtype=dtype)
    if conjugate:
        w = np.conj(w)
    return np.ascontiguousarray((matrix.astype(dtype) * w).T)


def _transform_rows(plan, rows):
    # rows: (m, width); dispatch on the plan kind so multi-level recursion
    # flows through the same code path.
    if isinstance(plan, FourStepPlan):
        return np.stack([execute_four_step(plan, row) for row in rows])
    return run_stages(plan, rows)


def execute_four_step(plan, x):
    """Forward transform via the four-step pipeline; natural-order output."""
    x = np.asarray(x)
    if x.ndim != 1 or x.size != plan.n:
        raise ValueError(f"expected a length-{plan.n} signal, got shape {x.shape}")
    n1, n2 = plan.n1, plan.n2
    # stride-permutation load: M[j, k] = x[k*n1 + j]
    m = np.ascontiguousarray(x.reshape(n2, n1).T)
    m = _transform_rows(plan.inner_plan, m)           # n1 row FFTs of size n2
    m = transpose_with_twiddle(m, plan.n)             # scale + transpose -> (n2, n1)
    m = _transform_rows(plan.outer_plan, m)           # n2 row FFTs of size n1
    return np.ascontiguousarray(m.T).reshape(plan.n)  # transpose-read


def execute_plan(plan, x):
    """Run either a single-threadgroup FftPlan or a FourStepPlan."""
    if isinstance(plan, FourStepPlan):
        return execute_four_step(plan, x)
    return execute(plan, x)


def execute_plan_inverse(plan, x):
    """Inverse of execute_plan: conjugate -> forward -> conjugate, / n."""
    x = np.asarray(x)
    out = np.conj(execute_plan(plan, np.conj(x)))
    return out / out.dtype.type(plan.n)
