"""Complex scalar primitives shared by the butterflies and the executor.

Values are numpy complex scalars or arrays. "single" working precision is
complex64, matching the float2 arithmetic of the GPU kernels this package
models; "double" is complex128 and is what the validation oracle uses.
Twiddle angles are always reduced modulo n and evaluated with double
transcendentals before casting down, so large indices lose no accuracy.
"""

from __future__ import annotations

import numpy as np

SINGLE = np.complex64
DOUBLE = np.complex128

_TAU = 2.0 * np.pi


def cadd(a, b):
    """Component-wise complex sum (re_a + re_b, im_a + im_b)."""
    return a + b


def cmul(a, b):
    """Complex product (re_a*re_b - im_a*im_b, re_a*im_b + im_a*re_b).

    numpy evaluates this in the operands' own precision, which is exactly
    the arithmetic the modeled kernels perform, so chained single-precision
    products accumulate realistic rounding.
    """
    return a * b


def twiddle(n, k, dtype=SINGLE):
    """Root of unity W_n^k = exp(-2*pi*i*k/n).

    Periodic in k modulo n; k may be a scalar or an integer array. One
    sine/cosine pair per value (the "transcendental route"); see
    twiddle_chain for the multiply-chained alternative.
    """
    if n < 1:
        raise ValueError(f"twiddle order must be a positive integer, got {n}")
    k = np.asarray(k)
    ang = (-_TAU / n) * np.mod(k, n).astype(np.float64)
    val = np.cos(ang) + 1j * np.sin(ang)
    if val.ndim == 0:
        return dtype(complex(val))
    return val.astype(dtype)


def twiddle_chain(w1, count):
    """Successive powers [w1, w1^2, ..., w1^count] by repeated cmul.

    A single transcendental evaluation (the caller's w1) feeds the whole
    chain; each further factor costs one complex multiply in w1's own
    precision, with no renormalization -- the single-sincos scheme the
    generated kernels use. w1 may be a scalar or an array of bases; the
    power index is the leading axis of the result.
    """
    if count < 1:
        raise ValueError(f"chain length must be >= 1, got {count}")
    w1 = np.asarray(w1)
    out = np.empty((count,) + w1.shape, dtype=w1.dtype)
    out[0] = w1
    for j in range(1, count):
        out[j] = cmul(out[j - 1], w1)
    return out
