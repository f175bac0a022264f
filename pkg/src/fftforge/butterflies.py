"""Twiddle-free DFT butterfly cores for radix 2, 4 and 8.

Each core computes the natural-order r-point DFT of its input. Inter-stage
twiddles are applied by the executor *before* the data reaches these
functions, so the cores stay pure and the constants below are the only
multiplicative content.

All cores broadcast: axis 0 is the butterfly axis (length r), trailing
axes are independent lanes, so a single call evaluates every butterfly of
a stage at once.
"""

from __future__ import annotations

import numpy as np

from .complex_core import SINGLE, cmul, twiddle

# sqrt(1/2): the real/imaginary magnitude of the odd eighth roots of unity.
_RSQRT2 = float(np.sqrt(0.5))


def _w8_constants(scalar):
    # W8^1, W8^2, W8^3 baked as compile-time style constants.
    return (
        scalar(_RSQRT2 - 1j * _RSQRT2),
        scalar(-1j),
        scalar(-_RSQRT2 - 1j * _RSQRT2),
    )


def butterfly_radix2(x):
    """2-point DFT: (x0 + x1, x0 - x1)."""
    x = np.asarray(x)
    return np.stack((x[0] + x[1], x[0] - x[1]))


def butterfly_radix4(x):
    """4-point DFT, natural order, as two add/sub ranks and one -i rotation."""
    x = np.asarray(x)
    t0 = x[0] + x[2]
    t1 = x[0] - x[2]
    t2 = x[1] + x[3]
    t3 = cmul(x[1] - x[3], x.dtype.type(-1j))
    return np.stack((t0 + t2, t1 + t3, t0 - t2, t1 - t3))


def butterfly_radix8_splitradix(x):
    """8-point DFT, split-radix decimation-in-time.

    Two 4-point DFTs over the even/odd input interleaves, the odd branch
    scaled by W8^k, then one combining add/sub rank:

        X[k]   = E[k] + W8^k * O[k]
        X[k+4] = E[k] - W8^k * O[k]

    Counted in real operations this is 54 additions and 12 multiplications
    (each W8 constant applied as a generic complex product).
    """
    x = np.asarray(x)
    w81, w82, w83 = _w8_constants(x.dtype.type)
    even = butterfly_radix4(x[0::2])
    odd = butterfly_radix4(x[1::2])
    o0 = odd[0]
    o1 = cmul(odd[1], w81)
    o2 = cmul(odd[2], w82)
    o3 = cmul(odd[3], w83)
    return np.stack(
        (
            even[0] + o0,
            even[1] + o1,
            even[2] + o2,
            even[3] + o3,
            even[0] - o0,
            even[1] - o1,
            even[2] - o2,
            even[3] - o3,
        )
    )


BUTTERFLIES = {
    2: butterfly_radix2,
    4: butterfly_radix4,
    8: butterfly_radix8_splitradix,
}


def dft8_matrix(dtype=SINGLE):
    """The dense 8x8 Fourier matrix F8[j, k] = W8^(j*k)."""
    jk = np.outer(np.arange(8), np.arange(8))
    return twiddle(8, jk, dtype=dtype)


def mma_complex_multiply(f_re, f_im, x_re, x_im):
    """Complex 8x8 matrix product via four real matrix products.

    Computes Y = (f_re + i*f_im) @ (x_re + i*x_im) using exactly four real
    8x8 matmuls and two elementwise combines, the layout a real-valued
    matrix-multiply-accumulate unit forces:

        y_re = f_re @ x_re - f_im @ x_im
        y_im = f_re @ x_im + f_im @ x_re
    """
    for name, m in (("f_re", f_re), ("f_im", f_im), ("x_re", x_re), ("x_im", x_im)):
        m = np.asarray(m)
        if m.shape != (8, 8):
            raise ValueError(f"{name} must be 8x8, got {m.shape}")
    y_re = f_re @ x_re - f_im @ x_im
    y_im = f_re @ x_im + f_im @ x_re
    return y_re, y_im


def mma_flop_ratio():
    """Arithmetic overhead of the matrix route over the split-radix route.

    Counting convention (documented here, used consistently below): one
    real multiply or add is one FLOP, a matmul is the standard 2*m*n*k.
    Both sides are normalized to one 8-point DFT column inside a radix-8
    stage, and the scalar side is the full per-butterfly stage cost --
    butterfly core plus its chained twiddle arithmetic -- i.e. the same
    per-butterfly accounting the radix selection profiles use. The matrix
    side is the tile product that would replace it, whose stage twiddles
    ride the tile-marshaling path rather than the ALU path.

    Matrix side, per column of an 8-column tile:
        4 real matmuls of 2*8*8*8 FLOPs plus 2 combines of 8*8, over 8
        columns -> (4*1024 + 128) / 8 = 528.
    Scalar side, per butterfly:
        54 adds + 12 muls core (see butterfly_radix8_splitradix), plus the
        single-sincos chain (6 complex multiplies) and 7 twiddle
        applications at 6 FLOPs each -> 66 + 36 + 42 = 144.

    Exact value: 528/144 = 11/3 ~= 3.67.
    """
    matmul_flops = 2 * 8 * 8 * 8
    combine_flops = 8 * 8
    mma_per_column = (4 * matmul_flops + 2 * combine_flops) / 8

    dft4_pair = 2 * 16          # two 4-point cores, adds only
    w8_scaling = 3 * 6          # three constant complex products
    combine_rank = 16           # final add/sub rank
    chain = 6 * 6               # w2..w7 from one sincos, one cmul each
    applications = 7 * 6        # w1..w7 applied to the butterfly inputs
    scalar_per_butterfly = dft4_pair + w8_scaling + combine_rank + chain + applications

    return mma_per_column / scalar_per_butterfly
