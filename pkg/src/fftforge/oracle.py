"""Brute-force DFT reference and error metrics.

The oracle evaluates the defining sum directly, always in double
precision, blocked so the Fourier matrix never materializes whole for
large inputs. Index products are reduced modulo n as integers before the
transcendental call, so even n*k ~ 2^30 keeps full angular accuracy.
Deliberately O(n^2): nothing here shares code with the fast paths it
judges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# ~64 MiB of complex128 per Fourier-matrix block.
_BLOCK_ELEMENTS = 1 << 22


@dataclass(frozen=True)
class ErrorReport:
    relative_l2: float
    max_abs_componentwise: float
    n: int


def _dft_block(signals, sign):
    # signals: (m, n) complex128 -> (m, n) transformed rows.
    m, n = signals.shape
    idx = np.arange(n, dtype=np.int64)
    # all n distinct roots up front; blocks then only index, never exp
    roots = np.exp((sign * 2j * np.pi / n) * idx)
    out = np.empty((m, n), dtype=np.complex128)
    rows = max(1, _BLOCK_ELEMENTS // n)
    for start in range(0, n, rows):
        kblk = idx[start : start + rows]
        w = roots[(kblk[:, None] * idx[None, :]) % n]
        out[:, start : start + rows] = signals @ w.T
    return out


def naive_dft(x):
    """X[k] = sum_n x[n] * exp(-2*pi*i*n*k/N) by direct summation."""
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 1 or x.size < 1:
        raise ValueError("naive_dft expects a non-empty 1-d signal")
    return _dft_block(x[None, :], -1.0)[0]


def naive_dft_batch(signals):
    """Row-wise naive_dft of a (batch, n) stack, sharing matrix blocks."""
    signals = np.asarray(signals, dtype=np.complex128)
    if signals.ndim != 2:
        raise ValueError("naive_dft_batch expects a 2-d (batch, n) array")
    return _dft_block(signals, -1.0)


def naive_idft(x):
    """Inverse transform: x[n] = (1/N) sum_k X[k] * exp(+2*pi*i*n*k/N)."""
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 1 or x.size < 1:
        raise ValueError("naive_idft expects a non-empty 1-d signal")
    return _dft_block(x[None, :], 1.0)[0] / x.size


def compare(a, b):
    """Error metrics between a candidate a and a reference b.

    relative_l2 is ||a - b|| / ||b|| with the 0/0 case defined as 0.
    max_abs_componentwise is the largest |difference| over real and
    imaginary parts separately (symmetric in its arguments; relative_l2
    is normalized by b, so it is not).
    """
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    denom = float(np.linalg.norm(b))
    num = float(np.linalg.norm(diff))
    if denom == 0.0:
        rel = 0.0 if num == 0.0 else float("inf")
    else:
        rel = num / denom
    max_abs = 0.0
    if diff.size:
        max_abs = float(max(np.abs(diff.real).max(), np.abs(diff.imag).max()))
    return ErrorReport(relative_l2=rel, max_abs_componentwise=max_abs, n=int(a.size))


def random_signal(n, seed, dtype=np.complex128):
    """Reproducible test signal, re/im i.i.d. uniform on [-1, 1)."""
    rng = np.random.default_rng(seed)
    re = rng.uniform(-1.0, 1.0, n)
    im = rng.uniform(-1.0, 1.0, n)
    return (re + 1j * im).astype(dtype)
