"""Binary signal container for the CLI: header + interleaved complex.

Layout is fixed little-endian: a 16-byte header (magic ``SFFT``, u32
format version, u32 element count, u8 bytes-per-real-component, three
pad bytes) followed by count interleaved (re, im) pairs. Precision tag 4
means complex64 payload, 8 means complex128.
"""

from __future__ import annotations

import struct

import numpy as np

MAGIC = b"SFFT"
VERSION = 1
_HEADER = struct.Struct("<4s I I B 3x")

_TAG_TO_DTYPE = {4: np.complex64, 8: np.complex128}
_DTYPE_TO_TAG = {np.dtype(np.complex64): 4, np.dtype(np.complex128): 8}


class SignalFormatError(ValueError):
    """Raised when bytes on disk do not parse as a signal file."""


def write_signal(path, values):
    """Serialize a 1-d complex array; returns the byte count written."""
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise ValueError(f"signals are 1-d, got shape {arr.shape}")
    if arr.dtype not in _DTYPE_TO_TAG:
        arr = arr.astype(np.complex128)
    tag = _DTYPE_TO_TAG[arr.dtype]

    interleaved = np.empty(2 * arr.size, dtype=np.float32 if tag == 4 else np.float64)
    interleaved[0::2] = arr.real
    interleaved[1::2] = arr.imag

    header = _HEADER.pack(MAGIC, VERSION, arr.size, tag)
    payload = interleaved.astype(interleaved.dtype.newbyteorder("<")).tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)
    return _HEADER.size + len(payload)


def read_signal(path):
    """Parse a signal file back into a 1-d complex numpy array."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise SignalFormatError(f"file is {len(raw)} bytes; header needs {_HEADER.size}")
    magic, version, count, tag = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise SignalFormatError(f"bad magic {magic!r}; expected {MAGIC!r}")
    if version != VERSION:
        raise SignalFormatError(f"unsupported format version {version}")
    if tag not in _TAG_TO_DTYPE:
        raise SignalFormatError(f"unknown precision tag {tag}")

    scalar = np.dtype(np.float32 if tag == 4 else np.float64).newbyteorder("<")
    expected = _HEADER.size + 2 * count * scalar.itemsize
    if len(raw) != expected:
        raise SignalFormatError(f"payload is {len(raw) - _HEADER.size} bytes; header promises {expected - _HEADER.size}")

    flat = np.frombuffer(raw, dtype=scalar, offset=_HEADER.size)
    out = np.empty(count, dtype=_TAG_TO_DTYPE[tag])
    out.real = flat[0::2]
    out.imag = flat[1::2]
    return out
