"""Philox4x64-10 counter-based generator, compiled with numba.

The block function reproduces numpy's ``Philox`` bit generator exactly, so
the stream keyed by ``(k0, k1)`` with counter ``(0, c1, 0, 0)`` equals
``np.random.Philox(key=[k0, k1], counter=[0, c1, 0, 0]).random_raw()``.
Streams are addressed by key and counter alone, which makes any partition of
work across threads reproducible.
"""

from __future__ import annotations

import numba as nb
import numpy as np

_M0 = np.uint64(0xD2E7470EE14C6C93)
_M1 = np.uint64(0xCA5A826395121157)
_W0 = np.uint64(0x9E3779B97F4A7C15)
_W1 = np.uint64(0xBB67AE8584CAA73B)
_MASK32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_TWO_M53 = 1.0 / 9007199254740992.0


@nb.njit(cache=True, inline="always")
def _mulhilo(a, b):
    a_lo = a & _MASK32
    a_hi = a >> _S32
    b_lo = b & _MASK32
    b_hi = b >> _S32
    lo_lo = a_lo * b_lo
    hi_lo = a_hi * b_lo
    lo_hi = a_lo * b_hi
    hi_hi = a_hi * b_hi
    cross = (lo_lo >> _S32) + (hi_lo & _MASK32) + lo_hi
    hi = hi_hi + (hi_lo >> _S32) + (cross >> _S32)
    lo = a * b
    return hi, lo


@nb.njit(cache=True)
def philox_block(c0, c1, c2, c3, k0, k1):
    """Ten Philox rounds on counter ``(c0..c3)`` with key ``(k0, k1)``."""
    for r in range(10):
        if r > 0:
            k0 = k0 + _W0
            k1 = k1 + _W1
        hi0, lo0 = _mulhilo(_M0, c0)
        hi1, lo1 = _mulhilo(_M1, c2)
        c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
    return c0, c1, c2, c3


@nb.njit(cache=True)
def raw_stream(k0, k1, c1, n):
    """First ``n`` raw 64-bit outputs of the stream (numpy ordering)."""
    out = np.empty(n, dtype=np.uint64)
    c0 = np.uint64(0)
    i = 0
    while i < n:
        c0 = c0 + _ONE  # numpy increments before each block
        b0, b1, b2, b3 = philox_block(c0, c1, np.uint64(0), np.uint64(0), k0, k1)
        for b in (b0, b1, b2, b3):
            if i < n:
                out[i] = b
                i += 1
    return out


@nb.njit(cache=True, inline="always")
def to_unit(x):
    """Uniform double in [0, 1) from the top 53 bits."""
    return float(x >> _S11) * _TWO_M53


def uniforms(seed: int, stream: int, substream: int, n: int) -> np.ndarray:
    """Convenience: ``n`` uniforms from stream ``(seed, stream)``, substream
    selecting the second counter word."""
    raw = raw_stream(np.uint64(seed), np.uint64(stream), np.uint64(substream), n)
    return (raw >> np.uint64(11)).astype(np.float64) * _TWO_M53
