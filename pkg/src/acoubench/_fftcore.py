"""Radix-2 FFT core shared by the DSP kernels and the preprocessing code."""

from __future__ import annotations

import functools

import numpy as np

from .errors import ParameterError


def is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def next_pow2(n: int) -> int:
    """Smallest power of two >= n."""
    p = 1
    while p < n:
        p *= 2
    return p


@functools.lru_cache(maxsize=64)
def _bit_reversal(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    rev.flags.writeable = False
    return rev


@functools.lru_cache(maxsize=256)
def _twiddles(size: int, inverse: bool) -> np.ndarray:
    sign = 1.0 if inverse else -1.0
    w = np.exp(sign * 2j * np.pi * np.arange(size // 2) / size)
    w.flags.writeable = False
    return w


def fft_core(a: np.ndarray, inverse: bool = False) -> np.ndarray:
    """Iterative radix-2 Cooley-Tukey along the last axis.

    Accepts any leading batch shape; the transform length must be a
    power of two. The inverse includes the 1/n scaling.
    """
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[-1]
    if not is_pow2(n):
        raise ParameterError(f"FFT length must be a power of two, got {n}")
    out = a[..., _bit_reversal(n)]
    size = 2
    while size <= n:
        half = size // 2
        w = _twiddles(size, inverse)
        v = out.reshape(out.shape[:-1] + (n // size, size))
        even = v[..., :half].copy()
        odd = v[..., half:] * w
        v[..., :half] = even + odd
        v[..., half:] = even - odd
        size *= 2
    if inverse:
        out = out / n
    return out
