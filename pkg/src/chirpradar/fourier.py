"""Length-N discrete Fourier transforms and cyclic correlations for prime N.

N is prime, so the line restrictions never call a length-N FFT directly.
Everything runs through power-of-two FFTs of size M >= 2N - 1: the DFT
through Bluestein's chirp-z identity, and cyclic correlations through
zero-padded linear correlation.  Both are O(N log N) with constants that
do not depend on how N - 1 or 2N - 1 factor.
"""

import threading
from functools import lru_cache

import numpy as np

# Per-thread scratch buffers keyed by FFT size.  At N ~ 4000 each buffer is
# 128 KiB, the default glibc mmap threshold, so fresh temporaries on every call
# would cost an mmap/munmap and page faults each.
_scratch = threading.local()


def _workspace(size):
    pool = getattr(_scratch, "pool", None)
    if pool is None:
        pool = _scratch.pool = {}
    bufs = pool.get(size)
    if bufs is None:
        bufs = pool[size] = (np.empty(size, dtype=complex), np.empty(size, dtype=complex))
    return bufs


def _pow2_at_least(n):
    return 1 << int(n - 1).bit_length()


@lru_cache(maxsize=32)
def _bluestein_plan(n):
    k = np.arange(n)
    # k^2 mod 2n keeps the phase argument small for large n
    w = np.exp(-1j * np.pi * ((k * k) % (2 * n)) / n)
    size = _pow2_at_least(2 * n - 1)
    b = np.zeros(size, dtype=complex)
    b[:n] = np.conj(w)
    b[size - n + 1:] = np.conj(w[1:][::-1])
    B = np.fft.fft(b)
    w.flags.writeable = False
    B.flags.writeable = False
    return w, size, B


def bluestein(x, inverse=False):
    """DFT of the last axis in O(N log N) for any N, via chirp-z.

    ``nk = (n^2 + k^2 - (k - n)^2) / 2`` turns the DFT into a linear
    convolution with a chirp, evaluated with power-of-two FFTs.  The chirp
    and its spectrum are cached per length.

    Parameters
    ----------
    x : array_like
        Input, transformed along the last axis.
    inverse : bool
        If True compute the inverse DFT (conjugate exponent, 1/N scaling).

    Returns
    -------
    ndarray
        Same shape as ``x``, complex.
    """
    x = np.asarray(x, dtype=complex)
    n = x.shape[-1]
    if n == 0:
        return x.copy()
    if inverse:
        return np.conj(bluestein(np.conj(x))) / n
    w, size, B = _bluestein_plan(n)
    if x.ndim == 1:
        a, _ = _workspace(size)
        np.multiply(x, w, out=a[:n])
        a[n:] = 0
        np.fft.fft(a, out=a)
        a *= B
        np.fft.ifft(a, out=a)
        return a[:n] * w
    conv = np.fft.ifft(np.fft.fft(x * w, n=size, axis=-1) * B, axis=-1)[..., :n]
    return conv * w


def dft(x, axis=-1):
    """Unnormalized forward DFT, X[k] = sum_n x[n] exp(-2 pi i k n / N)."""
    return np.moveaxis(bluestein(np.moveaxis(np.asarray(x), axis, -1)), -1, axis)


def idft(x, axis=-1):
    """Inverse of :func:`dft` (carries the 1/N factor)."""
    return np.moveaxis(bluestein(np.moveaxis(np.asarray(x), axis, -1), inverse=True), -1, axis)


def cyclic_correlate(u, v):
    """c[t] = sum_m u[m] v[(m + t) mod N] for 1-D u, v of equal length N.

    ``v`` is unrolled to length 2N - 1 so that a linear correlation of size
    M >= 2N - 1 reproduces the cyclic one for lags 0..N-1.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    n = u.shape[-1]
    size = _pow2_at_least(2 * n - 1)
    a, b = _workspace(size)
    a[:n] = v
    a[n:2 * n - 1] = v[: n - 1]
    a[2 * n - 1:] = 0
    np.conjugate(u, out=b[:n])
    b[n:] = 0
    np.fft.fft(a, out=a)
    np.fft.fft(b, out=b)
    np.conjugate(b, out=b)
    a *= b
    np.fft.ifft(a, out=a)
    return a[:n].copy()


def naive_dft(x):
    """O(N^2) matrix DFT, for testing only."""
    x = np.asarray(x, dtype=complex)
    n = x.shape[-1]
    k = np.arange(n)
    F = np.exp(-2j * np.pi * np.outer(k, k) / n)
    return x @ F.T
