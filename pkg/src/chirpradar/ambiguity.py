"""Heisenberg operators and the ambiguity function.

Convention: ``A(f, g)[tau, omega] = <pi(tau, omega) f, g>`` with the symmetric
Heisenberg operator

    [pi(tau, omega) f][n] = e(-inv2*tau*omega) * e(omega*n) * f[n - tau].

The more common convention ``<e(omega n) f[n - tau], g>`` equals
``e(inv2*tau*omega) * A(f, g)[tau, omega]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fourier import bluestein as _dft
from .fourier import cyclic_correlate
from .modarith import Modulus, PlanePoint, ShiftedLine
from .sequences import ChirpId, chirp, e_int, inner, root_of_unity

# Rows per batched FFT in ambiguity_full; bounds peak memory at N ~ 10^4.
_FULL_BLOCK = 256


@lru_cache(maxsize=64)
def _modulus(N: int) -> Modulus:
    return Modulus(N)


def modulus_of(f) -> Modulus:
    """The modulus implied by a sequence's length (validated as an odd prime)."""
    return _modulus(len(f))


def _check_pair(f, g):
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    if f.shape != g.shape or f.ndim != 1:
        raise ValueError(f"sequences must be 1-D of equal length, got {f.shape} and {g.shape}")
    return f, g, modulus_of(f)


def heisenberg_apply(p, f) -> np.ndarray:
    """pi(p) f for p = (tau, omega)."""
    f = np.asarray(f, dtype=complex)
    m = modulus_of(f)
    tau, omega = p[0] % m.N, p[1] % m.N
    n = np.arange(m.N, dtype=np.int64)
    phase = e_int(m, -m.inv2 * tau * omega + omega * n)
    return phase * np.roll(f, tau)


def ambiguity_entry(f, g, p) -> complex:
    """A(f, g)[p] straight from the definition, O(N)."""
    return inner(heisenberg_apply(p, f), g)


@dataclass(frozen=True)
class AmbiguityLineProfile:
    """Values of A(f, g) along a shifted line, indexed by the line parameter."""

    line: ShiftedLine
    values: np.ndarray

    def points(self) -> list[PlanePoint]:
        return self.line.points()

    def at(self, p) -> complex:
        return complex(self.values[self.line.param(p)])


def ambiguity_on_line(f, g, L: ShiftedLine) -> AmbiguityLineProfile:
    """All N values of A(f, g) on a shifted line in O(N log N).

    Finite slope a, canonical shift (0, w0), q = inv2*a.  Writing
    ``e(a*tau*n) = e(q n^2) e(-q (n - tau)^2) e(q tau^2)`` turns the profile into
    ``A[tau] = e(-inv2*w0*tau) * sum_n u[n - tau] v[n]`` with
    ``u[m] = f[m] e(-q m^2)`` and ``v[n] = conj(g[n]) e(w0 n) e(q n^2)``, a
    cyclic correlation.  Infinite slope with shift (t0, 0) is one DFT of
    ``f[n - t0] conj(g[n])``.
    """
    f, g, m = _check_pair(f, g)
    if L.modulus != m:
        raise ValueError(f"line is over Z_{L.modulus.N}, sequences have length {m.N}")
    N = m.N
    n = np.arange(N, dtype=np.int64)
    if L.line.is_infinite:
        t0 = L.shift[0]
        prod = np.roll(f, t0) * np.conj(g)
        # sum_n prod[n] e(omega n) for every omega
        vals = np.conj(_dft(np.conj(prod))) * e_int(m, -m.inv2 * t0 * n)
    else:
        q = m.inv2 * L.line.slope % N
        w0 = L.shift[1]
        sq = n * n % N
        u = f * e_int(m, -q * sq)
        v = np.conj(g) * e_int(m, w0 * n + q * sq)
        corr = cyclic_correlate(u, v)
        vals = corr * e_int(m, -m.inv2 * w0 * n)
    return AmbiguityLineProfile(L, vals)


def ambiguity_full(f, g) -> np.ndarray:
    """The N x N matrix A(f, g)[tau, omega] in O(N^2 log N).

    Row ``tau`` is the restriction to the vertical shifted line
    ``L_inf + (tau, 0)``; those N lines tile the plane once.
    """
    f, g, m = _check_pair(f, g)
    N = m.N
    n = np.arange(N, dtype=np.int64)
    gc = np.conj(g)
    out = np.empty((N, N), dtype=complex)
    for start in range(0, N, _FULL_BLOCK):
        taus = np.arange(start, min(start + _FULL_BLOCK, N), dtype=np.int64)
        prod = f[(n[None, :] - taus[:, None]) % N] * gc[None, :]
        phase = e_int(m, -m.inv2 * (taus[:, None] * n[None, :] % N))
        out[taus] = np.conj(_dft(np.conj(prod))) * phase
    return out


def commutation_check(p, q, f) -> float:
    """max |pi(p)pi(q)f - e(omega*tau' - tau*omega') pi(q)pi(p)f|."""
    f = np.asarray(f, dtype=complex)
    m = modulus_of(f)
    lhs = heisenberg_apply(p, heisenberg_apply(q, f))
    rhs = heisenberg_apply(q, heisenberg_apply(p, f))
    phase = root_of_unity(m, p[1] * q[0] - p[0] * q[1])
    return float(np.max(np.abs(lhs - phase * rhs)))


def eigenfunction_check(cid: ChirpId, l) -> float:
    """max |pi(l) C - psi(l) C| for the chirp C = C_{L,b} and l on L."""
    eigval = cid.character(l)
    c = chirp(cid)
    return float(np.max(np.abs(heisenberg_apply(l, c) - eigval * c)))
