"""Shared brute-force oracles.

Everything here is written directly from the definitions with explicit
loops or dense matrices, independent of the package's fast paths.
"""

import cmath
import math

import numpy as np
import pytest

ACCEPTANCE_LINES: list[str] = []


def e_ref(N, x):
    return cmath.exp(2j * math.pi * x / N)


def inv2_ref(N):
    return next(k for k in range(N) if 2 * k % N == 1)


def heisenberg_ref(N, tau, omega, f):
    """pi(tau, omega) f [n] = e(-tau*omega/2) e(omega n) f[n - tau]."""
    h = inv2_ref(N)
    return np.array([e_ref(N, -h * tau * omega + omega * n) * f[(n - tau) % N] for n in range(N)])


def ambiguity_ref(f, g, tau, omega):
    N = len(f)
    return complex(np.sum(heisenberg_ref(N, tau, omega, f) * np.conj(g)))


def ambiguity_matrix_ref(f, g):
    N = len(f)
    return np.array([[ambiguity_ref(f, g, t, w) for w in range(N)] for t in range(N)])


def chirp_ref(N, a, b):
    """C_{a,b}; a=None is the Dirac delta at b."""
    if a is None:
        out = np.zeros(N, complex)
        out[b % N] = 1
        return out
    h = inv2_ref(N)
    return np.array([e_ref(N, h * a * n * n - b * n) for n in range(N)]) / math.sqrt(N)


def line_ref(N, a, shift=(0, 0)):
    """Point set of L_a + shift as a python set."""
    t0, w0 = shift
    if a is None:
        return {(t0 % N, (w0 + w) % N) for w in range(N)}
    return {((t0 + t) % N, (w0 + a * t) % N) for t in range(N)}


def channel_ref(N, targets, S):
    """H(S) = sum alpha e(tau*omega/2) pi(tau, omega) S."""
    h = inv2_ref(N)
    out = np.zeros(N, complex)
    for t, w, alpha in targets:
        out += alpha * e_ref(N, h * t * w) * heisenberg_ref(N, t, w, S)
    return out


def random_vec(rng, N):
    return rng.normal(size=N) + 1j * rng.normal(size=N)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
