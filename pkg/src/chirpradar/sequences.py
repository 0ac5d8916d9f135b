"""The space of complex sequences on Z_N: chirps, characters, pseudo-random sequences.

Sequences are plain 1-D complex ``numpy`` arrays of length N.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .modarith import Modulus, PlaneLine, PlanePoint


@lru_cache(maxsize=64)
def _root_table(N: int) -> np.ndarray:
    t = np.exp(2j * np.pi * np.arange(N) / N)
    t.flags.writeable = False
    return t


def root_table(m: Modulus) -> np.ndarray:
    """Read-only table ``[e(0), e(1), ..., e(N-1)]`` with ``e(t) = exp(2 pi i t / N)``."""
    return _root_table(m.N)


def root_of_unity(m: Modulus, t):
    """e(t) = exp(2 pi i t / N).

    Integer exponents are reduced mod N and read from the table so that
    e(t) and e(t + N) are bitwise equal; real exponents are evaluated directly.
    """
    if isinstance(t, (int, np.integer)):
        return complex(root_table(m)[int(t) % m.N])
    return complex(np.exp(2j * np.pi * t / m.N))


def e_int(m: Modulus, exponents) -> np.ndarray:
    """Vectorized e(.) for integer exponent arrays."""
    return root_table(m)[np.mod(exponents, m.N)]


@dataclass(frozen=True)
class ChirpId:
    """Identifies the basis chirp C_{L,b}."""

    line: PlaneLine
    b: int

    def __post_init__(self):
        object.__setattr__(self, "b", int(self.b) % self.line.modulus.N)

    @property
    def modulus(self) -> Modulus:
        return self.line.modulus

    @property
    def character(self) -> Character:
        return Character(self.line, self.b)


@dataclass(frozen=True)
class Character:
    """The character psi_{L,b} of a line: e(b*tau) on L_a, e(b*omega) on L_inf."""

    line: PlaneLine
    b: int

    def __call__(self, p) -> complex:
        return character_eval(self, p)


def character_eval(psi: Character, p) -> complex:
    m = psi.line.modulus
    t = psi.line.param(p)  # raises for points off the line
    return root_of_unity(m, psi.b * t)


def chirp(cid: ChirpId) -> np.ndarray:
    """The unit-norm chirp C_{L,b}.

    For finite slope a: ``e(inv2*a*n^2 - b*n) / sqrt(N)``; for the infinite
    slope: the Dirac delta at b.
    """
    m = cid.modulus
    N = m.N
    if cid.line.is_infinite:
        out = np.zeros(N, dtype=complex)
        out[cid.b] = 1.0
        return out
    n = np.arange(N, dtype=np.int64)
    expo = (m.inv2 * cid.line.slope % N) * (n * n % N) - cid.b * n
    return e_int(m, expo) / np.sqrt(N)


def chirp_basis(line: PlaneLine) -> np.ndarray:
    """Rows are the N chirps C_{line,b}, b = 0..N-1."""
    return np.stack([chirp(ChirpId(line, b)) for b in range(line.modulus.N)])


def delta(m: Modulus, b: int) -> np.ndarray:
    out = np.zeros(m.N, dtype=complex)
    out[b % m.N] = 1.0
    return out


def as_sequence(values, m: Modulus | None = None) -> np.ndarray:
    """Validate and coerce to a finite complex vector (of length N if given)."""
    x = np.asarray(values, dtype=complex)
    if x.ndim != 1:
        raise ValueError(f"sequence must be 1-D, got shape {x.shape}")
    if m is not None and x.shape[0] != m.N:
        raise ValueError(f"sequence has length {x.shape[0]}, expected N={m.N}")
    if not np.all(np.isfinite(x)):
        raise ValueError("sequence contains non-finite entries")
    return x


def inner(f, g) -> complex:
    """<f, g> = sum f[n] conj(g[n])."""
    f = np.asarray(f)
    g = np.asarray(g)
    if f.shape != g.shape:
        raise ValueError(f"length mismatch: {f.shape} vs {g.shape}")
    return complex(np.vdot(g, f))


def norm(f) -> float:
    return float(np.linalg.norm(f))


def pseudorandom_sequence(m: Modulus, rng: np.random.Generator) -> np.ndarray:
    """Unit-norm sequence of i.i.d. uniform phases, exp(i theta_n) / sqrt(N)."""
    theta = rng.uniform(0.0, 2 * np.pi, size=m.N)
    return np.exp(1j * theta) / np.sqrt(m.N)


def measure_pseudorandomness(phi) -> float:
    """sqrt(N) * max over (tau, omega) != (0, 0) of |A(phi, phi)|."""
    from .ambiguity import ambiguity_full

    phi = np.asarray(phi, dtype=complex)
    A = np.abs(ambiguity_full(phi, phi))
    A[0, 0] = 0.0
    return float(np.sqrt(len(phi)) * A.max())


def write_sequence_csv(path, x) -> None:
    """Write ``index,re,im`` rows; floats use repr so reading back is exact."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "re", "im"])
        for i, v in enumerate(np.asarray(x, dtype=complex)):
            w.writerow([i, repr(float(v.real)), repr(float(v.imag))])


def read_sequence_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = np.zeros(len(rows), dtype=complex)
    for row in rows:
        out[int(row["index"])] = complex(float(row["re"]), float(row["im"]))
    return as_sequence(out)
