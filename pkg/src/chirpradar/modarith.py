"""Arithmetic in Z_N and geometry of the delay-Doppler plane Z_N x Z_N.

Points are plain ``(tau, omega)`` tuples of canonical residues so they can be
used directly as dictionary keys and set members.  Lines always pass through
the origin; a :class:`ShiftedLine` is a coset ``L + v``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

# Deterministic Miller-Rabin witnesses, valid for n < 3,317,044,064,679,887,385,961,981.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PlanePoint(NamedTuple):
    """A delay-Doppler pair: delay in samples, Doppler in frequency bins."""

    tau: int
    omega: int


@dataclass(frozen=True)
class Modulus:
    """The ring Z_N for an odd prime N."""

    N: int

    def __post_init__(self):
        if not isinstance(self.N, (int, np.integer)) or isinstance(self.N, bool):
            raise TypeError(f"N must be an integer, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        if self.N == 2 or not is_prime(self.N):
            raise ValueError(f"N must be an odd prime, got {self.N}")

    @property
    def inv2(self) -> int:
        """The inverse of 2 mod N, i.e. (N+1)/2."""
        return (self.N + 1) // 2

    def point(self, tau: int, omega: int) -> PlanePoint:
        return PlanePoint(int(tau) % self.N, int(omega) % self.N)

    def add(self, u: Sequence[int], v: Sequence[int]) -> PlanePoint:
        return self.point(u[0] + v[0], u[1] + v[1])

    def sub(self, u: Sequence[int], v: Sequence[int]) -> PlanePoint:
        return self.point(u[0] - v[0], u[1] - v[1])

    def neg(self, u: Sequence[int]) -> PlanePoint:
        return self.point(-u[0], -u[1])

    def lines(self) -> list[PlaneLine]:
        """All N+1 lines through the origin; finite slopes first, then infinity."""
        return [PlaneLine(self, a) for a in range(self.N)] + [PlaneLine(self, None)]


def inv2(m: Modulus) -> int:
    return m.inv2


@dataclass(frozen=True)
class PlaneLine:
    """A line through the origin.

    ``slope=a`` is ``{(t, a*t)}``; ``slope=None`` is the vertical line
    ``{(0, w)}`` of infinite slope.
    """

    modulus: Modulus
    slope: int | None

    def __post_init__(self):
        if self.slope is not None:
            object.__setattr__(self, "slope", int(self.slope) % self.modulus.N)

    @classmethod
    def infinite(cls, m: Modulus) -> PlaneLine:
        return cls(m, None)

    @property
    def is_infinite(self) -> bool:
        return self.slope is None

    @property
    def direction(self) -> PlanePoint:
        if self.slope is None:
            return PlanePoint(0, 1)
        return PlanePoint(1, self.slope)

    def point(self, t: int) -> PlanePoint:
        """The point with line parameter ``t``."""
        if self.slope is None:
            return self.modulus.point(0, t)
        return self.modulus.point(t, self.slope * t)

    def param(self, p: Sequence[int]) -> int:
        """Line parameter of a point on the line (tau, or omega for infinite slope)."""
        if not self.contains(p):
            raise ValueError(f"{tuple(p)} is not on {self}")
        return int(p[1] if self.slope is None else p[0]) % self.modulus.N

    def contains(self, p: Sequence[int]) -> bool:
        N = self.modulus.N
        if self.slope is None:
            return p[0] % N == 0
        return (p[1] - self.slope * p[0]) % N == 0

    def points(self) -> list[PlanePoint]:
        return [self.point(t) for t in range(self.modulus.N)]

    def __str__(self):
        return "L_inf" if self.slope is None else f"L_{self.slope}"


@dataclass(frozen=True)
class ShiftedLine:
    """The coset ``line + shift``, stored in canonical form.

    Finite slopes keep a shift of the form ``(0, w0)``; the infinite-slope line
    keeps ``(t0, 0)``.  Equal point sets therefore compare equal.
    """

    line: PlaneLine
    shift: PlanePoint = PlanePoint(0, 0)

    def __post_init__(self):
        m = self.line.modulus
        t0, w0 = self.shift
        if self.line.slope is None:
            shift = m.point(t0, 0)
        else:
            shift = m.point(0, w0 - self.line.slope * t0)
        object.__setattr__(self, "shift", shift)

    @property
    def modulus(self) -> Modulus:
        return self.line.modulus

    def point(self, t: int) -> PlanePoint:
        return self.modulus.add(self.line.point(t), self.shift)

    def contains(self, p: Sequence[int]) -> bool:
        return self.line.contains(self.modulus.sub(p, self.shift))

    def param(self, p: Sequence[int]) -> int:
        return self.line.param(self.modulus.sub(p, self.shift))

    def points(self) -> list[PlanePoint]:
        return [self.point(t) for t in range(self.modulus.N)]

    def __str__(self):
        return f"{self.line}+{tuple(self.shift)}"


def line_points(L: ShiftedLine | PlaneLine) -> list[PlanePoint]:
    """All N points of a (shifted) line, in line-parameter order."""
    return L.points()


ALL = "ALL"


def intersect(A: ShiftedLine, B: ShiftedLine) -> PlanePoint | str | None:
    """Intersection of two shifted lines.

    Returns the unique common point for transversal lines, ``ALL`` for equal
    point sets and ``None`` for distinct parallel lines.
    """
    m = A.modulus
    if A.modulus != B.modulus:
        raise ValueError("lines live over different moduli")
    if A.line == B.line:
        return ALL if A.shift == B.shift else None
    if A.line.is_infinite:
        A, B = B, A
    # A: omega = a*tau + w0 (finite slope)
    a, w0 = A.line.slope, A.shift[1]
    if B.line.is_infinite:
        tau = B.shift[0]
    else:
        # a*tau + w0 = b*tau + w1
        b, w1 = B.line.slope, B.shift[1]
        tau = (w1 - w0) * pow(a - b, -1, m.N)
    return m.point(tau, a * tau + w0)


def symplectic(m: Modulus, u: Sequence[int], v: Sequence[int]) -> int:
    """The symplectic form tau*omega' - omega*tau' mod N."""
    return (u[0] * v[1] - u[1] * v[0]) % m.N


def random_distinct_lines(m: Modulus, count: int, rng: np.random.Generator) -> list[PlaneLine]:
    """``count`` distinct lines drawn uniformly from the N+1 lines (infinity included)."""
    if count < 0 or count > m.N + 1:
        raise ValueError(f"cannot draw {count} distinct lines; only {m.N + 1} exist")
    idx = rng.choice(m.N + 1, size=count, replace=False)
    return [PlaneLine(m, None if i == m.N else int(i)) for i in idx]
