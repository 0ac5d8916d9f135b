"""Sparse delay-Doppler channel simulation and the genericity / perfectness predicates."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .ambiguity import heisenberg_apply
from .modarith import Modulus, PlaneLine, PlanePoint, ShiftedLine, intersect
from .sequences import root_of_unity

# slack on the sum |alpha_k|^2 <= 1 for attenuations read back from text
_ENERGY_SLACK = 1e-9


@dataclass(frozen=True)
class Target:
    delay: int
    doppler: int
    attenuation: complex

    def __post_init__(self):
        if abs(self.attenuation) <= 0:
            raise ValueError("target attenuation must be non-zero")

    @property
    def point(self) -> PlanePoint:
        return PlanePoint(self.delay, self.doppler)


@dataclass(frozen=True)
class ChannelSpec:
    """Targets plus additive noise with per-component standard deviation ``noise_sigma``."""

    modulus: Modulus
    targets: tuple[Target, ...] = ()
    noise_sigma: float = 0.0

    def __post_init__(self):
        N = self.modulus.N
        targets = tuple(
            Target(t.delay % N, t.doppler % N, complex(t.attenuation)) for t in self.targets
        )
        object.__setattr__(self, "targets", targets)
        if self.noise_sigma < 0 or not math.isfinite(self.noise_sigma):
            raise ValueError(f"noise_sigma must be finite and >= 0, got {self.noise_sigma}")
        energy = sum(abs(t.attenuation) ** 2 for t in targets)
        if energy > 1 + _ENERGY_SLACK:
            raise ValueError(f"sum of |alpha_k|^2 is {energy:.6g} > 1")
        pts = [t.point for t in targets]
        if len(set(pts)) != len(pts):
            raise ValueError("target delay-Doppler pairs must be distinct")

    @property
    def r(self) -> int:
        return len(self.targets)

    @property
    def support(self) -> list[PlanePoint]:
        return [t.point for t in self.targets]

    def snr(self) -> float:
        """Nominal SNR for a unit-norm transmission."""
        return snr_from_sigma(self.modulus, self.noise_sigma)

    def to_dict(self) -> dict:
        return {
            "N": self.modulus.N,
            "targets": [
                {
                    "tau": t.delay,
                    "omega": t.doppler,
                    "alpha_re": float(t.attenuation.real),
                    "alpha_im": float(t.attenuation.imag),
                }
                for t in self.targets
            ],
            "noise_sigma": float(self.noise_sigma),
        }

    @classmethod
    def from_dict(cls, d: dict) -> ChannelSpec:
        try:
            m = Modulus(int(d["N"]))
            targets = tuple(
                Target(int(t["tau"]), int(t["omega"]), complex(t["alpha_re"], t["alpha_im"]))
                for t in d["targets"]
            )
            return cls(m, targets, float(d.get("noise_sigma", 0.0)))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed scene: {exc!r}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> ChannelSpec:
        return cls.from_dict(json.loads(text))


def snr_from_sigma(m: Modulus, sigma: float) -> float:
    """SNR = 1 / (2 N sigma^2) for unit-norm transmissions; inf when sigma = 0."""
    if sigma == 0:
        return math.inf
    return 1.0 / (2 * m.N * sigma * sigma)


def sigma_from_snr(m: Modulus, snr: float) -> float:
    if snr <= 0:
        raise ValueError("snr must be positive")
    if math.isinf(snr):
        return 0.0
    return 1.0 / math.sqrt(2 * m.N * snr)


def noiseless_channel(spec: ChannelSpec, S) -> np.ndarray:
    """H(S)[n] = sum_k alpha_k e(omega_k n) S[n - tau_k]."""
    S = np.asarray(S, dtype=complex)
    if len(S) != spec.modulus.N:
        raise ValueError(f"sequence length {len(S)} != N={spec.modulus.N}")
    m = spec.modulus
    out = np.zeros(m.N, dtype=complex)
    for t in spec.targets:
        # pi(tau, omega) carries e(-inv2 tau omega); undo it
        undo = root_of_unity(m, m.inv2 * t.delay * t.doppler)
        out += t.attenuation * undo * heisenberg_apply(t.point, S)
    return out


def complex_noise(m: Modulus, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Circularly-symmetric complex Gaussian noise, std ``sigma`` per component."""
    return sigma * (rng.standard_normal(m.N) + 1j * rng.standard_normal(m.N))


def apply_channel(spec: ChannelSpec, S, rng: np.random.Generator) -> np.ndarray:
    """R = H(S) + W."""
    R = noiseless_channel(spec, S)
    if spec.noise_sigma > 0:
        R = R + complex_noise(spec.modulus, spec.noise_sigma, rng)
    return R


def is_generic(support: Iterable[Sequence[int]], L: PlaneLine) -> bool:
    """True iff no difference of two distinct support points lies on L."""
    N = L.modulus.N
    pts = np.array(sorted(set(map(tuple, support))), dtype=np.int64).reshape(-1, 2)
    if len(pts) < 2:
        return True
    i, j = np.triu_indices(len(pts), k=1)
    d = (pts[i] - pts[j]) % N
    if L.is_infinite:
        on = d[:, 0] == 0
    else:
        on = (d[:, 1] - L.slope * d[:, 0]) % N == 0
    return not bool(on.any())


@dataclass(frozen=True)
class Perfectness:
    perfect: bool
    generic: bool
    incidence_points: frozenset = field(default_factory=frozenset)


def perfectness(support: Iterable[Sequence[int]], lines: Sequence[PlaneLine]) -> Perfectness:
    """Incidence points of full multiplicity d = len(lines) of ``{v_i + L_j}``.

    Non-generic supports are flagged (``generic=False``) and reported
    as not perfect.  With genericity each point lies on at most one shifted
    line per direction, so full-multiplicity points are the intersections of
    a first-direction and a second-direction line that also lie on one line
    of every remaining direction.
    """
    lines = list(lines)
    if len(lines) < 2 or len(set(lines)) != len(lines):
        raise ValueError("need at least two distinct lines")
    m = lines[0].modulus
    pts = [m.point(*p) for p in support]
    if len(set(pts)) != len(pts):
        raise ValueError("support points must be distinct")
    generic = all(is_generic(pts, L) for L in lines)
    if not generic:
        return Perfectness(False, False)
    fams = [[ShiftedLine(L, v) for v in pts] for L in lines]
    found = set()
    for A in fams[0]:
        for B in fams[1]:
            x = intersect(A, B)
            if all(any(S.contains(x) for S in fam) for fam in fams[2:]):
                found.add(x)
    return Perfectness(found == set(pts), True, frozenset(found))


def is_perfect(support: Iterable[Sequence[int]], lines: Sequence[PlaneLine]) -> bool:
    return perfectness(support, lines).perfect


def random_scene(
    m: Modulus,
    r: int,
    attenuation_profile: Sequence[float],
    rng: np.random.Generator,
    noise_sigma: float = 0.0,
) -> ChannelSpec:
    """r distinct uniform delay-Doppler pairs with |alpha_k| from the profile and random phases."""
    mags = [float(a) for a in attenuation_profile]
    if r < 0 or r > m.N * m.N:
        raise ValueError(f"r must be in [0, N^2], got {r}")
    if len(mags) != r:
        raise ValueError(f"need {r} attenuation magnitudes, got {len(mags)}")
    if any(a <= 0 for a in mags):
        raise ValueError("attenuation magnitudes must be positive")
    if sum(a * a for a in mags) > 1 + _ENERGY_SLACK:
        raise ValueError("sum of squared magnitudes exceeds 1")
    cells: list[int] = []
    while len(cells) < r:
        # duplicates are resampled
        for c in rng.integers(0, m.N * m.N, size=r - len(cells)):
            if int(c) not in cells:
                cells.append(int(c))
    phases = rng.uniform(0.0, 2 * np.pi, size=r)
    targets = tuple(
        Target(c // m.N, c % m.N, complex(a * np.exp(1j * ph)))
        for c, a, ph in zip(cells, mags, phases)
    )
    return ChannelSpec(m, targets, noise_sigma)


def uniform_magnitudes(r: int, total_energy: float = 1.0) -> list[float]:
    """Equal magnitudes with sum of squares ``total_energy``."""
    return [math.sqrt(total_energy / r)] * r if r else []


def pair_genericity_probability_bound(N: int, r: int) -> float:
    return 1 - (r * r - r) / (2 * (N + 1))


def perfectness_probability_bound(N: int, r: int) -> float:
    return 1 - r * (r * r - r) / N
