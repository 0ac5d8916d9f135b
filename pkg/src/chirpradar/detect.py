"""Delay-Doppler detectors: the pseudo-random baseline, the incidence method and the cross method."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .ambiguity import ambiguity_full, ambiguity_on_line, heisenberg_apply, modulus_of
from .modarith import Modulus, PlaneLine, PlanePoint, ShiftedLine, symplectic
from .sequences import Character, ChirpId, chirp, root_of_unity

# Absolute floors applied on top of the noise-scaled thresholds. Without them a
# noiseless run (SNR = inf, threshold 0) would accept FFT roundoff as peaks.
MIN_PEAK = 1e-6
MIN_HYPOTHESIS = 1e-8

# ln ln N is clamped from below so thresholds stay positive for tiny N.
LOGLOG_FLOOR = 0.25


class Method(str, Enum):
    PSEUDO_RANDOM = "pseudo_random"
    INCIDENCE = "incidence"
    CROSS = "cross"


@dataclass(frozen=True)
class Thresholds:
    """Multipliers of the noise floor: T (incidence peaks), T1 (cross peaks), T2 (hypothesis test)."""

    T: float = 2.0
    T1: float = 2.0
    T2: float = 3.0

    def __post_init__(self):
        for name in ("T", "T1", "T2"):
            v = getattr(self, name)
            if not v > 0:
                raise ValueError(f"threshold {name} must be > 0, got {v}")

    def scaled(self, c: float) -> Thresholds:
        return Thresholds(self.T * c, self.T1 * c, self.T2 * c)


@dataclass
class PeakSet:
    line: ShiftedLine
    peaks: list[tuple[PlanePoint, complex]]

    @property
    def points(self) -> list[PlanePoint]:
        return [p for p, _ in self.peaks]


@dataclass
class DetectionReport:
    method: Method
    estimates: list[tuple[PlanePoint, complex]]
    lines_used: list[PlaneLine] = field(default_factory=list)
    thresholds: Thresholds | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def points(self) -> set[PlanePoint]:
        return {p for p, _ in self.estimates}

    def to_dict(self) -> dict:
        def line_repr(L):
            return "inf" if L.is_infinite else L.slope

        return {
            "method": self.method.value,
            "lines": [line_repr(L) for L in self.lines_used],
            "thresholds": asdict(self.thresholds) if self.thresholds else None,
            "estimates": [
                {"tau": p.tau, "omega": p.omega, "value_re": v.real, "value_im": v.imag}
                for p, v in self.estimates
            ],
            "diagnostics": {k: _jsonable(v) for k, v in self.diagnostics.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def _sorted_estimates(est: dict) -> list[tuple[PlanePoint, complex]]:
    return sorted(est.items(), key=lambda kv: (-abs(kv[1]), kv[0]))


def noise_floor(m: Modulus, snr: float) -> float:
    """sqrt(2 ln ln N) / sqrt(N * snr); the noise level of an ambiguity entry."""
    if m.N < 3:
        raise ValueError("N must be at least 3")
    if not snr > 0:
        raise ValueError(f"snr must be positive, got {snr}")
    if math.isinf(snr):
        return 0.0
    loglog = max(math.log(math.log(m.N)), LOGLOG_FLOOR)
    return math.sqrt(2 * loglog) / math.sqrt(m.N * snr)


def peaks_on_line(profile, threshold: float) -> PeakSet:
    """Every point of the profile with |value| strictly above ``threshold``."""
    idx = np.flatnonzero(np.abs(profile.values) > threshold)
    L = profile.line
    return PeakSet(L, [(L.point(int(k)), complex(profile.values[k])) for k in idx])


def detect_pseudorandom(phi, R, r_max: int, threshold: float) -> DetectionReport:
    """Up to ``r_max`` largest entries of A(phi, R) above ``threshold``; O(N^2 log N)."""
    A = ambiguity_full(phi, R)
    mag = np.abs(A)
    cand = np.argwhere(mag > threshold)
    order = sorted(range(len(cand)), key=lambda i: (-mag[tuple(cand[i])], tuple(cand[i])))
    est = []
    for i in order[: max(r_max, 0)]:
        t, w = (int(x) for x in cand[i])
        est.append((PlanePoint(t, w), complex(A[t, w])))
    return DetectionReport(
        Method.PSEUDO_RANDOM,
        est,
        diagnostics={"candidates": int(len(cand)), "threshold": float(threshold)},
    )


def hypothesis(val_L, val_M, l, m, psi_L: Character, psi_M: Character) -> complex:
    """h(l, m) = A_L[m] psi_L(l) - A_M[l] e(Omega[l, m]) psi_M(m).

    ``val_L`` is A(C_L, R_L) at m, ``val_M`` is A(C_M, R_M) at l.  Vanishes
    at true pairs in the noiseless generic case.
    """
    mod = psi_L.line.modulus
    twist = root_of_unity(mod, symplectic(mod, l, m))
    return val_L * psi_L(l) - val_M * twist * psi_M(m)


def _require_distinct(ids: Sequence[ChirpId], count: int):
    if len(ids) != count:
        raise ValueError(f"expected {count} chirps, got {len(ids)}")
    lines = [c.line for c in ids]
    if len(set(lines)) != len(lines):
        raise ValueError("chirps must sit on pairwise distinct lines")
    if len({c.modulus for c in ids}) != 1:
        raise ValueError("chirps over different moduli")


def _restrict(cid: ChirpId, echo, onto: PlaneLine, threshold: float) -> PeakSet:
    c = chirp(cid)
    if modulus_of(echo) != cid.modulus:
        raise ValueError(f"echo length {len(echo)} does not match N={cid.modulus.N}")
    return peaks_on_line(ambiguity_on_line(c, echo, ShiftedLine(onto)), threshold)


def _incidence(chirps, echoes, peak_thr):
    m = chirps[0].modulus
    L, M, Mo = (c.line for c in chirps)
    pl = _restrict(chirps[1], echoes[1], L, peak_thr)   # A(C_M, R_M) on L
    pm = _restrict(chirps[0], echoes[0], M, peak_thr)   # A(C_L, R_L) on M
    po = _restrict(chirps[2], echoes[2], L, peak_thr)   # A(C_Mo, R_Mo) on L
    est = {}
    for l in pl.points:
        for mj, mu in pm.peaks:
            v = m.add(l, mj)
            if any(Mo.contains(m.sub(v, lo)) for lo in po.points):
                est[v] = mu
    diag = {"r1": len(pl.peaks), "r2": len(pm.peaks), "r3": len(po.peaks)}
    return _sorted_estimates(est), diag


def _cross(chirps, echoes, peak_thr, h_thr):
    m = chirps[0].modulus
    L, M = chirps[0].line, chirps[1].line
    psi_L, psi_M = chirps[0].character, chirps[1].character
    pl = _restrict(chirps[1], echoes[1], L, peak_thr)   # lambda_i = A(C_M, R_M)[l_i]
    pm = _restrict(chirps[0], echoes[0], M, peak_thr)   # mu_j = A(C_L, R_L)[m_j]
    est = {}
    hvals = []
    for l, lam in pl.peaks:
        for mj, mu in pm.peaks:
            h = abs(hypothesis(mu, lam, l, mj, psi_L, psi_M))
            if h <= h_thr:
                est[m.add(l, mj)] = mu
                hvals.append(h)
    diag = {"r1": len(pl.peaks), "r2": len(pm.peaks), "accepted_h": hvals}
    return _sorted_estimates(est), diag


def detect_incidence(
    chirps: Sequence[ChirpId],
    echoes: Sequence,
    thresholds: Thresholds = Thresholds(),
    snr: float = math.inf,
    min_peak: float = MIN_PEAK,
) -> DetectionReport:
    """Incidence method with chirps on lines (L, M, Mo) and their echoes, O(N log N + r^3).

    Candidates l_i + m_j from the L- and M-restrictions are kept when they lie
    on one of the shifted lines Mo + lo_k found from the third chirp.
    """
    _require_distinct(chirps, 3)
    if len(echoes) != 3:
        raise ValueError(f"incidence needs 3 echoes, got {len(echoes)}")
    floor = noise_floor(chirps[0].modulus, snr)
    thr = max(thresholds.T * floor, min_peak)
    est, diag = _incidence(chirps, echoes, thr)
    diag.update(floor=floor, peak_threshold=thr)
    return DetectionReport(Method.INCIDENCE, est, [c.line for c in chirps], thresholds, diag)


def detect_cross(
    chirps: Sequence[ChirpId],
    echoes: Sequence,
    thresholds: Thresholds = Thresholds(),
    snr: float = math.inf,
    min_peak: float = MIN_PEAK,
    min_hypothesis: float = MIN_HYPOTHESIS,
) -> DetectionReport:
    """Cross method with chirps on lines (L, M) and their echoes, O(N log N + r^2).

    The character of each chirp is taken from its ``b`` parameter.
    """
    _require_distinct(chirps, 2)
    if len(echoes) != 2:
        raise ValueError(f"cross needs 2 echoes, got {len(echoes)}")
    floor = noise_floor(chirps[0].modulus, snr)
    peak_thr = max(thresholds.T1 * floor, min_peak)
    h_thr = max(thresholds.T2 * floor, min_hypothesis)
    est, diag = _cross(chirps, echoes, peak_thr, h_thr)
    diag.update(floor=floor, peak_threshold=peak_thr, hypothesis_threshold=h_thr)
    return DetectionReport(Method.CROSS, est, [c.line for c in chirps], thresholds, diag)


def combined_chirp(ids: Sequence[ChirpId]) -> np.ndarray:
    """(C_1 + ... + C_d) / sqrt(d) for chirps on distinct lines; the norm is only close to 1."""
    if len(ids) not in (2, 3):
        raise ValueError("combine 2 or 3 chirps")
    _require_distinct(ids, len(ids))
    return sum(chirp(c) for c in ids) / math.sqrt(len(ids))


def cross_term_allowance(m: Modulus, d: int, sparsity: int) -> float:
    """Bound on the interference from the other d-1 chirps in a combined transmission.

    Each |A(C_K, pi(v) C_K')| is 1/sqrt(N) and sum |alpha_k| <= sqrt(r).
    """
    return (d - 1) / math.sqrt(d) * math.sqrt(sparsity / m.N)


def refit_attenuations(S, R, points) -> np.ndarray:
    """Least-squares attenuations of ``R ~ sum_k alpha_k H_k(S)`` over candidate shifts."""
    S = np.asarray(S, dtype=complex)
    m = modulus_of(S)
    if not points:
        return np.zeros(0, dtype=complex)
    cols = [root_of_unity(m, m.inv2 * p[0] * p[1]) * heisenberg_apply(p, S) for p in points]
    alpha, *_ = np.linalg.lstsq(np.stack(cols, axis=1), np.asarray(R, dtype=complex), rcond=None)
    return alpha


def detect_single_transmission(
    ids: Sequence[ChirpId],
    echo,
    method: Method | str,
    thresholds: Thresholds = Thresholds(),
    snr: float = math.inf,
    sparsity: int = 4,
    min_peak: float = MIN_PEAK,
    min_hypothesis: float = MIN_HYPOTHESIS,
    refine: bool = True,
) -> DetectionReport:
    """Incidence or cross detection from the echo of one combined chirp.

    ``echo`` must come from :func:`combined_chirp` of ``ids``.  Peaks shrink
    by 1/sqrt(d), so thresholds gain the cross-term allowance for an
    expected sparsity ``sparsity`` on top of the usual noise thresholds.

    The cross terms also perturb the matching test enough that false pairs
    slip through.  With ``refine`` the candidates are refitted by least
    squares against the combined waveform and those whose attenuation does
    not clear the peak threshold are dropped; values are then the refitted
    attenuations.  Without it values are rescaled by sqrt(d).
    """
    method = Method(method)
    d = len(ids)
    m = ids[0].modulus
    floor = noise_floor(m, snr)
    allow = cross_term_allowance(m, d, sparsity)
    echoes = [echo] * d
    if method is Method.INCIDENCE:
        _require_distinct(ids, 3)
        base = max(thresholds.T * floor, min_peak)
        thr = base + allow
        est, diag = _incidence(ids, echoes, thr)
        diag.update(peak_threshold=thr)
    elif method is Method.CROSS:
        _require_distinct(ids, 2)
        base = max(thresholds.T1 * floor, min_peak)
        thr = base + allow
        h_thr = max(thresholds.T2 * floor, min_hypothesis) + 2 * allow
        est, diag = _cross(ids, echoes, thr, h_thr)
        diag.update(peak_threshold=thr, hypothesis_threshold=h_thr)
    else:
        raise ValueError(f"single transmission supports incidence and cross, not {method}")
    diag.update(floor=floor, allowance=allow, single_transmission=True)
    if refine:
        pts = [p for p, _ in est]
        alpha = refit_attenuations(combined_chirp(ids), echo, pts)
        diag.update(candidates=len(pts), refit_threshold=base)
        est = _sorted_estimates({p: complex(a) for p, a in zip(pts, alpha) if abs(a) > base})
    else:
        # undo the 1/sqrt(d) split so values estimate the attenuations
        est = [(p, v * math.sqrt(d)) for p, v in est]
    return DetectionReport(method, est, [c.line for c in ids], thresholds, diag)
