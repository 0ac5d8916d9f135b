"""Monte Carlo experiments, probability-bound checks, figure reproduction and scaling benchmarks."""

from __future__ import annotations

import csv
import json
import math
import statistics
import time
import timeit
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

from .ambiguity import ambiguity_full, ambiguity_on_line
from .channel import (
    ChannelSpec,
    Target,
    apply_channel,
    is_generic,
    noiseless_channel,
    pair_genericity_probability_bound,
    perfectness,
    perfectness_probability_bound,
    random_scene,
    uniform_magnitudes,
)
from .detect import (
    Method,
    Thresholds,
    combined_chirp,
    detect_cross,
    detect_incidence,
    detect_pseudorandom,
    detect_single_transmission,
)
from .heatmap import render_svg, write_heatmap_csv
from .modarith import Modulus, PlaneLine, PlanePoint, ShiftedLine, random_distinct_lines
from .sequences import (
    ChirpId,
    chirp,
    measure_pseudorandomness,
    pseudorandom_sequence,
    write_sequence_csv,
)

METHODS = ("pr", "incidence", "cross", "incidence1", "cross1")
METRICS_COLUMNS = (
    "trial", "method", "N", "r", "sigma", "detected", "tp", "fp", "miss", "generic", "perfect", "ms"
)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream per (base seed, trial index)."""
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte Carlo experiment.

    ``scene`` pins the targets for every trial; otherwise each trial draws
    ``r`` random targets with ``magnitudes`` (equal split of unit energy by
    default).  ``pr_threshold`` is the absolute peak threshold of the
    pseudo-random baseline.
    """

    N: int
    method: str
    trials: int = 100
    r: int = 1
    magnitudes: tuple[float, ...] | None = None
    noise_sigma: float = 0.0
    thresholds: Thresholds = Thresholds()
    seed: int = 0
    scene: ChannelSpec | None = None
    pr_threshold: float = 0.2
    sparsity: int = 4

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {METHODS}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.scene is not None:
            if self.scene.modulus.N != self.N:
                raise ValueError("scene modulus does not match N")
            object.__setattr__(self, "r", self.scene.r)
            object.__setattr__(self, "noise_sigma", self.scene.noise_sigma)
            object.__setattr__(self, "magnitudes", tuple(abs(t.attenuation) for t in self.scene.targets))
        mags = self.magnitudes
        if mags is None:
            mags = tuple(uniform_magnitudes(self.r))
        mags = tuple(float(a) for a in mags)
        if len(mags) != self.r:
            raise ValueError(f"need {self.r} magnitudes, got {len(mags)}")
        if sum(a * a for a in mags) > 1 + 1e-9:
            raise ValueError("sum of squared magnitudes exceeds 1")
        object.__setattr__(self, "magnitudes", mags)
        Modulus(self.N)

    @property
    def modulus(self) -> Modulus:
        return Modulus(self.N)


@dataclass
class MetricsRow:
    trial: int
    method: str
    N: int
    r: int
    sigma: float
    detected: int
    tp: int
    fp: int
    miss: int
    generic: bool | None
    perfect: bool | None
    ms: float

    def csv_row(self, timing: bool = True) -> list:
        def flag(x):
            return "" if x is None else int(x)

        row = [self.trial, self.method, self.N, self.r, repr(float(self.sigma)), self.detected,
               self.tp, self.fp, self.miss, flag(self.generic), flag(self.perfect)]
        row.append(f"{self.ms:.3f}" if timing else "")
        return row


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: list[MetricsRow]
    summary: dict = field(default_factory=dict)


def _random_chirps(m: Modulus, count: int, rng) -> list[ChirpId]:
    lines = random_distinct_lines(m, count, rng)
    return [ChirpId(L, int(rng.integers(m.N))) for L in lines]


def run_trial(cfg: ExperimentConfig, trial: int) -> MetricsRow:
    m = cfg.modulus
    rng = trial_rng(cfg.seed, trial)
    scene = cfg.scene or random_scene(m, cfg.r, cfg.magnitudes, rng, cfg.noise_sigma)
    snr = scene.snr()
    lines: list[PlaneLine] = []
    if cfg.method == "pr":
        phi = pseudorandom_sequence(m, rng)
        R = apply_channel(scene, phi, rng)
        t0 = time.perf_counter()
        rep = detect_pseudorandom(phi, R, scene.r, cfg.pr_threshold)
    else:
        d = 3 if cfg.method.startswith("incidence") else 2
        ids = _random_chirps(m, d, rng)
        lines = [c.line for c in ids]
        if cfg.method.endswith("1"):
            R = apply_channel(scene, combined_chirp(ids), rng)
            method = Method.INCIDENCE if d == 3 else Method.CROSS
            t0 = time.perf_counter()
            rep = detect_single_transmission(
                ids, R, method, cfg.thresholds, snr, sparsity=cfg.sparsity
            )
        else:
            echoes = [apply_channel(scene, chirp(c), rng) for c in ids]
            t0 = time.perf_counter()
            if d == 3:
                rep = detect_incidence(ids, echoes, cfg.thresholds, snr)
            else:
                rep = detect_cross(ids, echoes, cfg.thresholds, snr)
    ms = 1000 * (time.perf_counter() - t0)
    support = set(scene.support)
    found = rep.points
    tp = len(found & support)
    generic = all(is_generic(support, L) for L in lines) if lines else None
    perfect = None
    if len(lines) == 3:
        perfect = perfectness(support, lines).perfect if scene.r else True
    return MetricsRow(trial, cfg.method, m.N, scene.r, scene.noise_sigma, len(found), tp,
                      len(found - support), scene.r - tp, generic, perfect, ms)


def summarize(rows: Sequence[MetricsRow]) -> dict:
    def frac(r):
        return r.tp / r.r if r.r else 1.0

    n = len(rows)
    exact = [r.fp == 0 and r.miss == 0 for r in rows]
    out = {
        "trials": n,
        "detection_rate": sum(frac(r) for r in rows) / n,
        "false_alarm_rate": sum(r.fp > 0 for r in rows) / n,
        "mean_false_positives": sum(r.fp for r in rows) / n,
        "exact_recovery_rate": sum(exact) / n,
        "mean_ms": sum(r.ms for r in rows) / n,
    }
    good = [i for i, r in enumerate(rows) if r.generic is not False and r.perfect is not False]
    if rows and rows[0].generic is not None:
        out["generic_rate"] = sum(bool(r.generic) for r in rows) / n
        out["favourable_trials"] = len(good)
        out["exact_recovery_rate_favourable"] = (
            sum(exact[i] for i in good) / len(good) if good else None
        )
    return out


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run ``cfg.trials`` independent trials; deterministic given ``cfg.seed``."""
    rows = sorted((run_trial(cfg, t) for t in range(cfg.trials)), key=lambda r: r.trial)
    return ExperimentResult(cfg, rows, summarize(rows))


def write_metrics_csv(rows: Sequence[MetricsRow], path, timing: bool = True) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(METRICS_COLUMNS)
        for r in rows:
            w.writerow(r.csv_row(timing))


def write_summary_json(result: ExperimentResult, path, timing: bool = True) -> None:
    cfg = result.config
    summary = dict(result.summary)
    if not timing:
        summary.pop("mean_ms", None)
    doc = {
        "config": {
            "N": cfg.N, "method": cfg.method, "trials": cfg.trials, "r": cfg.r,
            "magnitudes": list(cfg.magnitudes), "noise_sigma": cfg.noise_sigma,
            "thresholds": asdict(cfg.thresholds), "seed": cfg.seed,
            "pr_threshold": cfg.pr_threshold, "sparsity": cfg.sparsity,
            "scene": cfg.scene.to_dict() if cfg.scene else None,
        },
        "summary": summary,
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


# -- probability bounds ---------------------------------------------------------

def _random_support(m: Modulus, r: int, rng) -> list[PlanePoint]:
    cells = rng.choice(m.N * m.N, size=r, replace=False)
    return [PlanePoint(int(c) // m.N, int(c) % m.N) for c in cells]


def _rate(hits: int, n: int) -> tuple[float, float]:
    if n == 0:
        return math.nan, math.nan
    p = hits / n
    return p, math.sqrt(p * (1 - p) / n)


def verify_probability_bounds(m: Modulus, r: int, trials: int, rng, perfect: bool = True) -> dict:
    """Monte Carlo check of the genericity and perfectness lower bounds.

    Genericity: random r-subset against one uniformly random line.
    Perfectness: random r-subset and three random distinct lines, conditioned
    on genericity with respect to all three.  A bound passes when the
    empirical rate is at least ``bound - 3 SE``.
    """
    generic_hits = 0
    cond_n = cond_hits = 0
    for _ in range(trials):
        X = _random_support(m, r, rng)
        L = random_distinct_lines(m, 1, rng)[0]
        generic_hits += is_generic(X, L)
        if perfect:
            X = _random_support(m, r, rng)
            lines = random_distinct_lines(m, 3, rng)
            res = perfectness(X, lines)
            if res.generic:
                cond_n += 1
                cond_hits += res.perfect
    pg, seg = _rate(generic_hits, trials)
    bound_g = pair_genericity_probability_bound(m.N, r)
    report = {
        "N": m.N, "r": r, "trials": trials,
        "p_generic": pg, "se_generic": seg, "bound_generic": bound_g,
        "pass_generic": pg >= bound_g - 3 * seg,
    }
    if perfect:
        pp, sep = _rate(cond_hits, cond_n)
        bound_p = perfectness_probability_bound(m.N, r)
        report.update(
            generic_trials=cond_n, p_perfect=pp, se_perfect=sep, bound_perfect=bound_p,
            pass_perfect=bool(cond_n) and pp >= bound_p - 3 * sep,
        )
    return report


# -- figures --------------------------------------------------------------------

class Figure(str, Enum):
    PRM_FIG3 = "PRM_FIG3"
    FLAGLIKE_FIG6 = "FLAGLIKE_FIG6"
    CHIRP_L_FIG8 = "CHIRP_L_FIG8"
    CHIRP_M_FIG9 = "CHIRP_M_FIG9"
    CHIRP_N_FIG10_INPUTS = "CHIRP_N_FIG10_INPUTS"


def figure3_scene() -> ChannelSpec:
    m = Modulus(199)
    return ChannelSpec(m, (Target(50, 150, 0.7), Target(100, 100, 0.7), Target(150, 50, 0.1)))


# l_1 = (40, 0), l_2 = (130, 0) on L_0; m_1 = (0, 60), m_2 = (0, 160) on L_inf
INCIDENCE_L = (PlanePoint(40, 0), PlanePoint(130, 0))
INCIDENCE_M = (PlanePoint(0, 60), PlanePoint(0, 160))


def incidence_scene() -> ChannelSpec:
    """Two targets l_1 + m_2 and l_2 + m_1, magnitude 0.7 each."""
    m = Modulus(199)
    (l1, l2), (m1, m2) = INCIDENCE_L, INCIDENCE_M
    pts = [m.add(l1, m2), m.add(l2, m1)]
    return ChannelSpec(m, tuple(Target(p.tau, p.omega, 0.7) for p in pts))


def incidence_chirps() -> list[ChirpId]:
    """Chirps on L = {(t, 0)}, M = {(0, w)}, Mo = {(t, t)}."""
    m = Modulus(199)
    return [ChirpId(PlaneLine(m, 0), 0), ChirpId(PlaneLine(m, None), 0), ChirpId(PlaneLine(m, 1), 0)]


def _write_profile_csv(path, profile) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["tau", "omega", "re", "im", "abs"])
        for p, v in zip(profile.points(), profile.values):
            w.writerow([p.tau, p.omega, repr(float(v.real)), repr(float(v.imag)), repr(float(abs(v)))])


def reproduce_figure(name: Figure | str, out_dir, seed: int = 0) -> dict:
    """Write the heatmap CSV and SVG for one figure; returns paths and key values."""
    name = Figure(name)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = name.value.lower()
    info: dict = {"figure": name.value}
    column = "abs"
    if name is Figure.PRM_FIG3:
        scene = figure3_scene()
        phi = pseudorandom_sequence(scene.modulus, np.random.default_rng(seed))
        A = ambiguity_full(phi, noiseless_channel(scene, phi))
        info["target_magnitudes"] = {f"{t.delay},{t.doppler}": float(abs(A[t.delay, t.doppler]))
                                     for t in scene.targets}
        off = np.abs(A).copy()
        for t in scene.targets:
            off[t.delay, t.doppler] = 0
        info["max_off_target"] = float(off.max())
    elif name is Figure.FLAGLIKE_FIG6:
        m = Modulus(199)
        c = chirp(ChirpId(PlaneLine(m, 1), 1))
        A = ambiguity_full(c, c)
        column = "re"
        support = np.argwhere(np.abs(A) > 1e-10)
        info["support_on_L1"] = bool(np.all((support[:, 1] - support[:, 0]) % m.N == 0))
        info["support_size"] = int(len(support))
    else:
        scene = incidence_scene()
        ids = incidence_chirps()
        k = {Figure.CHIRP_L_FIG8: 0, Figure.CHIRP_M_FIG9: 1, Figure.CHIRP_N_FIG10_INPUTS: 2}[name]
        c = chirp(ids[k])
        echo = noiseless_channel(scene, c)
        A = ambiguity_full(c, echo)
        # restriction used by the algorithm: C_L on M, C_M and C_Mo on L
        onto = ids[1].line if k == 0 else ids[0].line
        prof = ambiguity_on_line(c, echo, ShiftedLine(onto))
        prof_path = out / f"{stem}_profile.csv"
        _write_profile_csv(prof_path, prof)
        info["profile_csv"] = str(prof_path)
        info["profile_peaks"] = [tuple(p) for p, v in zip(prof.points(), prof.values) if abs(v) > 1e-6]
        if name is Figure.CHIRP_N_FIG10_INPUTS:
            echoes = [noiseless_channel(scene, chirp(cid)) for cid in ids]
            rep = detect_incidence(ids, echoes)
            rep_path = out / f"{stem}_incidence.json"
            rep_path.write_text(rep.to_json() + "\n")
            info["incidence_estimates"] = sorted(tuple(p) for p in rep.points)
            info["support"] = sorted(tuple(p) for p in scene.support)
    csv_path = out / f"{stem}.csv"
    svg_path = out / f"{stem}.svg"
    write_heatmap_csv(csv_path, A)
    vals = A.real if column == "re" else np.abs(A)
    svg_path.write_text(render_svg(vals, title=name.value))
    info.update(csv=str(csv_path), svg=str(svg_path), column=column)
    return info


# -- benchmarks -----------------------------------------------------------------

def _bench_setup(N: int, r: int, method: str, seed: int):
    m = Modulus(N)
    rng = np.random.default_rng(np.random.SeedSequence([seed, N]))
    scene = random_scene(m, r, uniform_magnitudes(r), rng)
    if method == "pr":
        phi = pseudorandom_sequence(m, rng)
        R = noiseless_channel(scene, phi)
        return lambda: detect_pseudorandom(phi, R, r, 0.2)
    d = 3 if method == "incidence" else 2
    ids = _random_chirps(m, d, rng)
    echoes = [noiseless_channel(scene, chirp(c)) for c in ids]
    if method == "incidence":
        return lambda: detect_incidence(ids, echoes)
    if method == "cross":
        return lambda: detect_cross(ids, echoes)
    raise ValueError(f"cannot benchmark method {method!r}")


def _batch_size(timer: timeit.Timer, min_batch: float) -> int:
    number = 1
    while timer.timeit(number) < min_batch:
        number *= 2
    return number


def time_call(fn, reps: int = 5, min_batch: float = 0.1) -> float:
    """Median over ``reps`` of the per-call wall time, batching fast calls."""
    timer = timeit.Timer(fn, timer=time.perf_counter)
    number = _batch_size(timer, min_batch)
    return statistics.median(timer.repeat(repeat=reps, number=number)) / number


def benchmark_scaling(primes: Sequence[int], r: int, method: str, reps: int = 5,
                      seed: int = 0, min_batch: float = 0.1) -> list[tuple[int, float]]:
    """(N, median seconds per detector call) for each prime, ascending.

    Repetitions are interleaved across sizes (every prime is timed once per
    round) so slow drift of the machine does not masquerade as growth.
    """
    primes = list(primes)
    if primes != sorted(primes):
        raise ValueError("primes must be sorted ascending")
    timers = [timeit.Timer(_bench_setup(N, r, method, seed), timer=time.perf_counter)
              for N in primes]
    numbers = [_batch_size(t, min_batch) for t in timers]
    samples: list[list[float]] = [[] for _ in primes]
    for _ in range(reps):
        for i, (t, k) in enumerate(zip(timers, numbers)):
            samples[i].append(t.timeit(k) / k)
    return [(N, statistics.median(s)) for N, s in zip(primes, samples)]


def growth_factors(rows: Sequence[tuple[int, float]]) -> list[float]:
    return [t2 / t1 for (_, t1), (_, t2) in zip(rows, rows[1:])]


def check_scaling(rows: Sequence[tuple[int, float]], method: str) -> tuple[bool, list[float]]:
    """Quasi-linear detectors grow <= 2.4x per doubling; the baseline >= 3.4x on the last step."""
    g = growth_factors(rows)
    if not g:
        return True, g
    if method == "pr":
        return g[-1] >= 3.4, g
    return all(x <= 2.4 for x in g), g


def benchmark_sparsity(N: int, rs: Sequence[int], reps: int = 5, seed: int = 0) -> list[dict]:
    """Incidence vs cross per-call time across sparsity levels at fixed N."""
    out = []
    for r in rs:
        ti = time_call(_bench_setup(N, r, "incidence", seed), reps)
        tc = time_call(_bench_setup(N, r, "cross", seed), reps)
        out.append({"r": r, "incidence_s": ti, "cross_s": tc, "ratio": ti / tc})
    return out


def write_bench_csv(rows: Sequence[tuple[int, float]], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["N", "seconds"])
        for N, t in rows:
            w.writerow([N, f"{t:.6e}"])


def measure_pr_statistics(m: Modulus, seeds: int, base_seed: int = 0) -> dict:
    """Distribution of the measured pseudo-randomness constant B over random-phase sequences."""
    B = np.array([measure_pseudorandomness(pseudorandom_sequence(m, trial_rng(base_seed, s)))
                  for s in range(seeds)])
    return {
        "N": m.N, "seeds": seeds,
        "min": float(B.min()), "median": float(np.median(B)), "mean": float(B.mean()),
        "max": float(B.max()), "frac_below_4": float(np.mean(B < 4)),
        "values": [float(b) for b in B],
    }
