"""Command-line interface.

Exit codes: 0 success, 2 detector returned no targets, 64 usage or input
error, 1 internal error or failed check.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import harness
from .channel import ChannelSpec, apply_channel, random_scene, uniform_magnitudes
from .detect import (
    Method,
    Thresholds,
    combined_chirp,
    detect_cross,
    detect_incidence,
    detect_pseudorandom,
    detect_single_transmission,
)
from .modarith import Modulus, PlaneLine, random_distinct_lines
from .sequences import (
    ChirpId,
    chirp,
    pseudorandom_sequence,
    read_sequence_csv,
    write_sequence_csv,
)

EXIT_OK, EXIT_FAIL, EXIT_EMPTY, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _prime(text: str) -> int:
    try:
        return Modulus(int(text)).N
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.replace(",", " ").split()]


def _parse_chirps(spec: str, m: Modulus, rng) -> list[ChirpId]:
    """``random:K`` or a comma list of ``slope:b`` with slope an integer or ``inf``."""
    if spec.startswith("random:"):
        k = int(spec.split(":", 1)[1])
        return [ChirpId(L, int(rng.integers(m.N))) for L in random_distinct_lines(m, k, rng)]
    out = []
    for item in spec.split(","):
        slope, _, b = item.partition(":")
        line = PlaneLine(m, None if slope.strip() == "inf" else int(slope))
        out.append(ChirpId(line, int(b or 0)))
    if len({c.line for c in out}) != len(out):
        raise UsageError("chirps must use distinct lines")
    return out


def _chirp_dict(c: ChirpId) -> dict:
    return {"slope": "inf" if c.line.is_infinite else c.line.slope, "b": c.b}


def _load_chirps(d: dict, m: Modulus) -> list[ChirpId]:
    return [ChirpId(PlaneLine(m, None if c["slope"] == "inf" else int(c["slope"])), int(c["b"]))
            for c in d["chirps"]]


def cmd_simulate(args) -> int:
    rng = np.random.default_rng(args.seed)
    if args.scene:
        try:
            scene = ChannelSpec.from_json(Path(args.scene).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read scene: {exc}") from exc
        if args.sigma is not None:
            scene = ChannelSpec(scene.modulus, scene.targets, args.sigma)
    else:
        vals = args.random
        if len(vals) < 2:
            raise UsageError("--random needs N r [magnitudes...]")
        try:
            N, r = int(vals[0]), int(vals[1])
        except ValueError:
            raise UsageError("--random needs integer N and r") from None
        m = Modulus(N)
        mags = [float(x) for x in vals[2:]] or uniform_magnitudes(r)
        scene = random_scene(m, r, mags, rng, args.sigma or 0.0)
    m = scene.modulus
    ids = _parse_chirps(args.chirps, m, rng)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "scene.json").write_text(scene.to_json() + "\n")
    (out / "chirps.json").write_text(
        json.dumps({"N": m.N, "chirps": [_chirp_dict(c) for c in ids]}, indent=2) + "\n"
    )
    for k, c in enumerate(ids):
        s = chirp(c)
        write_sequence_csv(out / f"chirp_{k}.csv", s)
        write_sequence_csv(out / f"echo_{k}.csv", apply_channel(scene, s, rng))
    phi = pseudorandom_sequence(m, rng)
    write_sequence_csv(out / "pr_sequence.csv", phi)
    write_sequence_csv(out / "echo_pr.csv", apply_channel(scene, phi, rng))
    for d in (2, 3):
        if len(ids) >= d:
            s = combined_chirp(ids[:d])
            write_sequence_csv(out / f"combined_{d}.csv", s)
            write_sequence_csv(out / f"echo_combined_{d}.csv", apply_channel(scene, s, rng))
    print(f"wrote scene with {scene.r} targets, {len(ids)} chirps to {out}")
    return EXIT_OK


def _read(path: Path):
    if not path.exists():
        raise UsageError(f"missing input {path}")
    return read_sequence_csv(path)


def cmd_detect(args) -> int:
    src = Path(args.input)
    try:
        scene = ChannelSpec.from_json((src / "scene.json").read_text())
        meta = json.loads((src / "chirps.json").read_text())
    except OSError as exc:
        raise UsageError(f"cannot read inputs: {exc}") from exc
    m = scene.modulus
    ids = _load_chirps(meta, m)
    snr = args.snr if args.snr is not None else scene.snr()
    th = Thresholds(args.T, args.T1, args.T2)
    method = args.method
    need = {"incidence": 3, "incidence1": 3, "cross": 2, "cross1": 2}.get(method, 0)
    if len(ids) < need:
        raise UsageError(f"method {method} needs {need} chirps/echoes, found {len(ids)}")
    if method == "pr":
        rep = detect_pseudorandom(_read(src / "pr_sequence.csv"), _read(src / "echo_pr.csv"),
                                  args.r_max, args.threshold)
    elif method in ("incidence", "cross"):
        echoes = [_read(src / f"echo_{k}.csv") for k in range(need)]
        fn = detect_incidence if method == "incidence" else detect_cross
        rep = fn(ids[:need], echoes, th, snr)
    else:
        echo = _read(src / f"echo_combined_{need}.csv")
        kind = Method.INCIDENCE if need == 3 else Method.CROSS
        rep = detect_single_transmission(ids[:need], echo, kind, th, snr, sparsity=args.sparsity)
    text = rep.to_json()
    if args.out:
        Path(args.out).write_text(text + "\n")
    for p, v in rep.estimates:
        print(f"{p.tau}\t{p.omega}\t{abs(v):.6g}")
    return EXIT_OK if rep.estimates else EXIT_EMPTY


REPRODUCE_CHECKS = {
    "PRM_FIG3": lambda i: min(i["target_magnitudes"]["50,150"], i["target_magnitudes"]["100,100"]) >= 0.6,
    "FLAGLIKE_FIG6": lambda i: i["support_on_L1"],
    "CHIRP_L_FIG8": lambda i: len(i["profile_peaks"]) == 2,
    "CHIRP_M_FIG9": lambda i: len(i["profile_peaks"]) == 2,
    "CHIRP_N_FIG10_INPUTS": lambda i: i["incidence_estimates"] == i["support"],
}


def cmd_reproduce(args) -> int:
    info = harness.reproduce_figure(args.figure, args.out, seed=args.seed)
    print(json.dumps(info, indent=2, default=list))
    return EXIT_OK if REPRODUCE_CHECKS[args.figure](info) else EXIT_FAIL


def cmd_verify_bounds(args) -> int:
    rep = harness.verify_probability_bounds(
        Modulus(args.N), args.r, args.trials, np.random.default_rng(args.seed)
    )
    print(json.dumps(rep, indent=2))
    return EXIT_OK if rep["pass_generic"] and rep["pass_perfect"] else EXIT_FAIL


def cmd_bench(args) -> int:
    rows = harness.benchmark_scaling(args.primes, args.r, args.method, reps=args.reps,
                                     seed=args.seed)
    if args.out:
        harness.write_bench_csv(rows, args.out)
    ok, growth = harness.check_scaling(rows, args.method)
    for N, t in rows:
        print(f"{N}\t{t * 1e3:.4f} ms")
    print("growth per step: " + ", ".join(f"{g:.2f}" for g in growth))
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_measure_pr(args) -> int:
    stats = harness.measure_pr_statistics(Modulus(args.N), args.seeds, args.seed)
    print(f"N={stats['N']} seeds={stats['seeds']}")
    for key in ("min", "median", "mean", "max", "frac_below_4"):
        print(f"{key:>13}  {stats[key]:.4f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="chirpradar", description="Delay-Doppler detection with chirp sequences.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="write chirps, echoes and the scene to a directory")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--scene", help="scene JSON file")
    src.add_argument("--random", nargs="+", metavar="ARG",
                     help="N r [magnitude ...]: random scene (equal magnitudes by default)")
    s.add_argument("--sigma", type=float, default=None,
                   help="noise std per real/imag component (overrides the scene file)")
    s.add_argument("--chirps", default="random:3",
                   help="'random:K' or comma list of slope:b, slope an integer or 'inf'")
    s.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_simulate)

    d = sub.add_parser("detect", help="run a detector on a simulate output directory")
    d.add_argument("--method", required=True,
                   choices=["pr", "incidence", "cross", "cross1", "incidence1"],
                   help="cross1/incidence1 use the single combined transmission")
    d.add_argument("--in", dest="input", required=True, help="directory written by simulate")
    d.add_argument("--T", type=float, default=2.0, help="incidence peak factor")
    d.add_argument("--T1", type=float, default=2.0, help="cross peak factor")
    d.add_argument("--T2", type=float, default=3.0, help="cross hypothesis factor")
    d.add_argument("--snr", type=float, default=None,
                   help="linear SNR (default: from the scene's noise_sigma)")
    d.add_argument("--threshold", type=float, default=0.2,
                   help="absolute peak threshold of the pr baseline")
    d.add_argument("--r-max", type=int, default=4, help="max estimates of the pr baseline")
    d.add_argument("--sparsity", type=int, default=4,
                   help="expected target count for single-transmission allowances")
    d.add_argument("--out", help="report JSON path")
    d.set_defaults(func=cmd_detect)

    r = sub.add_parser("reproduce", help="write CSV + SVG for a figure scene")
    r.add_argument("--figure", required=True, choices=[f.value for f in harness.Figure])
    r.add_argument("--out", default=".", help="output directory")
    r.add_argument("--seed", type=int, default=0)
    r.set_defaults(func=cmd_reproduce)

    v = sub.add_parser("verify-bounds", help="Monte Carlo genericity / perfectness bounds")
    v.add_argument("--N", type=_prime, required=True)
    v.add_argument("--r", type=int, required=True)
    v.add_argument("--trials", type=int, default=2000)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify_bounds)

    b = sub.add_parser("bench", help="runtime scaling over primes")
    b.add_argument("--primes", type=_int_list, default=[499, 997, 1999, 4001],
                   help="comma-separated ascending primes")
    b.add_argument("--r", type=int, default=4)
    b.add_argument("--method", choices=["pr", "incidence", "cross"], default="cross")
    b.add_argument("--reps", type=int, default=5)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", help="CSV output path")
    b.set_defaults(func=cmd_bench)

    mp = sub.add_parser("measure-pr", help="distribution of the pseudo-randomness constant B")
    mp.add_argument("--N", type=_prime, required=True)
    mp.add_argument("--seeds", type=int, default=100)
    mp.add_argument("--seed", type=int, default=0)
    mp.set_defaults(func=cmd_measure_pr)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError, KeyError) as exc:
        print(f"chirpradar: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"chirpradar: internal error: {exc!r}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
