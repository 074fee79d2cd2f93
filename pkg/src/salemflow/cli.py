"""Configuration-driven command line: analyze, trace-orbit, equidist,
selberg-check, spectral, bounds, report.

Outputs are deterministic for a fixed (config, seed): JSON objects are
sorted, CSV floats are printed with 17 significant digits, high-precision
values with precision_bits/3 digits, and every artifact embeds the config
hash.  Exit codes partition the error classes: 2 invalid config,
3 non-primitive substitution, 4 bad eta/horizon, 5 quadrature failure,
6 window/tiling errors, 7 inconsistent case parameters.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import random
import sys
from pathlib import Path

import mpmath as mp

from . import bounds as bounds_mod
from . import flow as flow_mod
from . import orbit as orbit_mod
from . import trigpoly as trig_mod
from .intpoly import pretty
from .numberfield import NumberField, ReducedForm
from .substitution import (LengthCapError, NotPrimitiveError, Substitution,
                           build_matrix, classify_perron, perron_data)

EXIT_BAD_CONFIG = 2
EXIT_NOT_PRIMITIVE = 3
EXIT_BAD_ETA = 4
EXIT_QUADRATURE = 5
EXIT_WINDOW = 6
EXIT_BAD_CASE = 7


class ConfigError(ValueError):
    pass


def fmt(x) -> str:
    return format(float(x), ".17g")


def fmt_mp(x, precision_bits: int) -> str:
    return mp.nstr(mp.mpf(x), max(17, precision_bits // 3))


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def config_hash(cfg: dict, seed: int, precision: int) -> str:
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    digest = hashlib.sha256(
        f"{canon}|seed={seed}|precision={precision}".encode()).hexdigest()
    return digest[:16]


class Run:
    """Resolved configuration plus output plumbing shared by commands."""

    def __init__(self, args):
        self.cfg = load_config(args.config)
        self.precision = args.precision or self.cfg.get("precision_bits", 256)
        self.seed = args.seed if args.seed is not None else self.cfg.get(
            "seed", 0)
        if not isinstance(self.precision, int) or self.precision < 64:
            raise ConfigError("precision_bits must be an integer >= 64")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("seed must be a nonnegative integer")
        self.out = Path(args.out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.hash = config_hash(self.cfg, self.seed, self.precision)

    # config pieces ---------------------------------------------------------

    def substitution(self) -> Substitution:
        if "substitution" not in self.cfg:
            raise ConfigError("config lacks a 'substitution' object")
        try:
            return Substitution.from_config(self.cfg["substitution"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid substitution: {exc}") from exc

    def salem(self):
        sub = self.substitution()
        pd = perron_data(build_matrix(sub), self.precision)
        verdict = classify_perron(pd.min_poly, self.precision)
        if not verdict.is_salem:
            raise ConfigError(
                f"substitution is not of Salem type "
                f"(classified {verdict.classification})")
        return sub, pd, orbit_mod.SalemNumber(
            NumberField(pd.min_poly, self.precision))

    def etas(self, degree: int):
        raw = self.cfg.get("etas")
        if not raw:
            raise ConfigError("config lacks a nonempty 'etas' list")
        return [ReducedForm.from_text(text, degree) for text in raw]

    def intervals(self):
        raw = self.cfg.get("intervals")
        if not raw:
            raise ConfigError("config lacks a nonempty 'intervals' list")
        out = []
        for pair in raw:
            a, b = float(pair[0]), float(pair[1])
            if not 0 <= a <= b <= 1:
                raise ConfigError(f"bad interval {pair}")
            out.append((a, b))
        return out

    # output plumbing ---------------------------------------------------------

    def meta(self):
        return {"config_hash": self.hash, "precision_bits": self.precision,
                "seed": self.seed}

    def write_json(self, name: str, payload: dict) -> Path:
        path = self.out / name
        payload = dict(payload)
        payload["meta"] = self.meta()
        with open(path, "w") as fh:
            json.dump(payload, fh, sort_keys=True, indent=2)
            fh.write("\n")
        return path

    def write_csv(self, name: str, header, rows) -> Path:
        path = self.out / name
        with open(path, "w") as fh:
            fh.write(f"# config_hash={self.hash} precision_bits="
                     f"{self.precision} seed={self.seed}\n")
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(row) + "\n")
        return path


# -- commands ---------------------------------------------------------------------


def cmd_analyze(args) -> int:
    run = Run(args)
    sub = run.substitution()
    matrix = build_matrix(sub)
    pd = perron_data(matrix, run.precision)
    verdict = classify_perron(pd.min_poly, run.precision)
    field = NumberField(pd.min_poly, run.precision)
    length = sum(abs(c) for c in pd.min_poly)
    thetas = []
    if verdict.is_salem:
        salem = orbit_mod.SalemNumber(field)
        thetas = [fmt_mp(t, run.precision) for t in salem.thetas]
    run.write_json("analyze.json", {
        "matrix": [list(r) for r in matrix.entries],
        "char_poly_ascending": list(pd.char_poly),
        "char_poly": pretty(pd.char_poly),
        "min_poly_ascending": list(pd.min_poly),
        "min_poly": pretty(pd.min_poly),
        "alpha": fmt_mp(pd.alpha, run.precision),
        "conjugate_angles": thetas,
        "classification": verdict.classification,
        "unit_circle_count": verdict.unit_circle_count,
        "left_eigenvector": [fmt_mp(p, run.precision)
                             for p in pd.left_eigenvector],
        "length": length,
        "inv_length": f"1/{length}",
    })
    print(f"alpha = {mp.nstr(pd.alpha, 12)}  "
          f"classification = {verdict.classification}")
    return 0


def cmd_trace_orbit(args) -> int:
    run = Run(args)
    sub, pd, salem = run.salem()
    d = salem.degree
    try:
        etas = run.etas(d)
        horizon = run.cfg.get("horizon", 10 * d)
        if horizon < d:
            raise ValueError(f"horizon {horizon} below degree {d}")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_ETA
    summary = []
    for i, eta in enumerate(etas):
        orbit = orbit_mod.trace_orbit(salem.field, eta, horizon)
        fracs = orbit_mod.fractional_orbit_sequence(eta, salem, horizon)
        traces = list(orbit.integer_traces(horizon + 1))
        rows = [(str(n), str(traces[n]), str(orbit.residue(n)),
                 fmt_mp(fracs[n], run.precision))
                for n in range(horizon + 1)]
        run.write_csv(f"trace_orbit_{i}.csv",
                      ("n", "trace", "residue", "frac_orbit"), rows)
        summary.append({"eta": eta.text(), "period": orbit.period,
                        "residue_cycle": list(orbit.residues)})
    run.write_json("trace_orbit_summary.json", {"orbits": summary})
    for s in summary:
        print(f"eta {s['eta']}: period {s['period']}, "
              f"cycle {s['residue_cycle']}")
    return 0


def cmd_equidist(args) -> int:
    run = Run(args)
    sub, pd, salem = run.salem()
    try:
        etas = run.etas(salem.degree)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_ETA
    intervals = run.intervals()
    n_points = run.cfg.get("N", 100000)
    rows = []
    for eta in etas:
        for (a, b) in intervals:
            emp = orbit_mod.empirical_frequency(eta, salem, (a, b), n_points)
            tor = orbit_mod.torus_frequency(eta, salem, (a, b))
            rows.append((eta.text(), fmt(a), fmt(b), fmt(emp), fmt(tor),
                         fmt(abs(float(emp) - tor))))
    run.write_csv("equidist.csv",
                  ("eta", "a", "b", "empirical", "torus", "abs_diff"), rows)
    print(f"equidist: {len(rows)} rows -> equidist.csv")
    return 0


def cmd_selberg_check(args) -> int:
    run = Run(args)
    sc = run.cfg.get("selberg", {})
    num_random = sc.get("num_random", 20)
    max_degree = sc.get("max_degree", 64)
    grid = sc.get("grid", 10000)
    rng = random.Random(run.seed)
    cases = [tuple(case) for case in sc.get("cases", [])]
    for _ in range(num_random):
        a = rng.uniform(0, 0.9)
        b = rng.uniform(a + 0.01, min(1.0, a + 0.9))
        cases.append((a, b, rng.randint(1, max_degree)))
    import numpy as np
    zs = (np.arange(grid) + 0.5) / grid
    rows = []
    for (a, b, n) in cases:
        pair = trig_mod.selberg_pair(a, b, int(n), grid=grid)
        chi = pair.indicator(zs)
        gap_plus = float(np.min(pair.s_plus(zs) - chi))
        gap_minus = float(np.min(chi - pair.s_minus(zs)))
        rows.append((fmt(a), fmt(b), str(int(n)), fmt(gap_plus),
                     fmt(gap_minus), fmt(pair.s_plus.mean()),
                     fmt(pair.s_minus.mean())))
    run.write_csv("selberg.csv",
                  ("a", "b", "degree", "min_majorant_gap",
                   "min_minorant_gap", "integral_plus", "integral_minus"),
                  rows)
    if sc.get("dump_coeffs"):
        for i, (a, b, n) in enumerate(cases):
            pair = trig_mod.selberg_pair(a, b, int(n), grid=grid)
            crow = [(str(k), fmt(pair.s_plus.cos_coeffs[k]),
                     fmt(pair.s_plus.sin_coeffs[k]))
                    for k in range(pair.s_plus.degree + 1)]
            run.write_csv(f"selberg_coeffs_{i}.csv",
                          ("k", "cos_coeff", "sin_coeff"), crow)
    print(f"selberg-check: {len(cases)} cases -> selberg.csv")
    return 0


def _omega_tag(omega: float) -> str:
    return fmt(omega).replace(".", "p").replace("-", "m")


def cmd_spectral(args) -> int:
    run = Run(args)
    sub, pd, salem = run.salem()
    omegas = run.cfg.get("omegas")
    if not omegas:
        raise ConfigError("config lacks a nonempty 'omegas' list")
    r_grid = run.cfg.get("R_grid")
    if not r_grid or len(r_grid) < 2:
        raise ConfigError("config lacks an increasing 'R_grid'")
    num_samples = run.cfg.get("num_samples", 8)
    letter = run.cfg.get("letter", 1)
    fits = {}
    for omega in omegas:
        series = flow_mod.estimate_GR(
            sub, pd, letter, float(omega), r_grid, num_samples, run.seed,
            workers=args.workers)
        try:
            fit = flow_mod.holder_fit(series)
            slope = fit.slope
            fits[fmt(omega)] = {
                "slope": fmt(fit.slope), "intercept": fmt(fit.intercept),
                "gamma_tilde": fmt(fit.gamma_tilde),
                "measure_exponent": fmt(fit.measure_exponent),
                "constant": fmt(fit.constant),
                "residual": fmt(fit.residual), "n_points": fit.n_points,
            }
        except (ValueError, flow_mod.DegenerateFitError) as exc:
            slope = float("nan")
            fits[fmt(omega)] = {"error": str(exc)}
        rows = [(fmt(omega), fmt(R), fmt(G), fmt(slope))
                for R, G in zip(series.R_values, series.G_values)]
        run.write_csv(f"spectral_{_omega_tag(omega)}.csv",
                      ("omega", "R", "G_R", "slope_fit"), rows)
        if run.cfg.get("kappa") is not None:
            c1 = run.cfg.get("C1")
            lam = run.cfg.get("lambda")
            if c1 is not None and lam is None:
                raise ConfigError("a supplied C1 needs a lambda as well")
            report = flow_mod.product_bound_check(
                series, kappa=float(run.cfg.get("kappa", 1.0)),
                lam=lam, C1=c1, C2=float(run.cfg.get("C2", 0.0)),
                salem=salem, fit=c1 is None)
            fits[fmt(omega)]["product_bound"] = {
                "kappa": fmt(report.kappa), "lambda": fmt(report.lam),
                "C1": fmt(report.C1), "C2": fmt(report.C2),
                "fitted": report.fitted, "all_hold": report.all_hold,
                "rows": [{"R": fmt(r.R), "max_abs_S": fmt(r.max_abs_S),
                          "bound": fmt(r.bound), "holds": r.holds}
                         for r in report.rows],
            }
    run.write_json("spectral_fit.json", {"fits": fits})
    print(f"spectral: {len(omegas)} frequencies -> spectral_*.csv")
    return 0


def cmd_bounds(args) -> int:
    run = Run(args)
    bc = run.cfg.get("bounds")
    if not bc:
        raise ConfigError("config lacks a 'bounds' object")
    params = bounds_mod.CaseParams(
        L=bc["L"], abs_eta=bc["abs_eta"],
        abs_sigma0_eta=bc["abs_sigma0_eta"], H=bc["H"], m=bc["m"],
        delta1_beta=bc["delta1_beta"],
        residues_all_zero=bc["residues_all_zero"],
        some_residue_l=bc.get("some_residue_l", 0),
        M_lower=bc.get("M_lower"))
    result = bounds_mod.select_case_and_delta(params)
    alpha = bc.get("alpha")
    if alpha is None:
        _, pd, _ = run.salem()
        alpha = float(pd.alpha)
    gamma = bounds_mod.gamma_exponent(result.delta, bc["lambda"], alpha,
                                      bc.get("frequency", 1.0 / 3))
    r0 = bounds_mod.n0_N0_r0(
        P=bc["P"], n0=bc["n0"], D=bc["D"], H=bc["H"], tau=bc["tau"],
        delta=result.delta, c_alpha=bc["c_alpha"], alpha=alpha, A=bc["A"])
    run.write_json("bounds.json", {
        "case": result.case_id,
        "delta": fmt(result.delta),
        "provenance": result.provenance,
        "slack": None if result.slack is None else fmt(result.slack),
        "gamma": fmt(gamma),
        "N0": r0.N0,
        "log10_N0": fmt(r0.log10_N0),
        "r0_lower": fmt(r0.r0_lower),
        "log10_r0_lower": fmt(r0.log10_r0_lower),
        "inputs": {k: (fmt(v) if isinstance(v, float) else v)
                   for k, v in {**bc, "alpha": alpha}.items()},
    })
    print(f"bounds: case {result.case_id}, delta = {result.delta:.6g}, "
          f"gamma = {gamma:.6g}")
    return 0


def cmd_report(args) -> int:
    run = Run(args)
    known = ["analyze.json", "trace_orbit_summary.json", "equidist.csv",
             "selberg.csv", "spectral_fit.json", "bounds.json"]
    inventory = {}
    for name in known:
        path = run.out / name
        if not path.exists():
            continue
        digest = hashlib.sha256(path.read_bytes()).hexdigest()[:16]
        entry = {"sha256_16": digest, "bytes": path.stat().st_size}
        if name.endswith(".json"):
            with open(path) as fh:
                payload = json.load(fh)
            payload.pop("meta", None)
            keys = sorted(payload.keys())
            entry["keys"] = keys
        inventory[name] = entry
    run.write_json("report.json", {"artifacts": inventory})
    print(f"report: {len(inventory)} artifacts -> report.json")
    return 0


COMMANDS = {
    "analyze": cmd_analyze,
    "trace-orbit": cmd_trace_orbit,
    "equidist": cmd_equidist,
    "selberg-check": cmd_selberg_check,
    "spectral": cmd_spectral,
    "bounds": cmd_bounds,
    "report": cmd_report,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="salemflow",
        description="Desk verification for Salem-type substitution flows.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--precision", type=int, default=None,
                       help="override precision_bits")
        if name == "spectral":
            p.add_argument("--workers", type=int, default=1,
                           help="parallel workers for (R, sample) items")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except NotPrimitiveError as exc:
        print(f"not primitive: {exc}", file=sys.stderr)
        return EXIT_NOT_PRIMITIVE
    except orbit_mod.QuadratureNotConvergedError as exc:
        print(f"quadrature failure: {exc}", file=sys.stderr)
        return EXIT_QUADRATURE
    except (flow_mod.WindowOutOfRangeError, LengthCapError) as exc:
        print(f"window error: {exc}", file=sys.stderr)
        return EXIT_WINDOW
    except bounds_mod.InvalidCaseError as exc:
        print(f"invalid case parameters: {exc}", file=sys.stderr)
        return EXIT_BAD_CASE
    except (KeyError, TypeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG


if __name__ == "__main__":
    sys.exit(main())
