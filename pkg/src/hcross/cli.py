"""Command-line surface.

Subcommands:

    kernel    evaluate a kernel or emit its coefficients
    witness   build one fooling construction and print its report
    rates     run a configured rate experiment, emit CSV and the fit
    audit     run inequality audits (nonzero exit on any violation)
    norms     compute norms of a coefficient file

Global flags --seed/--oversample/--out/--config apply everywhere; a config
file (flat `key = value` lines) supplies defaults that explicit flags
override.  All randomness derives from the single seed.
"""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import norms as nm
from .classes import ClassSpec
from .coeffio import load_coeffs, save_coeffs, write_coeffs
from .errors import ConfigError, InfeasibleError
from .experiments import (ExperimentConfig, RUNNERS, parse_config, write_csv)
from .freqs import uniform_points, lattice_points, grid_points
from .kernels import a_poly, fejer_poly, vdp_poly, fr_hat
from .poly import TrigPoly, evaluate
from .witness import evaluate_witness, fooling_function


def _add_common(p):
    p.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    p.add_argument("--oversample", type=int, default=None,
                   help="grid oversampling factor (default 8)")
    p.add_argument("--out", type=str, default=None, help="output path (default stdout)")
    p.add_argument("--config", type=str, default=None,
                   help="flat key = value config file")
    p.add_argument("--no-timestamp", action="store_true",
                   help="suppress the timestamp header in CSV output")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hcross",
        description="hyperbolic-cross analysis and sampling-recovery witnesses")
    sub = ap.add_subparsers(dest="command")

    k = sub.add_parser("kernel", help="evaluate or emit classical kernels")
    k.add_argument("--kind", choices=("fejer", "vdp", "a", "fr"), required=True)
    k.add_argument("--j", type=int, help="Fejer order parameter")
    k.add_argument("--m", type=int, help="de la Vallee Poussin order")
    k.add_argument("--s", type=str, help="comma-separated band level(s)")
    k.add_argument("--r", type=float, help="smoothness for the fr multiplier")
    k.add_argument("--d", type=int, default=1)
    k.add_argument("--x", type=str, help="comma-separated evaluation point")
    k.add_argument("--k", dest="kfreq", type=str,
                   help="comma-separated frequency for the fr multiplier")
    _add_common(k)

    w = sub.add_parser("witness", help="one fooling construction with report")
    w.add_argument("--d", type=int, default=2)
    w.add_argument("--n", type=int, required=True)
    w.add_argument("--m", type=int, required=True)
    w.add_argument("--q", type=float, default=1.0)
    w.add_argument("--p", type=float, default=2.0)
    w.add_argument("--r", type=float, default=1.5)
    w.add_argument("--points", choices=("uniform", "lattice", "grid"), default="uniform")
    w.add_argument("--emit-coeffs", type=str, default=None,
                   help="write the fooler's coefficients to this path")
    _add_common(w)

    r = sub.add_parser("rates", help="rate experiments (CSV + exponent fit)")
    r.add_argument("--experiment", choices=("qpT1", "q1P2", "ST1", "qpL1"),
                   default=None)
    r.add_argument("--d", type=int, default=None)
    r.add_argument("--n", type=str, default=None, help="comma-separated n range")
    r.add_argument("--q", type=float, default=None)
    r.add_argument("--p", type=float, default=None)
    r.add_argument("--r", type=float, default=None)
    r.add_argument("--a", type=float, default=None)
    r.add_argument("--b", type=float, default=None)
    r.add_argument("--beta", type=float, default=None)
    r.add_argument("--points", choices=("uniform", "lattice", "grid"), default=None)
    _add_common(r)

    a = sub.add_parser("audit", help="inequality audits")
    a.add_argument("--family", choices=("sp1", "s4", "homogeneity", "theoremA",
                                        "inp1", "all"), default="all")
    a.add_argument("--trials", type=int, default=1000)
    a.add_argument("--d", type=int, default=2)
    _add_common(a)

    n = sub.add_parser("norms", help="norms of a coefficient file")
    n.add_argument("--coeffs", type=str, required=True)
    n.add_argument("--norm", choices=("lp", "sup", "A", "A_beta"), default="lp")
    n.add_argument("--p", type=float, default=2.0)
    n.add_argument("--beta", type=float, default=1.0)
    _add_common(n)
    return ap


def _parse_floats(text: str) -> np.ndarray:
    return np.array([float(v) for v in text.split(",")])


def _cfg_from_args(args, **overrides) -> ExperimentConfig:
    cfg = parse_config(args.config) if args.config else ExperimentConfig()
    for key, val in overrides.items():
        if val is not None:
            setattr(cfg, key, val)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.oversample is not None:
        cfg.oversample = args.oversample
    if args.out is not None:
        cfg.out = args.out
    if args.no_timestamp:
        cfg.timestamp = False
    return cfg


def _out_stream(args):
    if args.out:
        return open(args.out, "w", encoding="utf-8")
    return sys.stdout


def cmd_kernel(args) -> int:
    if args.kind == "fejer":
        if args.j is None:
            print("kernel --kind fejer needs --j", file=sys.stderr)
            return 2
        f = fejer_poly(args.j, args.d)
    elif args.kind == "vdp":
        if args.m is None:
            print("kernel --kind vdp needs --m", file=sys.stderr)
            return 2
        f = vdp_poly(args.m, args.d)
    elif args.kind == "a":
        if args.s is None:
            print("kernel --kind a needs --s", file=sys.stderr)
            return 2
        s = tuple(int(v) for v in args.s.split(","))
        f = a_poly(s if len(s) > 1 else s[0], args.d)
    else:
        if args.r is None or args.kfreq is None:
            print("kernel --kind fr needs --r and --k", file=sys.stderr)
            return 2
        k = np.array([[int(v) for v in args.kfreq.split(",")]])
        val = fr_hat(args.r, k)[0]
        print(f"{val.real:.17g} {val.imag:+.17g}i")
        return 0
    if args.x is not None:
        x = _parse_floats(args.x)
        val = evaluate(f, x)
        print(f"{val.real:.17g} {val.imag:+.17g}i")
        return 0
    stream = _out_stream(args)
    try:
        write_coeffs(stream, f)
    finally:
        if stream is not sys.stdout:
            stream.close()
    return 0


def cmd_witness(args) -> int:
    seed = args.seed if args.seed is not None else 0
    oversample = args.oversample if args.oversample is not None else 8
    ss = np.random.SeedSequence(seed).spawn(2)
    if args.points == "uniform":
        pts = uniform_points(args.m, args.d, np.random.default_rng(ss[0]))
    elif args.points == "lattice":
        pts = lattice_points(args.m, args.d)
    else:
        pts = grid_points(args.m, args.d)
    try:
        f, rep = fooling_function(pts, args.n, args.d,
                                  rng=np.random.default_rng(ss[1]))
        w = evaluate_witness(f, rep, ClassSpec.hrq(args.r, args.q), args.p,
                             oversample=oversample)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 1
    print(f"construction: {rep.construction}")
    print(f"d={rep.d} n={rep.n} m={rep.m} q={args.q} p={args.p} r={args.r} seed={seed}")
    print(f"vanishing residual: {rep.residual:.6e} "
          f"(relative {rep.residual / max(rep.sup_lower, 1e-300):.3e})")
    print(f"support level-sum max: {rep.support_level_max} (cap {rep.n + rep.d})")
    print(f"block ownership unique: {rep.block_owner_unique}")
    print(f"||f||_p = {w.norm_p:.9g}")
    print(f"max block gauge = {w.gauge:.9g}")
    print(f"witness value ||h||_p = {w.value:.9g}")
    print(f"predicted term = {w.predicted:.9g}   ratio = {w.ratio:.6g}")
    print(f"class scale (decay included) = {w.class_scale:.6g} "
          f"-> class witness {w.class_value:.6g}")
    for b in rep.blocks:
        print(f"  block s={b.s}: peak={b.peak:.6g} peak/2^n={b.peak_ratio:.4g} "
              f"null_dim={b.vanisher.null_dim} "
              f"delta-sup ratio={b.delta_sup_ratio:.4g} at u={b.delta_sup_level}")
    if args.emit_coeffs:
        save_coeffs(args.emit_coeffs, f)
        print(f"coefficients written to {args.emit_coeffs}")
    return 0


def cmd_rates(args) -> int:
    overrides = dict(experiment=args.experiment, d=args.d, q=args.q, p=args.p,
                     r=args.r, a=args.a, b=args.b, beta=args.beta,
                     points=args.points)
    if args.n:
        overrides["n_values"] = tuple(int(v) for v in args.n.split(","))
    cfg = _cfg_from_args(args, **overrides)
    runner = RUNNERS[cfg.experiment]
    rows, fit = runner(cfg)
    stream = _out_stream(args) if not cfg.out else open(cfg.out, "w", encoding="utf-8")
    try:
        write_csv(rows, stream, timestamp=cfg.timestamp, fit=fit)
    finally:
        if stream is not sys.stdout:
            stream.close()
    if fit is not None:
        print(fit.describe(), file=sys.stderr)
    return 0


def cmd_audit(args) -> int:
    cfg = _cfg_from_args(args, family=args.family, trials=args.trials, d=args.d)
    cfg.experiment = "inequalities"
    rows, _ = RUNNERS["inequalities"](cfg)
    stream = _out_stream(args) if not cfg.out else open(cfg.out, "w", encoding="utf-8")
    try:
        write_csv(rows, stream, timestamp=cfg.timestamp)
    finally:
        if stream is not sys.stdout:
            stream.close()
    failures = [r for r in rows if str(r.get("status", "")).startswith("FAIL")]
    if failures:
        print(f"{len(failures)} audit failures", file=sys.stderr)
        return 1
    return 0


def cmd_norms(args) -> int:
    f = load_coeffs(args.coeffs)
    oversample = args.oversample if args.oversample is not None else 8
    if args.norm == "A":
        val = nm.norm_a(f)
    elif args.norm == "A_beta":
        val = nm.norm_abeta(f, args.beta)
    elif args.norm == "sup":
        est = nm.sup_estimate(f, oversample)
        print(f"grid estimate {est.grid_value:.12g} (certified lower bound)")
        val = est.value
    else:
        info = nm.lp_norm_info(f, args.p, oversample, check_refinement=True)
        if not info.exact and info.refinement_delta is not None:
            print(f"quadrature refinement delta {info.refinement_delta:.3e}")
        val = info.value
    print(f"{val:.12g}")
    return 0


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command is None:
        ap.print_usage(sys.stderr)
        return 2
    try:
        handler = {"kernel": cmd_kernel, "witness": cmd_witness, "rates": cmd_rates,
                   "audit": cmd_audit, "norms": cmd_norms}[args.command]
        return handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
