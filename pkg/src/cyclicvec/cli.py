"""Command-line batch runner.

    python -m cyclicvec sweep --spec problem.json --k 0 --n 4..12 --routes both
    python -m cyclicvec constants
    python -m cyclicvec theorem3 --spec problem.json --kmax 20
    python -m cyclicvec bump-demo --nmax 8
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import mpmath
from mpmath import mp

from . import __version__
from .cyclicity import analyze, condition1_holds
from .derivative_app import bump_noncyclicity_demo, solve_c0, theorem3_check
from .errors import NumericalFailure, SpecError
from .gram_oracle import build_gram, gram_solve
from .problem import load_problem, parse_problem
from .spectral_core import PrecisionConfig

SIG_DIGITS = 25
SPEC_REV = "1"
RECORD_FIELDS = (
    "k", "n", "route", "rho2", "q", "bound_t2", "bound_refined", "k_kk",
    "tail_cert", "solve_residual", "route_disagreement", "condition1_failed",
    "relabeled", "error", "wall_time",
)


def fmt(x):
    """Single formatting path for every number written to a report."""
    if x is None or isinstance(x, (bool, str)):
        return x
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        x = mp.mpf(x)
    if isinstance(x, mpmath.mpc):
        x = mp.re(x)
    if mp.isinf(x):
        return "inf" if x > 0 else "-inf"
    return mpmath.libmp.to_str(x._mpf_, SIG_DIGITS)


def parse_int_list(text: str) -> list[int]:
    """'0,1,2', '4..12', '-2..2' or combinations like '0,4..6'."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError(f"empty list: {text!r}")
    return out


@dataclass(frozen=True)
class RunConfig:
    spec_path: str
    k_list: tuple
    n_list: tuple
    routes: tuple
    fmt: str
    out: str | None
    precision: int | None
    gram_precision: int | None
    workers: int = 1
    strict: bool = False
    timing: bool = False

    def __post_init__(self):
        if not self.routes:
            raise SpecError("routes must be nonempty")
        unknown = set(self.routes) - {"kmatrix", "gram", "both"}
        if unknown:
            raise SpecError(f"unknown route(s): {sorted(unknown)}")
        bad = [k for k in self.k_list if not abs(k) < min(self.n_list)]
        if bad:
            raise SpecError(f"every k must satisfy |k| < min(n); offending k: {bad}")


def _cell(args):
    raw, k, n, routes, bits, gram_bits, timing = args
    prob = parse_problem(raw, bits)
    cfg = prob.precision
    if gram_bits is not None or cfg.gram_mantissa_bits is None:
        cfg = PrecisionConfig(
            mantissa_bits=cfg.mantissa_bits,
            tail_rel_tol=cfg.tail_rel_tol,
            solve_rel_tol=cfg.solve_rel_tol,
            gram_mantissa_bits=gram_bits or 2 * cfg.mantissa_bits,
        )
    records = []
    rho = {}
    for route in sorted(routes):
        rec = {f: None for f in RECORD_FIELDS}
        rec.update(k=k, n=n, route=route, condition1_failed=False, relabeled=False)
        t0 = time.perf_counter()
        try:
            with cfg.workprec():
                if route == "kmatrix":
                    rep = analyze(prob.spectrum, prob.coeffs, k, n, cfg)
                    rec.update(
                        rho2=rep.rho2, q=rep.q, bound_t2=rep.bound_t2,
                        bound_refined=rep.bound_refined, k_kk=rep.k_kk,
                        tail_cert=rep.tail_bound, solve_residual=rep.solve_residual,
                        condition1_failed=not rep.condition1_ok, relabeled=rep.relabeled,
                    )
                    rho[route] = rep.rho2
                else:
                    if prob.coeffs.is_zero(k):
                        rec.update(rho2=mp.one, q=mp.zero, condition1_failed=True)
                    else:
                        gs = build_gram(prob.spectrum, prob.coeffs, n, cfg)
                        res = gram_solve(gs, k, cfg)
                        rec.update(
                            condition1_failed=not condition1_holds(prob.coeffs, prob.spectrum),
                            rho2=res.rho2, q=res.q, solve_residual=res.residual,
                            tail_cert=max(
                                (bd / abs(m) if m else bd)
                                for bd, m in zip(gs.moment_bounds, gs.moments)
                            ),
                        )
                    rho[route] = rec["rho2"]
        except NumericalFailure as exc:
            rec["error"] = f"{type(exc).__name__}: {exc}"
        if timing:
            rec["wall_time"] = round(time.perf_counter() - t0, 6)
        records.append(rec)
    if len(rho) == 2:
        with mp.workprec(cfg.mantissa_bits):
            d = abs(rho["kmatrix"] - rho["gram"])
        for rec in records:
            rec["route_disagreement"] = d
    return [{f: rec[f] if f == "wall_time" else fmt(rec[f]) for f in RECORD_FIELDS} for rec in records]


def run_sweep(rc: RunConfig) -> tuple[dict, int]:
    prob = load_problem(rc.spec_path, rc.precision)
    routes = ("gram", "kmatrix") if "both" in rc.routes else tuple(sorted(set(rc.routes)))
    cells = [
        (prob.raw, k, n, routes, rc.precision, rc.gram_precision, rc.timing)
        for k in sorted(rc.k_list)
        for n in sorted(rc.n_list)
    ]
    if rc.workers > 1:
        with ProcessPoolExecutor(max_workers=rc.workers) as pool:
            results = list(pool.map(_cell, cells))
    else:
        results = [_cell(c) for c in cells]
    records = [r for cell in results for r in cell]
    failed = any(r["error"] for r in records)
    report = {
        "config": {
            "spec": prob.raw,
            "k_list": sorted(rc.k_list),
            "n_list": sorted(rc.n_list),
            "routes": list(routes),
            "mantissa_bits": prob.precision.mantissa_bits,
            "gram_mantissa_bits": rc.gram_precision
            or prob.precision.gram_mantissa_bits
            or 2 * prob.precision.mantissa_bits,
            "workers": rc.workers,
        },
        "records": records,
        "versions": {"spec_rev": SPEC_REV, "package": __version__},
    }
    code = 3 if (failed and rc.strict) else 0
    return report, code


def render(report: dict, fmt_name: str) -> str:
    if fmt_name == "json":
        return json.dumps(report, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=RECORD_FIELDS, lineterminator="\n")
    w.writeheader()
    for rec in report["records"]:
        w.writerow({k: ("" if v is None else v) for k, v in rec.items()})
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_sweep(args) -> int:
    rc = RunConfig(
        spec_path=args.spec,
        k_list=tuple(args.k),
        n_list=tuple(args.n),
        routes=tuple(args.routes.split(",")),
        fmt=args.format,
        out=args.out,
        precision=args.precision,
        gram_precision=args.gram_precision,
        workers=args.workers,
        strict=args.strict,
        timing=args.timing,
    )
    report, code = run_sweep(rc)
    _emit(render(report, rc.fmt), rc.out)
    return code


def cmd_constants(args) -> int:
    t = solve_c0(PrecisionConfig(mantissa_bits=args.precision))
    with mp.workprec(args.precision):
        print(f"c0       = {mp.nstr(t.c0, 30)}")
        print(f"sigma    = {mp.nstr(t.sigma, 30)}")
        print(f"residual = {mp.nstr(t.residual, 5)}")
    return 0


def cmd_theorem3(args) -> int:
    prob = load_problem(args.spec, args.precision)
    rep = theorem3_check(prob.coeffs, args.kmax, prob.precision)
    with prob.precision.workprec():
        print(f"kmax     = {rep.kmax}")
        print(f"C        = {fmt(rep.C)}")
        print(f"delta    = {fmt(rep.delta)}")
        print(f"sigma    = {fmt(rep.sigma)}")
        print(f"nonzero  = {rep.all_nonzero}")
        print(f"verdict: {rep.verdict}")
    return 0


def cmd_bump_demo(args) -> int:
    cfg = PrecisionConfig(mantissa_bits=args.precision)
    rep = bump_noncyclicity_demo(radius=args.radius, kmax=args.kmax, nmax=args.nmax, cfg=cfg)
    with cfg.workprec():
        out = {
            "radius": fmt(rep.radius),
            "lambda0": fmt(rep.lambda0),
            "phi_at_lambda0": fmt(rep.phi_at_lambda0),
            "kmax": rep.kmax,
            "aliasing_estimate": fmt(rep.aliasing_estimate),
            "rho2_e0_bump": {str(n): fmt(v) for n, v in rep.rho2_by_n.items()},
            "rho2_e0_expcos": {str(n): fmt(v) for n, v in rep.contrast_rho2_by_n.items()},
            "min_rho2_bump": fmt(rep.min_rho2),
        }
    _emit(json.dumps(out, indent=2) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cyclicvec", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sweep", help="rho^2 over a (k, n) grid")
    s.add_argument("--spec", required=True)
    s.add_argument("--k", type=parse_int_list, default=[0])
    s.add_argument("--n", type=parse_int_list, required=True)
    s.add_argument("--routes", default="both", help="kmatrix, gram or both")
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.add_argument("--out")
    s.add_argument("--precision", type=int, help="mantissa bits (overrides the problem file)")
    s.add_argument("--gram-precision", type=int, help="mantissa bits for the Gram route")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--strict", action="store_true", help="exit 3 if any cell fails")
    s.add_argument("--timing", action="store_true", help="record wall time (breaks byte-identity)")
    s.set_defaults(func=cmd_sweep)

    c = sub.add_parser("constants", help="c0 and sigma")
    c.add_argument("--precision", type=int, default=256)
    c.set_defaults(func=cmd_constants)

    t = sub.add_parser("theorem3", help="check the Fourier decay hypothesis")
    t.add_argument("--spec", required=True)
    t.add_argument("--kmax", type=int, default=20)
    t.add_argument("--precision", type=int)
    t.set_defaults(func=cmd_theorem3)

    b = sub.add_parser("bump-demo", help="bump functions are not cyclic")
    b.add_argument("--radius", type=float)
    b.add_argument("--nmax", type=int, default=8)
    b.add_argument("--kmax", type=int, default=48)
    b.add_argument("--precision", type=int, default=256)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bump_demo)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
