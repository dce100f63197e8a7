"""Command-line front end: ``siegel-lab <subcommand> [options]``.

Every run prints one JSON document (or JSON lines / CSV for scans) holding
the resolved configuration, the result with its provenance and error
estimate, and a separate ``timing`` field.  Exit status is 0 when the
run's verdict passes, 2 when it fails and 1 on usage or runtime errors.

Options may also come from a ``key=value`` file given with ``--config``;
command-line flags take precedence over the file, which takes precedence
over the built-in defaults.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
import warnings
from typing import Any, Callable

import numpy as np

__all__ = ["main", "run", "build_parser", "parse_complex", "to_jsonable"]

EXIT_PASS, EXIT_ERROR, EXIT_FAIL = 0, 1, 2
WORKERS_ENV = "SIEGEL_LAB_WORKERS"


class UsageError(Exception):
    """Bad command-line input."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_complex(text: str) -> complex:
    """Parse ``2+3i``, ``2-3j``, ``-1.5`` or ``4i``."""
    t = str(text).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def to_jsonable(obj: Any) -> Any:
    """Recursively convert numpy scalars/arrays and complex numbers for ``json``."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    return obj


def _result(value: dict, verdict: bool | None, provenance: str, error: float | None) -> dict:
    return {"result": value, "verdict": None if verdict is None else ("pass" if verdict else "fail"),
            "provenance": provenance, "error_estimate": error}


# ---------------------------------------------------------------------------
# helpers


def _rng(args):
    if args.seed is None:
        raise UsageError("--seed is required for this subcommand")
    return np.random.default_rng(args.seed)


def _angular(n: int, p: int, q: int):
    from .harmonic import BidegreePolynomial

    if (p - q) % 2:
        raise UsageError("p and q must have the same parity")
    if n == 1 and p and q:
        raise UsageError("for n = 1 only bidegrees (p, 0) and (0, q) are harmonic")
    if p == q == 0:
        return None
    a = (p,) + (0,) * (n - 1)
    b = (0,) * (n - 1) + (q,)
    if n == 1:
        a, b = (p,), (q,)
    return BidegreePolynomial.monomial(n, a, b)


def _function(args):
    from .eisenstein import ProductFunction
    from .mellin import LogGaussian, YInterval

    if args.family == "loggauss":
        radial = LogGaussian(b=args.b, scale=args.scale)
    elif args.family == "annulus":
        if not 0 < args.r1 < args.r2:
            raise UsageError("annulus needs 0 < r1 < r2")
        radial = YInterval(1.0 / args.r2, 1.0 / args.r1)
    else:
        raise UsageError(f"unknown family {args.family!r}")
    return ProductFunction(radial, args.n, _angular(args.n, args.p, args.q))


def _sampler(args):
    from .sampling import HaarSampler

    if args.n == 1:
        return HaarSampler(1, kind="exact", seed=args.seed)
    return HaarSampler(args.n, kind="walk", eps=args.eps, burn_in=args.burn_in,
                       reduce_every=args.reduce_every, seed=args.seed)


def _sample_one(args):
    return _sampler(args).draw(1, _rng(args))[0]


def _region(text: str, n: int):
    from .lattice import RegionSpec

    kind, _, rest = text.partition(":")
    try:
        vals = [float(v) for v in rest.split(",") if v]
    except ValueError:
        raise UsageError(f"bad region {text!r}") from None
    if kind == "ball" and len(vals) == 1:
        return RegionSpec.ball(vals[0])
    if kind == "ball" and len(vals) == 1 + 2 * n:
        return RegionSpec.ball(vals[0], center=vals[1:])
    if kind == "annulus" and len(vals) == 2:
        return RegionSpec.annulus(*vals)
    if kind == "box" and len(vals) == 2:
        return RegionSpec.box([vals[0]] * 2 * n, [vals[1]] * 2 * n)
    raise UsageError("region must be ball:R, ball:R,c1,..,c2n, annulus:r1,r2 or box:lo,hi")


def _report(rep) -> dict:
    return rep.to_dict()


# ---------------------------------------------------------------------------
# subcommands; each returns a JSON-ready dict or a list of records (scans)


def cmd_xi(args):
    from .special import xi_c

    s = args.s
    val = xi_c(s, reflect=False)
    refl = xi_c(1 - s, reflect=False)
    err = abs(val - refl) / max(abs(val), 1e-300)
    return _result({"s": s, "xi": val, "xi_1_minus_s": refl, "functional_equation_rel_err": err},
                   err < 1e-9, "closed-form", err)


def cmd_zfactor(args):
    from .special import p_factor, z_factor

    n, m, s = args.n, args.m, args.s
    val = z_factor(m, n, s)
    on_line = z_factor(m, n, complex(n, s.imag)) if (n != 1 or s.imag != 0) else -1.0
    dev = abs(abs(on_line) - 1)
    return _result({"n": n, "m": m, "s": s, "value": val, "p_factor": p_factor(m, n, s),
                    "abs_on_critical_line": abs(on_line)}, dev < 1e-9, "closed-form", dev)


def cmd_harmonic_dim(args):
    from .harmonic import dimension_factorial_formula, harmonic_dimension

    d = harmonic_dimension(args.n, args.p, args.q)
    closed = dimension_factorial_formula(args.n, args.p, args.q)
    verdict = d == args.p + args.q + 1 if args.n == 2 else None
    return _result({"n": args.n, "p": args.p, "q": args.q, "kernel_dimension": d,
                    "factorial_formula": None if closed is None else int(closed)},
                   verdict, "exact", 0.0)


def cmd_raise_check(args):
    from . import harmonic as hm

    n, p, q, sv = args.n, args.p, args.q, args.s.real
    F = hm.h_family(n, p, q)
    rng = np.random.default_rng(0 if args.seed is None else args.seed)
    x = rng.normal(size=(10, 2 * n))
    out = {}
    ok = True
    for kind, target in (("R20", hm.h_family(n, p + 2, q)), ("R02", hm.h_family(n, p, q + 2))):
        sym = hm.raising_apply(kind, F).equals(target.scale(-(hm.s + p + q)))
        exact = hm.raising_apply(kind, F).evaluate(x, s_value=sv)
        fd = hm.raising_fd(kind, lambda pts: hm.eval_h(sv, p, q, pts), x)
        err = float(np.max(np.abs(fd - exact) / np.maximum(1.0, np.abs(exact))))
        out[kind] = {"symbolic": sym, "finite_difference_err": err}
        ok &= sym and err < 1e-6
    return _result({"n": n, "p": p, "q": q, "s": sv, **out}, ok, "exact",
                   max(v["finite_difference_err"] for v in out.values()))


def cmd_count(args):
    from .lattice import LatticeBasis, count_in_region

    g = np.loadtxt(args.basis) if args.basis else _sample_one(args)
    g = np.atleast_2d(g)
    n = g.shape[0] // 2
    reg = _region(args.region, n)
    total, prim = count_in_region(LatticeBasis(g), reg)
    vol = reg.volume(2 * n) if reg.kind != "custom" else None
    return _result({"n": n, "region": args.region, "count": total, "count_primitive": prim, "volume": vol,
                    "basis": g}, None, "exact", 0.0)


def cmd_siegel(args):
    from .eisenstein import incomplete_theta

    f = _function(args)
    g = _sample_one(args)
    val = incomplete_theta(f, g, cutoff=args.cutoff)
    return _result({"n": args.n, "value": val, "basis": g}, None, "lattice-sum", args.cutoff)


def cmd_eisenstein(args):
    from .eisenstein import eisenstein_series

    g = _sample_one(args)
    val = eisenstein_series(args.s, g, R=args.R)
    return _result({"n": args.n, "s": args.s, "R": args.R, "value": val, "basis": g}, None,
                   "lattice-sum", float(args.R) ** (2 * args.n - 2 - args.s.real))


def cmd_constant_term(args):
    from .acceptance import random_sl2
    from .eisenstein import constant_term_closed, constant_term_direct

    if args.n != 2:
        raise UsageError("constant-term supports n = 2 only")
    m = np.eye(2) if args.seed is None else random_sl2(np.random.default_rng(args.seed))
    d = constant_term_direct(args.s, m, args.y, grid=args.grid)
    c = constant_term_closed(args.s, m, args.y, 2)
    err = abs(d - c) / abs(c)
    return _result({"s": args.s, "y": args.y, "m": m, "direct": d, "closed": c, "rel_err": err},
                   err < args.tol, "quadrature", err)


def cmd_period_check(args):
    from .eisenstein import period_closed, period_direct_n1

    if args.n != 1:
        raise UsageError("period-check compares against the direct integral at n = 1 only")
    f = _function(args)
    rng = np.random.default_rng(0 if args.seed is None else args.seed)
    u = rng.normal(size=2)
    u /= np.linalg.norm(u)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        d = period_direct_n1(f, args.y, u)
        c = period_closed(f, args.y, u)
    err = abs(d - c) / abs(c)
    return _result({"y": args.y, "direct": d, "closed": c, "rel_err": err}, err < args.tol, "quadrature", err)


def cmd_isometry_check(args):
    from .eisenstein import isometry_ratio

    f = _function(args)
    r = isometry_ratio(f)
    ry = isometry_ratio(f, method="y-side") if args.family == "loggauss" else None
    dev = max(abs(r - 1), 0.0 if ry is None else abs(ry - 1))
    return _result({"ratio_line": r, "ratio_y_side": ry}, dev < 1e-6, "quadrature", dev)


def cmd_moment_rhs(args):
    from .eisenstein import moment_rhs

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = moment_rhs(_function(args))
    return _result(rep.to_dict(), None, "quadrature", rep.pairing_error)


def cmd_moment_mc(args):
    from .experiments import mc_moments

    _rng(args)
    f = _function(args)
    tol = 0.0 if args.n == 1 else args.tol
    r1, r2 = mc_moments(f, _sampler(args), args.samples, tolerance=tol, cutoff=args.cutoff,
                        workers=args.workers)
    return _result({"first": _report(r1), "second": _report(r2)}, r1.verdict and r2.verdict,
                   "monte-carlo", max(r1.stderr, r2.stderr))


def cmd_discrepancy_ms(args):
    from .experiments import discrepancy_meansquare, loglog_slope
    from .lattice import RegionSpec, ball_volume

    _rng(args)
    dim = 2 * args.n
    unit = ball_volume(1.0, dim)
    regions = []
    for v in args.vol:
        r2 = (v / (unit * (1 - 0.5**dim))) ** (1 / dim)
        regions.append(RegionSpec.annulus(r2 / 2, r2))
    reps = discrepancy_meansquare(regions, _sampler(args), args.samples, workers=args.workers)
    out = {"reports": [{"primitive": _report(a), "all": _report(b)} for a, b in reps]}
    ok = all(a.verdict and b.verdict for a, b in reps)
    if len(args.vol) >= 2:
        out["slope_primitive"] = loglog_slope(args.vol, [a.estimate for a, _ in reps])
        ok &= abs(out["slope_primitive"] + 1) <= 0.2
        if args.n > 1:
            out["slope_all"] = loglog_slope(args.vol, [b.estimate for _, b in reps])
            ok &= abs(out["slope_all"] + 1) <= 0.2
    return _result(out, ok, "monte-carlo", max(a.stderr for a, _ in reps))


def cmd_dilation_scan(args):
    from .experiments import dilation_scan, unit_offcenter_ball

    _rng(args)
    t_grid = np.arange(args.tmin, args.tmax + 1e-9, args.tstep)
    scans = dilation_scan(unit_offcenter_ball(args.n), _sampler(args), args.lattices, t_grid,
                          workers=args.workers)
    rows = []
    for i, sc in enumerate(scans):
        for rec, b in zip(sc.records, sc.bound):
            rows.append({"lattice": i, "t": rec.t, "volume": rec.volume, "count": rec.count,
                         "count_primitive": rec.count_pr, "D": rec.D, "D_pr": rec.D_pr, "bound": b,
                         "onset": sc.onset})
    ok = all(sc.onset is not None and sc.onset <= args.onset_max for sc in scans)
    return rows, ok


def cmd_schmidt_dyadic(args):
    from .experiments import schmidt_dyadic

    _rng(args)
    res = schmidt_dyadic(_sampler(args), args.samples, args.T, workers=args.workers)
    return _result({"report": _report(res.report), "profile_onsets": res.onsets}, res.report.verdict,
                   "monte-carlo", res.report.stderr)


def cmd_selftest(args):
    from .acceptance import run_all

    numbers = [int(k) for k in args.only.split(",")] if args.only else None
    results = run_all(numbers, echo=lambda line: print(line, file=sys.stderr))
    table = [{"criterion": r.number, "title": r.title, "verdict": "pass" if r.passed else "fail",
              "summary": r.summary} for r in results]
    return _result({"criteria": table}, all(r.passed for r in results), "aggregate", None)


# ---------------------------------------------------------------------------
# parser


def _add_function_args(p):
    p.add_argument("--family", choices=("loggauss", "annulus"), default="loggauss")
    p.add_argument("--b", type=float, default=3.0, help="LogGaussian exponent")
    p.add_argument("--scale", type=float, default=1.0, help="LogGaussian scale")
    p.add_argument("--r1", type=float, default=0.5, help="inner annulus radius")
    p.add_argument("--r2", type=float, default=1.5, help="outer annulus radius")
    p.add_argument("--p", type=int, default=0)
    p.add_argument("--q", type=int, default=0)


def _add_sampler_args(p):
    p.add_argument("--eps", type=float, default=0.08, help="random-walk step (n >= 2)")
    p.add_argument("--burn-in", type=int, default=64, help="random-walk length (n >= 2)")
    p.add_argument("--reduce-every", type=int, default=32)
    p.add_argument("--workers", type=int, default=int(os.environ.get(WORKERS_ENV, "1")))


SUBCOMMANDS: dict[str, Callable] = {}


def build_parser():
    parser = _Parser(prog="siegel-lab", description="Random symplectic lattices and Eisenstein series.")
    parser.add_argument("--config", help="key=value file with option defaults")
    parser.add_argument("--out", help="write output to this file instead of stdout")
    parser.add_argument("--format", choices=("json", "jsonl", "csv"), default=None,
                        help="output format (scans default to jsonl)")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)
    subs = {}

    def add(name, func, help_text, *, n_default=2, seed=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--n", type=int, default=n_default)
        p.add_argument("--seed", type=int, default=None, required=False)
        p.set_defaults(func=func, needs_seed=seed)
        subs[name] = p
        SUBCOMMANDS[name] = func
        return p

    p = add("xi", cmd_xi, "completed zeta function")
    p.add_argument("--s", type=parse_complex, required=True)
    p = add("zfactor", cmd_zfactor, "Z_m(s) and P_m(s)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--s", type=parse_complex, required=True)
    p = add("harmonic-dim", cmd_harmonic_dim, "dimension of harmonic polynomials of bidegree (p, q)")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p = add("raise-check", cmd_raise_check, "raising operator identities on h_{s,p,q}")
    p.add_argument("--p", type=int, default=0)
    p.add_argument("--q", type=int, default=0)
    p.add_argument("--s", type=parse_complex, default=complex(3.0))
    p = add("count", cmd_count, "lattice points in a region", seed=True)
    p.add_argument("--region", required=True, help="ball:R | ball:R,c1,..,c2n | annulus:r1,r2 | box:lo,hi")
    p.add_argument("--basis", help="text file with a basis matrix (rows); else a sampled lattice")
    _add_sampler_args(p)
    p = add("siegel", cmd_siegel, "Siegel transform of a product function at a sampled lattice", seed=True)
    _add_function_args(p)
    _add_sampler_args(p)
    p.add_argument("--cutoff", type=float, default=1e-12)
    p = add("eisenstein", cmd_eisenstein, "spherical Eisenstein series at a sampled lattice", seed=True)
    p.add_argument("--s", type=parse_complex, required=True)
    p.add_argument("--R", type=float, default=20.0)
    _add_sampler_args(p)
    p = add("constant-term", cmd_constant_term, "constant term: quadrature vs closed form (n = 2)")
    p.add_argument("--s", type=parse_complex, default=complex(6.0))
    p.add_argument("--y", type=float, default=1.0)
    p.add_argument("--grid", type=int, default=8)
    p.add_argument("--tol", type=float, default=1e-3)
    p = add("period-check", cmd_period_check, "period: direct integral vs closed form (n = 1)", n_default=1)
    _add_function_args(p)
    p.add_argument("--y", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-3)
    p = add("isometry-check", cmd_isometry_check, "norm ratio of iota(f) and f")
    _add_function_args(p)
    p = add("moment-rhs", cmd_moment_rhs, "right-hand sides of the moment formulas")
    _add_function_args(p)
    p = add("moment-mc", cmd_moment_mc, "Monte-Carlo moments against the formulas", seed=True)
    _add_function_args(p)
    _add_sampler_args(p)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--cutoff", type=float, default=1e-8)
    p.add_argument("--tol", type=float, default=0.05, help="relative tolerance for n >= 2")
    p = add("discrepancy-ms", cmd_discrepancy_ms, "mean-square discrepancy of annuli", seed=True)
    _add_sampler_args(p)
    p.add_argument("--vol", type=float, nargs="+", default=[10.0, 100.0, 1000.0])
    p.add_argument("--samples", type=int, default=10000)
    p = add("dilation-scan", cmd_dilation_scan, "discrepancy of dilates of an off-centre ball", seed=True)
    _add_sampler_args(p)
    p.add_argument("--lattices", type=int, default=20)
    p.add_argument("--tmin", type=float, default=5.0)
    p.add_argument("--tmax", type=float, default=40.0)
    p.add_argument("--tstep", type=float, default=1.0)
    p.add_argument("--onset-max", type=float, default=15.0)
    p = add("schmidt-dyadic", cmd_schmidt_dyadic, "dyadic mean-square inequality", seed=True)
    _add_sampler_args(p)
    p.add_argument("--T", type=int, default=8)
    p.add_argument("--samples", type=int, default=500)
    add("selftest", cmd_selftest, "run the acceptance suite").add_argument(
        "--only", help="comma-separated criterion numbers")
    return parser, subs


def _read_config(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _apply_config(sub: argparse.ArgumentParser, cfg: dict) -> None:
    """Install config-file values as defaults (converted by each option's type)."""
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, raw in cfg.items():
        if key not in actions:
            continue
        act = actions[key]
        if act.nargs in ("+", "*"):
            vals = raw.replace(",", " ").split()
            defaults[key] = [act.type(v) if act.type else v for v in vals]
        else:
            defaults[key] = act.type(raw) if act.type else raw
        act.required = False
    sub.set_defaults(**defaults)


def _resolved(args) -> dict:
    skip = {"func", "needs_seed", "config", "out", "format"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _emit(doc, fmt: str, out):
    if fmt == "json":
        out.write(json.dumps(to_jsonable(doc), indent=2, sort_keys=True) + "\n")
    elif fmt == "jsonl":
        for row in doc:
            out.write(json.dumps(to_jsonable(row), sort_keys=True) + "\n")
    else:
        rows = [to_jsonable(r) for r in doc]
        flat = []
        for r in rows:
            item = {}
            for k, v in r.items():
                if isinstance(v, dict) and set(v) == {"re", "im"}:
                    item[f"{k}_re"], item[f"{k}_im"] = v["re"], v["im"]
                else:
                    item[k] = v
            flat.append(item)
        buf = io.StringIO()
        if flat:
            w = csv.DictWriter(buf, fieldnames=list(flat[0]))
            w.writeheader()
            w.writerows(flat)
        out.write(buf.getvalue())


def run(argv=None) -> int:
    """Run the CLI and return the exit status."""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        parser, subs = build_parser()
        cfg_path = None
        if "--config" in argv:
            i = argv.index("--config")
            if i + 1 >= len(argv):
                raise UsageError("--config needs a path")
            cfg_path = argv[i + 1]
        if cfg_path:
            cfg = _read_config(cfg_path)
            for sp in subs.values():
                _apply_config(sp, cfg)
        args = parser.parse_args(argv)
        if args.needs_seed and args.seed is None and args.command not in ("count",):
            raise UsageError(f"{args.command} is stochastic; --seed is required")
        if args.command == "count" and not getattr(args, "basis", None) and args.seed is None:
            raise UsageError("count needs --basis or --seed")
        start = time.perf_counter()
        outcome = args.func(args)
        elapsed = time.perf_counter() - start
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, ArithmeticError, RuntimeError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR

    if isinstance(outcome, tuple):  # scans
        rows, ok = outcome
        fmt = args.format or "jsonl"
        if fmt == "json":
            doc = {"command": args.command, "config": _resolved(args), "records": rows,
                   "verdict": "pass" if ok else "fail", "provenance": "monte-carlo",
                   "timing": {"seconds": elapsed}}
        else:
            doc = rows
    else:
        ok = outcome["verdict"] != "fail"
        fmt = args.format or "json"
        if fmt != "json":
            print(f"error: --format {fmt} is only available for scans", file=sys.stderr)
            return EXIT_ERROR
        doc = {"command": args.command, "config": _resolved(args), **outcome, "timing": {"seconds": elapsed}}
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            _emit(doc, fmt, fh)
    else:
        _emit(doc, fmt, sys.stdout)
    return EXIT_PASS if ok else EXIT_FAIL


def main() -> None:
    sys.exit(run())
