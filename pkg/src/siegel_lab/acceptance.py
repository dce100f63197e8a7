"""The twelve acceptance checks of the package.

Each ``criterion_*`` function runs one check at its stated tolerance and
returns a :class:`CriterionResult`.  :func:`run_all` runs them in order; the
``selftest`` subcommand and ``tests/test_acceptance.py`` are thin wrappers.
"""

from __future__ import annotations

import itertools
import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import sympy as sp

from . import harmonic as hm
from .eisenstein import (
    ProductFunction,
    constant_term_closed,
    constant_term_direct,
    isometry_ratio,
    moment_rhs,
    period_closed,
    period_direct_n1,
)
from .experiments import (
    discrepancy_meansquare,
    dilation_scan,
    loglog_slope,
    mc_moments,
    schmidt_dyadic,
    unit_offcenter_ball,
)
from .lattice import LatticeBasis, RegionSpec, ball_volume, count_in_region, enumerate_ball
from .mellin import LogGaussian, SlowDecayWarning, YInterval
from .sampling import HaarSampler
from .special import xi_c, z_factor, zeta_c
from .symplectic import is_integer_symplectic, symplectic_completion

__all__ = ["CriterionResult", "CRITERIA", "run_all", "run_criterion"]


@dataclass
class CriterionResult:
    """Verdict of one acceptance check."""

    number: int
    title: str
    passed: bool
    summary: str
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] criterion {self.number:2d} {self.title}: {self.summary} ({self.seconds:.1f}s)"


def _timed(number: int, title: str):
    def wrap(fn: Callable[[], tuple[bool, str, dict]]):
        def run(**kwargs) -> CriterionResult:
            start = time.perf_counter()
            passed, summary, details = fn(**kwargs)
            return CriterionResult(number, title, bool(passed), summary, details, time.perf_counter() - start)

        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        run.number = number
        return run

    return wrap


def _rel(a, b) -> float:
    return float(abs(a - b) / abs(b))


@_timed(1, "special functions")
def criterion_special(seed: int = 1):
    """Functional equation of xi and unimodularity of Z_m."""
    rng = np.random.default_rng(seed)
    s = rng.uniform(-4.5, 5.5, 200) + 1j * rng.uniform(-30, 30, 200)
    lhs = xi_c(s, reflect=False)
    rhs = xi_c(1 - s, reflect=False)
    xi_err = float(np.max(np.abs(lhs - rhs) / np.abs(rhs)))
    n = 2
    z_err = 0.0
    unit_err = 0.0
    for m in (0, 2, 4, 6):
        sv = rng.uniform(n - 3, n + 3, 100) + 1j * rng.uniform(-30, 30, 100)
        z_err = max(z_err, float(np.max(np.abs(z_factor(m, n, sv) * z_factor(m, n, 2 * n - sv) - 1))))
        t = rng.uniform(-30, 30, 100)
        unit_err = max(unit_err, float(np.max(np.abs(np.abs(z_factor(m, n, n + 1j * t)) - 1))))
    ok = xi_err < 1e-9 and z_err < 1e-9 and unit_err < 1e-9
    return ok, f"xi {xi_err:.1e}, Z(s)Z(2n-s) {z_err:.1e}, |Z| {unit_err:.1e} (tol 1e-9)", {
        "xi_rel_err": xi_err, "z_product_err": z_err, "z_unit_err": unit_err}


@_timed(2, "harmonic spaces")
def criterion_harmonic(seed: int = 2):
    """Kernel dimensions, raising identities and the auxiliary decomposition."""
    n = 2
    s = hm.s
    dims_ok = all(hm.harmonic_dimension(n, p, q) == p + q + 1 for p in range(5) for q in range(5))
    sym_ok = True
    for p, q in itertools.product(range(5), repeat=2):
        F = hm.h_family(n, p, q)
        sym_ok &= hm.raising_apply("R20", F).equals(hm.h_family(n, p + 2, q).scale(-(s + p + q)))
        sym_ok &= hm.raising_apply("R02", F).equals(hm.h_family(n, p, q + 2).scale(-(s + p + q)))
    rng = np.random.default_rng(seed)
    fd_err = 0.0
    for p, q in itertools.product(range(5), repeat=2):
        sv = float(rng.uniform(0.5, 6.0))
        x = rng.normal(size=(10, 2 * n))
        x /= np.linalg.norm(x, axis=1, keepdims=True) / rng.uniform(0.7, 1.4, (10, 1))
        f = lambda pts, p=p, q=q, sv=sv: hm.eval_h(sv, p, q, pts)
        for kind in ("R20", "R02"):
            exact = hm.raising_apply(kind, hm.h_family(n, p, q)).evaluate(x, s_value=sv)
            fd = hm.raising_fd(kind, f, x)
            fd_err = max(fd_err, float(np.max(np.abs(fd - exact) / np.maximum(1.0, np.abs(exact)))))
    aux = hm.raising_apply("AUX", hm.h_family(n, 0, 2))
    expected = (hm.RadialPower((s + 2) * hm.psi_22(n), -(s + 4) / 2)
                + hm.RadialPower((n - s) * hm.psi_11(n), -(s + 2) / 2))
    aux_ok = aux.equals(expected) and hm.psi_22(n).is_harmonic() and hm.psi_11(n).is_harmonic()
    ok = dims_ok and sym_ok and fd_err < 1e-6 and aux_ok
    return ok, (f"dims {'ok' if dims_ok else 'bad'}, raising symbolic {'ok' if sym_ok else 'bad'}, "
                f"fd err {fd_err:.1e}, auxiliary decomposition {'exact' if aux_ok else 'bad'}"), {
        "dimensions": dims_ok, "symbolic": bool(sym_ok), "fd_err": fd_err, "aux": aux_ok}


def _brute_force(g: np.ndarray, R: float) -> set:
    inv = np.linalg.inv(g)
    bounds = np.floor(R * np.linalg.norm(inv, axis=0) + 1e-9).astype(int)
    axes = [np.arange(-b, b + 1) for b in bounds]
    C = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, g.shape[0])
    V = C @ g
    keep = (np.sum(V * V, axis=1) <= R * R) & np.any(C != 0, axis=1)
    return {tuple(c) for c in C[keep]}


def random_unimodular(dim: int, rng: np.random.Generator, spread: float = 0.4) -> np.ndarray:
    """``Q D Q'`` with Haar orthogonal ``Q, Q'`` and log-normal ``D`` of determinant 1."""
    from scipy.stats import ortho_group

    d = np.exp(rng.normal(0, spread, dim))
    d /= np.prod(d) ** (1 / dim)
    Q1 = ortho_group.rvs(dim, random_state=rng)
    Q2 = ortho_group.rvs(dim, random_state=rng)
    return Q1 @ np.diag(d) @ Q2


@_timed(3, "lattice oracle equivalence")
def criterion_lattice(seed: int = 3):
    """Enumeration against a brute-force box scan; counts for Z^4."""
    rng = np.random.default_rng(seed)
    mismatches = 0
    for _ in range(50):
        g = random_unimodular(4, rng)
        R = float(rng.uniform(1.0, 2.5))
        X, _, red = enumerate_ball(g, R)
        # coefficients refer to the reduced basis; map to the original one
        T = np.rint(red.rows @ np.linalg.inv(g)).astype(int)
        got = {tuple(c) for c in X @ T}
        mismatches += got != _brute_force(g, R)
    Z = LatticeBasis(np.eye(4))
    c15 = count_in_region(Z, RegionSpec.ball(1.5))
    c2 = count_in_region(Z, RegionSpec.ball(2.0))
    ok = mismatches == 0 and c15[0] == 32 and c2 == (88, 80)
    return ok, f"{50 - mismatches}/50 bases agree, Z^4: R=1.5 -> {c15[0]}, R=2 -> {c2[0]}/{c2[1]}", {
        "mismatches": int(mismatches), "z4_r15": c15, "z4_r2": c2}


@_timed(4, "coset bijection")
def criterion_coset():
    """Completion of every primitive v in Z^4 with |v|^2 <= 20."""
    rng = range(-4, 5)
    total = failures = 0
    for v in itertools.product(rng, repeat=4):
        if 0 < sum(c * c for c in v) <= 20 and math.gcd(*v) == 1:
            total += 1
            gamma = symplectic_completion(v)
            if not (is_integer_symplectic(gamma) and [int(c) for c in gamma[-1]] == list(v)):
                failures += 1
    return failures == 0, f"{total - failures}/{total} primitive vectors completed exactly", {
        "total": total, "failures": failures}


def random_sl2(rng: np.random.Generator) -> np.ndarray:
    """A random element of ``SL(2, R)`` (KAK with moderate stretch)."""
    def rot(a):
        return np.array([[math.cos(a), math.sin(a)], [-math.sin(a), math.cos(a)]])

    lam = math.exp(rng.uniform(-0.4, 0.4))
    return rot(rng.uniform(0, 2 * math.pi)) @ np.diag([lam, 1 / lam]) @ rot(rng.uniform(0, 2 * math.pi))


@_timed(5, "constant term")
def criterion_constant_term(seed: int = 5, grid: int = 8):
    """Torus quadrature against the closed form at n = 2."""
    rng = np.random.default_rng(seed)
    ms = {"identity": np.eye(2), "random": random_sl2(rng)}
    errs = {}
    for (label, m), s, y in itertools.product(ms.items(), (6.0, 8.0), (0.8, 1.2)):
        d = constant_term_direct(s, m, y, grid=grid)
        c = constant_term_closed(s, m, y, 2)
        errs[f"{label} s={s:g} y={y:g}"] = _rel(d, c)
    worst = max(errs.values())
    return worst < 1e-3, f"max rel err {worst:.1e} over 8 cases (tol 1e-3)", errs


@_timed(6, "period formulas")
def criterion_periods(seed: int = 6):
    """Direct period integrals at n = 1 against the closed forms."""
    rng = np.random.default_rng(seed)
    u = rng.normal(size=2)
    u /= np.linalg.norm(u)
    z = hm.BidegreePolynomial.z(1, 1)
    zb = hm.BidegreePolynomial.zbar(1, 1)
    errs = {}
    for label, ang in (("spherical", None), ("(2,0)", z * z), ("(0,2)", zb * zb)):
        f = ProductFunction(LogGaussian(b=3.0), 1, ang)
        for y in (0.7, 1.0, 1.6):
            errs[f"{label} y={y}"] = _rel(period_direct_n1(f, y, u), period_closed(f, y, u))
    worst = max(errs.values())
    return worst < 1e-3, f"max rel err {worst:.1e} over 9 cases (tol 1e-3)", errs


def random_harmonic(n: int, p: int, q: int, rng: np.random.Generator) -> hm.BidegreePolynomial:
    """Random rational combination of the exact basis of ``H^{p,q}``."""
    basis = hm.harmonic_basis(n, p, q)
    out = None
    for b in basis:
        c = sp.Rational(int(rng.integers(-9, 10)), int(rng.integers(1, 5))) + sp.I * int(rng.integers(-3, 4))
        out = b * c if out is None else out + b * c
    return out if not out.is_zero() else basis[0]


@_timed(7, "isometry")
def criterion_isometry(seed: int = 7):
    """|iota(f)| / |f| = 1 for random LogGaussian x harmonic functions."""
    rng = np.random.default_rng(seed)
    types = [(0, 0), (2, 0), (1, 1), (2, 2)]
    worst = 0.0
    ratios = []
    for i in range(10):
        p, q = types[i % 4]
        ang = random_harmonic(2, p, q, rng)
        f = ProductFunction(LogGaussian(b=float(rng.uniform(-2, 6)), scale=float(np.exp(rng.uniform(-0.5, 0.5)))),
                            2, ang)
        # the y-side route inverts iota(f) numerically and integrates in y
        r_line = isometry_ratio(f)
        r_y = isometry_ratio(f, method="y-side")
        ratios.append((r_line, r_y))
        worst = max(worst, abs(r_line - 1), abs(r_y - 1))
    return worst < 1e-6, f"max |ratio - 1| = {worst:.1e} over 10 functions, two routes (tol 1e-6)", {
        "ratios": ratios}


def _moment_check(f, sampler, N, tol, label, cutoff):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SlowDecayWarning)
        rhs = moment_rhs(f)
    r1, r2 = mc_moments(f, sampler, N, rhs=rhs, tolerance=tol, cutoff=cutoff, name=label)
    return r1, r2


def _fmt(rep) -> str:
    return f"{rep.name} {rep.estimate:.4g}+-{rep.stderr:.2g} vs {rep.oracle:.4g}"


@_timed(8, "second moment, n = 1 (exact sampler)")
def criterion_moment_n1(seed: int = 8, N: int = 100_000):
    """Exact Haar samples against the second-moment formula at n = 1."""
    sampler = HaarSampler.default(1, seed=seed)
    reps = []
    reps += _moment_check(ProductFunction(LogGaussian(b=3.0), 1), sampler, N, 0.0, "loggauss", 1e-10)
    reps += _moment_check(ProductFunction(YInterval(1 / 1.5, 2.0), 1), sampler, N, 0.0, "annulus", 1e-10)
    ok = all(r.verdict for r in reps[1::2])
    return ok, "; ".join(_fmt(r) for r in reps), {r.name: r.to_dict() for r in reps}


@_timed(9, "moments, n = 2 (random-walk sampler)")
def criterion_moment_n2(seed: int = 9, N: int = 20_000):
    """Approximate Haar samples against the first and second moment formulas at n = 2 (5%)."""
    sampler = HaarSampler.default(2, seed=seed)
    reps = []
    reps += _moment_check(ProductFunction(LogGaussian(b=3.0), 2), sampler, N, 0.05, "loggauss", 1e-6)
    reps += _moment_check(ProductFunction(YInterval(1 / 1.5, 2.0), 2), sampler, N, 0.05, "annulus", 1e-6)
    ok = all(abs(r.estimate - r.oracle) <= 0.05 * abs(r.oracle) for r in reps)
    return ok, "; ".join(_fmt(r) for r in reps), {r.name: r.to_dict() for r in reps}


def predicted_dpr_meansquare(region: RegionSpec, n: int) -> float:
    """``E[D_pr^2]`` for an annulus from the first and second moment formulas."""
    f = ProductFunction(YInterval(1.0 / region.r2, 1.0 / region.r1), n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SlowDecayWarning)
        rhs = moment_rhs(f)
    vol = region.volume(2 * n)
    z = zeta_c(2 * n).real
    return float(z**2 / vol**2 * rhs.second_rhs.real - 2 * z / vol * rhs.first_rhs.real + 1.0)


@_timed(10, "mean-square discrepancy")
def criterion_discrepancy(seed: int = 10, N: int = 10_000):
    """Mean squares of D and D_pr for annuli of volume 10, 100, 1000 at n = 2."""
    vols = (10.0, 100.0, 1000.0)
    regions = []
    unit = ball_volume(1.0, 4)
    for v in vols:
        r2 = (v / (unit * (1 - 1 / 16))) ** 0.25
        regions.append(RegionSpec.annulus(r2 / 2, r2))
    z4 = zeta_c(4).real
    bounds_ok = abs(4 * z4 - 4.3293) < 1e-4 and abs(4 * zeta_c(2).real ** 2 / z4 - 10.0) < 1e-12
    reps = discrepancy_meansquare(regions, HaarSampler.default(2, seed=seed), N)
    ineq_ok = all(rp.verdict and ra.verdict for rp, ra in reps)
    slope_pr = loglog_slope(vols, [rp.estimate for rp, _ in reps])
    slope_all = loglog_slope(vols, [ra.estimate for _, ra in reps])
    slopes_ok = abs(slope_pr + 1) <= 0.2 and abs(slope_all + 1) <= 0.2
    # exact prediction of E[D_pr^2] from the second-moment formula
    predicted = [predicted_dpr_meansquare(reg, 2) for reg in regions]
    slope_pred = loglog_slope(vols, predicted)
    ok = bounds_ok and ineq_ok and slopes_ok
    ests = ", ".join(f"{rp.estimate * rp.extra['volume']:.3g}/{ra.estimate * ra.extra['volume']:.3g}"
                     for rp, ra in reps)
    return ok, (f"vol*E[D_pr^2]/vol*E[D^2] = {ests} (bounds {4 * z4:.4g}/10), "
                f"slopes {slope_pr:.2f}/{slope_all:.2f} (formula predicts {slope_pred:.2f} for D_pr)"), {
        "reports": [(rp.to_dict(), ra.to_dict()) for rp, ra in reps],
        "slope_pr": slope_pr, "slope_all": slope_all,
        "predicted_dpr": predicted, "predicted_slope_pr": slope_pred}


@_timed(11, "Schmidt dyadic inequality")
def criterion_schmidt(seed: int = 11, N: int = 500, T: int = 8):
    """Dyadic sum of squared primitive-count deviations at n = 2."""
    res = schmidt_dyadic(HaarSampler.default(2, seed=seed), N, T)
    r = res.report
    return r.verdict, f"estimate {r.estimate:.4g}+-{r.stderr:.2g} <= bound {r.bound:.4g}", {
        "report": r.to_dict(), "onsets": res.onsets}


@_timed(12, "dilation scan")
def criterion_dilation(seed: int = 12, lattices: int = 20):
    """Discrepancy of dilates of an off-centre unit ball at n = 2."""
    region = unit_offcenter_ball(2)
    t_grid = np.arange(5, 41, dtype=float)
    scans = dilation_scan(region, HaarSampler.default(2, seed=seed), lattices, t_grid)
    onsets = [sc.onset for sc in scans]
    ok = all(o is not None and o <= 15 for o in onsets)
    worst = max((o if o is not None else math.inf) for o in onsets)
    return ok, f"latest onset t = {worst:g} over {lattices} lattices (expected <= 15)", {"onsets": onsets}


CRITERIA = [
    criterion_special,
    criterion_harmonic,
    criterion_lattice,
    criterion_coset,
    criterion_constant_term,
    criterion_periods,
    criterion_isometry,
    criterion_moment_n1,
    criterion_moment_n2,
    criterion_discrepancy,
    criterion_schmidt,
    criterion_dilation,
]


def run_criterion(number: int) -> CriterionResult:
    return CRITERIA[number - 1]()


def run_all(numbers=None, echo: Callable[[str], None] | None = None) -> list[CriterionResult]:
    """Run the selected criteria (all by default), echoing one line per result."""
    out = []
    for k in numbers or range(1, len(CRITERIA) + 1):
        res = run_criterion(k)
        if echo:
            echo(res.line())
        out.append(res)
    return out
