"""Monte-Carlo experiments on random symplectic lattices.

Every experiment draws lattices shard by shard (see
:func:`~siegel_lab.sampling.shard_seeds`), evaluates a per-lattice statistic
and merges the shards in their natural order.  Results therefore depend on
the seed and the shard size only, not on the number of worker processes.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import partial
from typing import Callable, Optional, Sequence

import numpy as np

from .eisenstein import MomentReport, ProductFunction, incomplete_theta, moment_rhs
from .lattice import LatticeBasis, RegionSpec, ball_volume, count_in_region, primitive_sqnorms
from .sampling import HaarSampler, shard_seeds
from .special import zeta_c

__all__ = [
    "ExperimentReport",
    "DiscrepancyRecord",
    "DilationScan",
    "SchmidtResult",
    "run_sharded",
    "mc_moments",
    "discrepancy_meansquare",
    "loglog_slope",
    "dilation_scan",
    "unit_offcenter_ball",
    "schmidt_annuli",
    "schmidt_dyadic",
    "schmidt_bound",
]

DEFAULT_SHARD = 1000


@dataclass
class ExperimentReport:
    """Outcome of one Monte-Carlo comparison.

    ``kind == "equality"`` passes when ``|estimate - oracle| <= max(tolerance, 3 stderr)``;
    ``kind == "inequality"`` passes when ``estimate <= bound (1 + 3 stderr / estimate)``.
    """

    name: str
    estimate: float
    stderr: float
    oracle: Optional[float]
    samples: int
    seed: int
    kind: str = "equality"
    tolerance: float = 0.0
    bound: Optional[float] = None
    approximate: bool = False
    wall_time: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def verdict(self) -> bool:
        if self.kind == "equality":
            return abs(self.estimate - self.oracle) <= max(self.tolerance, 3 * self.stderr)
        rel = self.stderr / abs(self.estimate) if self.estimate else 0.0
        return self.estimate <= self.bound * (1 + 3 * rel)

    @property
    def deviation(self) -> Optional[float]:
        return None if self.oracle is None else self.estimate - self.oracle

    def to_dict(self) -> dict:
        d = asdict(self)
        d["verdict"] = "pass" if self.verdict else "fail"
        d["deviation"] = self.deviation
        d["provenance"] = "monte-carlo"
        return d


@dataclass
class DiscrepancyRecord:
    """Counts and discrepancies of one lattice in one region."""

    volume: float
    D: float
    D_pr: float
    count: int
    count_pr: int
    t: float = 1.0


def _mean_se(x: np.ndarray) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        return float(x.mean()), math.inf
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))


def _shard_values(task: Callable, sampler: HaarSampler, item) -> np.ndarray:
    seq, size = item
    rng = np.random.default_rng(seq)
    G = sampler.draw(size, rng)
    return np.asarray([task(g) for g in G])


def run_sharded(task: Callable, sampler: HaarSampler, total: int, *, shard_size: int = DEFAULT_SHARD,
                workers: int = 1) -> np.ndarray:
    """Evaluate ``task(g)`` on ``total`` sampled bases; rows stacked in shard order.

    ``task`` must be picklable (a module-level function or a
    :func:`functools.partial` of one) when ``workers > 1``.
    """
    items = shard_seeds(sampler.seed, total, shard_size)
    job = partial(_shard_values, task, sampler)
    if workers <= 1 or len(items) == 1:
        parts = [job(it) for it in items]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, items))
    return np.concatenate(parts, axis=0)


# ---------------------------------------------------------------------------
# moments


def _theta_value(f: ProductFunction, cutoff: float, g) -> complex:
    return incomplete_theta(f, g, cutoff=cutoff)


def mc_moments(f: ProductFunction, sampler: HaarSampler, N: int, *, rhs: Optional[MomentReport] = None,
               tolerance: float = 0.0, cutoff: float = 1e-10, shard_size: int = DEFAULT_SHARD,
               workers: int = 1, name: str = "moment") -> tuple[ExperimentReport, ExperimentReport]:
    """Sample means of ``F_f`` and ``|F_f|^2`` against :func:`moment_rhs`.

    Parameters
    ----------
    tolerance : float
        Relative tolerance added to the ``3 sigma`` acceptance window
        (used for the approximate sampler).
    """
    if f.n != sampler.n:
        raise ValueError("sampler and function live in different dimensions")
    start = time.perf_counter()
    rhs = moment_rhs(f) if rhs is None else rhs
    F = run_sharded(partial(_theta_value, f, cutoff), sampler, N, shard_size=shard_size, workers=workers)
    wall = time.perf_counter() - start
    F = F.real if np.allclose(np.imag(F), 0.0) else F
    m1, s1 = _mean_se(np.real(F))
    m2, s2 = _mean_se(np.abs(F) ** 2)
    o1, o2 = rhs.first_rhs.real, rhs.second_rhs.real
    common = dict(samples=N, seed=sampler.seed, approximate=sampler.approximate, wall_time=wall)
    first = ExperimentReport(f"{name}:first", m1, s1, o1, tolerance=tolerance * abs(o1), **common)
    second = ExperimentReport(f"{name}:second", m2, s2, o2, tolerance=tolerance * abs(o2), **common)
    return first, second


# ---------------------------------------------------------------------------
# mean-square discrepancy


def _annulus_counts(regions: Sequence[RegionSpec], g) -> np.ndarray:
    b = LatticeBasis(g)
    out = []
    for reg in regions:
        out.extend(count_in_region(b, reg))
    return np.asarray(out, dtype=float)


def discrepancy_bounds(n: int, vol: float) -> tuple[float, float]:
    """Upper bounds for the mean squares of ``D_pr`` and ``D`` (the latter infinite for ``n = 1``)."""
    z2n = zeta_c(2 * n).real
    reg = math.inf if n == 1 else 4 * zeta_c(n).real ** 2 / (z2n * vol)
    return 4 * z2n / vol, reg


def discrepancy_meansquare(regions: Sequence[RegionSpec], sampler: HaarSampler, N: int, *,
                           shard_size: int = DEFAULT_SHARD, workers: int = 1):
    """Mean squares of ``D_pr`` and ``D`` for each region, sharing one lattice sample.

    Returns
    -------
    list of (ExperimentReport, ExperimentReport)
        ``(primitive, regular)`` for each region.
    """
    n = sampler.n
    dim = 2 * n
    for reg in regions:
        if reg.kind == "ball" and reg.center is None:
            raise ValueError("region must be bounded away from the origin")
    start = time.perf_counter()
    C = run_sharded(partial(_annulus_counts, list(regions)), sampler, N, shard_size=shard_size, workers=workers)
    wall = time.perf_counter() - start
    z2n = zeta_c(2 * n).real
    out = []
    for i, reg in enumerate(regions):
        vol = reg.volume(dim)
        D = C[:, 2 * i] / vol - 1.0
        Dpr = z2n * C[:, 2 * i + 1] / vol - 1.0
        b_pr, b_all = discrepancy_bounds(n, vol)
        common = dict(samples=N, seed=sampler.seed, kind="inequality", approximate=sampler.approximate,
                      wall_time=wall, oracle=None)
        m, s = _mean_se(Dpr**2)
        rp = ExperimentReport(f"D_pr^2 vol={vol:.4g}", m, s, bound=b_pr, extra={"volume": vol}, **common)
        m, s = _mean_se(D**2)
        ra = ExperimentReport(f"D^2 vol={vol:.4g}", m, s, bound=b_all, extra={"volume": vol}, **common)
        out.append((rp, ra))
    return out


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


# ---------------------------------------------------------------------------
# dilation scan


def unit_offcenter_ball(n: int, offset: float = 1.5) -> RegionSpec:
    """Unit-volume ball in ``R^(2n)`` centred at ``offset`` radii along ``e_1``.

    For ``offset > 1`` it avoids the origin and is a difference of two
    star-shaped sets without being star-shaped itself.
    """
    a = (1.0 / ball_volume(1.0, 2 * n)) ** (1.0 / (2 * n))
    c = np.zeros(2 * n)
    c[0] = offset * a
    return RegionSpec.ball(a, center=c)


@dataclass
class DilationScan:
    """Discrepancies of one lattice along a dilation grid.

    ``onset`` is the smallest grid value beyond which neither ``D`` nor
    ``D_pr`` exceeds ``log(t)^2 / t^n`` (``None`` if the last point violates).
    """

    t: np.ndarray
    records: list
    bound: np.ndarray
    onset: Optional[float]


def _onset(t: np.ndarray, violated: np.ndarray) -> Optional[float]:
    if not violated.any():
        return float(t[0])
    last = int(np.nonzero(violated)[0][-1])
    return None if last == len(t) - 1 else float(t[last + 1])


def _dilation_one(region: RegionSpec, t_grid: np.ndarray, g) -> np.ndarray:
    b = LatticeBasis(g)
    out = []
    for t in t_grid:
        reg = RegionSpec.ball(region.r2 * t, center=region.center * t)
        out.append(count_in_region(b, reg))
    return np.asarray(out, dtype=float).ravel()


def dilation_scan(region: RegionSpec, sampler: HaarSampler, lattices: int, t_grid: Sequence[float], *,
                  workers: int = 1) -> list[DilationScan]:
    """Scan ``D(L, tB)`` and ``D_pr(L, tB)`` over ``t_grid`` for sampled lattices ``L``.

    Parameters
    ----------
    region : RegionSpec
        An off-centre ball of volume 1 that does not contain the origin.
    """
    n = sampler.n
    dim = 2 * n
    if region.kind != "ball" or region.center is None:
        raise ValueError("dilation_scan expects an off-centre ball")
    if np.linalg.norm(region.center) <= region.r2:
        raise ValueError("dilates of the region contain a neighbourhood of the origin")
    if abs(region.volume(dim) - 1.0) > 1e-9:
        raise ValueError("region must have unit volume")
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid <= 1):
        raise ValueError("dilation factors must exceed 1")
    C = run_sharded(partial(_dilation_one, region, t_grid), sampler, lattices, shard_size=lattices,
                    workers=workers)
    z2n = zeta_c(2 * n).real
    bound = np.log(t_grid) ** 2 / t_grid**n
    scans = []
    for row in C:
        counts = row.reshape(-1, 2)
        vol = t_grid**dim
        D = np.abs(counts[:, 0] / vol - 1)
        Dpr = np.abs(z2n * counts[:, 1] / vol - 1)
        recs = [DiscrepancyRecord(float(v), float(d), float(dp), int(c[0]), int(c[1]), float(t))
                for v, d, dp, c, t in zip(vol, D, Dpr, counts, t_grid)]
        violated = (D > bound) | (Dpr > bound)
        scans.append(DilationScan(t_grid, recs, bound, _onset(t_grid, violated)))
    return scans


# ---------------------------------------------------------------------------
# Schmidt dyadic scheme


def schmidt_annuli(n: int, T: int, r0: float = 0.5) -> np.ndarray:
    """Outer radii ``r_N`` (``N = 0 .. 2^T``) of nested annuli ``r0 < |x| <= r_N`` of volume ``N``."""
    N = np.arange(2**T + 1)
    unit = ball_volume(1.0, 2 * n)
    return (r0 ** (2 * n) + N / unit) ** (1.0 / (2 * n))


def schmidt_bound(n: int, T: int) -> float:
    """``4/zeta(2n) (T + 1) 2^T``."""
    return 4.0 / zeta_c(2 * n).real * (T + 1) * 2.0**T


def _dyadic_pairs(T: int):
    for j in range(T + 1):
        step = 2**j
        for i in range(2 ** (T - j)):
            yield i * step, (i + 1) * step


def _schmidt_one(n: int, T: int, r0: float, g) -> np.ndarray:
    radii = schmidt_annuli(n, T, r0)
    sq = primitive_sqnorms(LatticeBasis(g), float(radii[-1]))
    sq = np.sort(sq)
    counts = np.searchsorted(sq, radii**2, side="right") - np.searchsorted(sq, r0 * r0, side="right")
    N = np.arange(radii.size)
    S = counts - N / zeta_c(2 * n).real
    ksum = sum((S[b] - S[a]) ** 2 for a, b in _dyadic_pairs(T))
    return np.concatenate([[ksum], S])


@dataclass
class SchmidtResult:
    """Dyadic mean-square estimate and per-lattice ``S_N`` profiles."""

    report: ExperimentReport
    profiles: np.ndarray
    onsets: list


def schmidt_dyadic(sampler: HaarSampler, N: int, T: int = 8, *, r0: float = 0.5,
                   shard_size: int = DEFAULT_SHARD, workers: int = 1) -> SchmidtResult:
    """Estimate ``E sum_{K_T} |S_{N2} - S_{N1}|^2`` and compare with the dyadic bound.

    ``S_N = #(primitive vectors in B_N) - N / zeta(2n)``.  The profile onset of
    a lattice is the least ``N >= 2`` beyond which ``|S_N| <= sqrt(N) log(N)^2``.
    """
    if T > 14:
        raise ValueError("T must be at most 14")
    start = time.perf_counter()
    rows = run_sharded(partial(_schmidt_one, sampler.n, T, r0), sampler, N, shard_size=shard_size,
                       workers=workers)
    wall = time.perf_counter() - start
    m, s = _mean_se(rows[:, 0])
    bound = schmidt_bound(sampler.n, T)
    rep = ExperimentReport(f"schmidt T={T}", m, s, None, N, sampler.seed, kind="inequality", bound=bound,
                           approximate=sampler.approximate, wall_time=wall)
    profiles = rows[:, 1:]
    Ns = np.arange(profiles.shape[1])
    mask = Ns >= 2
    env = np.sqrt(Ns[mask]) * np.log(Ns[mask]) ** 2
    onsets = [_onset(Ns[mask].astype(float), np.abs(p[mask]) > env) for p in profiles]
    return SchmidtResult(rep, profiles, onsets)
