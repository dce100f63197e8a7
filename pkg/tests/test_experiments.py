import math
from functools import partial

import numpy as np
import pytest
from numpy.testing import assert_allclose

from siegel_lab.eisenstein import ProductFunction, moment_rhs
from siegel_lab.experiments import (
    ExperimentReport,
    _dyadic_pairs,
    _onset,
    discrepancy_bounds,
    discrepancy_meansquare,
    dilation_scan,
    loglog_slope,
    mc_moments,
    run_sharded,
    schmidt_annuli,
    schmidt_bound,
    schmidt_dyadic,
    unit_offcenter_ball,
)
from siegel_lab.lattice import RegionSpec, ball_volume
from siegel_lab.mellin import LogGaussian
from siegel_lab.sampling import HaarSampler
from siegel_lab.special import zeta_c

FAST_WALK = dict(burn_in=8, reduce_every=4)


def _trace(g):
    return float(np.trace(g))


def test_report_verdicts():
    eq = ExperimentReport("a", 1.05, 0.01, 1.0, 100, 0, tolerance=0.0)
    assert not eq.verdict
    assert ExperimentReport("a", 1.02, 0.01, 1.0, 100, 0).verdict
    assert ExperimentReport("a", 1.05, 0.01, 1.0, 100, 0, tolerance=0.06).verdict
    ineq = ExperimentReport("b", 1.1, 0.05, None, 100, 0, kind="inequality", bound=1.0)
    assert ineq.verdict
    assert not ExperimentReport("b", 2.0, 0.05, None, 100, 0, kind="inequality", bound=1.0).verdict
    d = eq.to_dict()
    assert d["verdict"] == "fail" and d["provenance"] == "monte-carlo"
    assert_allclose(d["deviation"], 0.05)


def test_run_sharded_independent_of_workers():
    s = HaarSampler(2, seed=4, **FAST_WALK)
    a = run_sharded(_trace, s, 7, shard_size=3, workers=1)
    b = run_sharded(_trace, s, 7, shard_size=3, workers=2)
    assert a.shape == (7,)
    assert np.array_equal(a, b)


def test_mc_moments_exact_sampler():
    f = ProductFunction(LogGaussian(b=3.0), 1)
    s = HaarSampler.default(1, seed=2)
    first, second = mc_moments(f, s, 20_000, shard_size=5000)
    rhs = moment_rhs(f)
    assert first.oracle == pytest.approx(rhs.first_rhs.real)
    assert first.verdict and second.verdict
    assert not first.approximate


def test_mc_moments_dimension_mismatch():
    with pytest.raises(ValueError):
        mc_moments(ProductFunction(LogGaussian(), 2), HaarSampler.default(1), 10)


def test_discrepancy_bounds():
    b_pr, b_all = discrepancy_bounds(2, 100.0)
    assert_allclose(b_pr, 4 * zeta_c(4).real / 100)
    # 4 zeta(2)^2 / zeta(4) = 10 exactly
    assert_allclose(b_all, 0.1, rtol=1e-12)
    assert discrepancy_bounds(1, 10.0)[1] == math.inf


def test_discrepancy_n1_primitive_inequality():
    r2 = math.sqrt(100 / (math.pi * 0.75))
    reg = RegionSpec.annulus(r2 / 2, r2)
    assert_allclose(reg.volume(2), 100)
    [(rp, ra)] = discrepancy_meansquare([reg], HaarSampler.default(1, seed=1), 10_000, shard_size=5000)
    assert rp.verdict
    assert rp.kind == "inequality" and ra.bound == math.inf


def test_loglog_slope():
    x = np.array([10.0, 100.0, 1000.0])
    assert_allclose(loglog_slope(x, 3 / x), -1)


def test_unit_offcenter_ball():
    for n in (1, 2):
        reg = unit_offcenter_ball(n)
        assert_allclose(reg.volume(2 * n), 1)
        assert_allclose(np.linalg.norm(reg.center), 1.5 * reg.r2)


def test_dilation_preconditions():
    s = HaarSampler(2, **FAST_WALK)
    with pytest.raises(ValueError):
        dilation_scan(RegionSpec.ball(1.0), s, 2, [5.0])
    with pytest.raises(ValueError):
        dilation_scan(unit_offcenter_ball(2, offset=0.5), s, 2, [5.0])
    big = RegionSpec.ball(2.0, center=np.array([5.0, 0, 0, 0]))
    with pytest.raises(ValueError):
        dilation_scan(big, s, 2, [5.0])
    with pytest.raises(ValueError):
        dilation_scan(unit_offcenter_ball(2), s, 2, [0.5, 5.0])


def test_dilation_scan_small():
    s = HaarSampler(2, seed=1, **FAST_WALK)
    scans = dilation_scan(unit_offcenter_ball(2), s, 2, [5.0, 10.0])
    assert len(scans) == 2
    for sc in scans:
        assert len(sc.records) == 2
        rec = sc.records[1]
        assert_allclose(rec.volume, 10.0**4)
        assert rec.count_pr <= rec.count
        assert_allclose(rec.D, abs(rec.count / rec.volume - 1))


def test_onset():
    t = np.array([1.0, 2.0, 3.0, 4.0])
    assert _onset(t, np.array([False] * 4)) == 1.0
    assert _onset(t, np.array([True, False, True, False])) == 4.0
    assert _onset(t, np.array([False, False, False, True])) is None


def test_schmidt_geometry():
    n, T = 2, 5
    r = schmidt_annuli(n, T)
    unit = ball_volume(1.0, 4)
    vols = unit * (r**4 - 0.5**4)
    assert_allclose(vols, np.arange(2**T + 1), atol=1e-9)
    pairs = list(_dyadic_pairs(T))
    assert len(pairs) == 2 ** (T + 1) - 1
    # each level tiles [0, 2^T]
    assert sum(b - a for a, b in pairs) == (T + 1) * 2**T
    assert_allclose(schmidt_bound(2, 3), 4 / zeta_c(4).real * 4 * 8)


def test_schmidt_dyadic_small():
    res = schmidt_dyadic(HaarSampler(2, seed=3, **FAST_WALK), 6, T=4)
    assert res.profiles.shape == (6, 17)
    assert_allclose(res.profiles[:, 0], 0)
    assert res.report.bound == schmidt_bound(2, 4)
    with pytest.raises(ValueError):
        schmidt_dyadic(HaarSampler(2), 2, T=15)
