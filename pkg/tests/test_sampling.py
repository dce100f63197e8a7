import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate, stats

from siegel_lab import sampling
from siegel_lab.sampling import (
    EXPECTED_INV_Y,
    HERMITE_BOUND_N1,
    ConditioningError,
    HaarSampler,
    check_basis,
    hecke_start,
    sample_modular_exact,
    sample_symplectic_walk,
    shard_seeds,
    y_marginal_cdf,
)


def test_expected_inverse_y_constant():
    # E[1/y] = 3/pi * int_{-1/2}^{1/2} int_{sqrt(1-x^2)}^inf y^{-3} dy dx
    val, _ = integrate.quad(lambda x: 3 / math.pi * 0.5 / (1 - x * x), -0.5, 0.5)
    assert_allclose(EXPECTED_INV_Y, val, rtol=1e-12)


def test_y_marginal_cdf_against_quadrature():
    dens = lambda x, y: 3 / math.pi / y**2
    for y0 in (0.9, 0.97, 1.0, 1.5, 4.0):
        tail, _ = integrate.dblquad(lambda y, x: dens(x, y), -0.5, 0.5,
                                    lambda x: max(y0, math.sqrt(1 - x * x)), lambda x: np.inf)
        assert_allclose(1 - y_marginal_cdf(y0), tail, rtol=1e-8)
    assert y_marginal_cdf(0.5) == 0.0


def test_exact_sampler_bases(rng):
    g, x, y = sample_modular_exact(2000, rng, return_xy=True)
    assert_allclose(np.linalg.det(g), 1.0, atol=1e-12)
    assert np.all(np.abs(x) <= 0.5)
    assert np.all(x * x + y * y >= 1 - 1e-12)
    # the first row is a shortest vector and obeys the Hermite bound
    shortest = np.linalg.norm(g[:, 0], axis=1)
    assert np.all(shortest <= HERMITE_BOUND_N1 + 1e-12)
    assert_allclose(shortest, 1 / np.sqrt(y))


def test_exact_sampler_distribution():
    rng = np.random.default_rng(5)
    _, x, y = sample_modular_exact(50_000, rng, return_xy=True)
    assert stats.kstest(y, y_marginal_cdf).pvalue > 0.01
    inv = 1 / y
    assert abs(inv.mean() - EXPECTED_INV_Y) < 4 * inv.std() / math.sqrt(inv.size)
    # x has density proportional to (1 - x^2)^{-1/2}
    xcdf = lambda t: (np.arcsin(np.clip(t, -0.5, 0.5)) + math.pi / 6) / (math.pi / 3)
    assert stats.kstest(x, xcdf).pvalue > 0.01


def test_hecke_start_is_symplectic(rng):
    for n in (2, 3):
        assert check_basis(hecke_start(n, rng))


def test_walk_bases_are_symplectic(rng):
    G = sample_symplectic_walk(2, 8, rng, burn_in=16, reduce_every=8)
    assert G.shape == (8, 4, 4)
    assert all(check_basis(g, 1e-9) for g in G)


def test_walk_rejects_bad_arguments(rng):
    with pytest.raises(ValueError):
        sample_symplectic_walk(1, 4, rng)
    with pytest.raises(ValueError):
        sample_symplectic_walk(2, 4, rng, reduce_every=0)


def test_walk_conditioning_error(rng, monkeypatch):
    monkeypatch.setattr(sampling, "_COND_LIMIT", 1e-3)
    with pytest.raises(ConditioningError):
        sample_symplectic_walk(2, 2, rng, burn_in=4, reduce_every=2)


def test_sampler_config_validation():
    with pytest.raises(ValueError):
        HaarSampler(2, kind="exact")
    with pytest.raises(ValueError):
        HaarSampler(2, kind="metropolis")
    assert HaarSampler.default(1).kind == "exact"
    assert HaarSampler.default(2).approximate


def test_sampler_reproducible():
    s = HaarSampler(2, burn_in=8, reduce_every=4, seed=3)
    a = s.draw(3, np.random.default_rng(1))
    b = s.draw(3, np.random.default_rng(1))
    assert np.array_equal(a, b)


@pytest.mark.parametrize("total,size", [(10, 3), (9, 3), (1, 100), (1000, 1000)])
def test_shard_seeds(total, size):
    shards = shard_seeds(7, total, size)
    assert sum(k for _, k in shards) == total
    assert all(0 < k <= size for _, k in shards)
    again = shard_seeds(7, total, size)
    assert [s.generate_state(2).tolist() for s, _ in shards] == [s.generate_state(2).tolist() for s, _ in again]
    with pytest.raises(ValueError):
        shard_seeds(7, total, 0)
