import warnings

import mpmath
import numpy as np
import pytest
import sympy as sp
from numpy.testing import assert_allclose

from siegel_lab import harmonic as hm
from siegel_lab.eisenstein import (
    ProductFunction,
    TailTooLarge,
    constant_term_closed,
    constant_term_direct,
    eisenstein_series,
    epstein_sum,
    incomplete_theta,
    iota_apply,
    iota_transform,
    isometry_ratio,
    moment_rhs,
    period_closed,
    period_direct_n1,
    theta_mellin,
    z_on_line,
)
from siegel_lab.lattice import siegel_transform
from siegel_lab.mellin import LogGaussian, SlowDecayWarning, YInterval, ZeroPair, pairing_y_side
from siegel_lab.special import sphere_area, zeta_c
from siegel_lab.symplectic import a_y, random_symplectic, unipotent

mpmath.mp.dps = 25


def test_epstein_z4_closed_form():
    # sum over Z^4 \ 0 of |v|^{-s} = 8 (1 - 4^{1 - s/2}) zeta(s/2) zeta(s/2 - 1)
    for s in (6.0, 7.5):
        want = float(8 * (1 - mpmath.power(4, 1 - s / 2)) * mpmath.zeta(s / 2) * mpmath.zeta(s / 2 - 1))
        assert_allclose(epstein_sum(np.eye(4), s, 25.0).real, want, rtol=1e-5)
        assert_allclose(eisenstein_series(s, np.eye(4), R=25.0).real, want / zeta_c(s).real, rtol=1e-5)


def test_epstein_z2_closed_form():
    # sum over Z^2 \ 0 of |v|^{-s} = 4 zeta(s/2) beta(s/2)
    s = 4.0
    want = float(4 * mpmath.zeta(s / 2) * mpmath.dirichlet(s / 2, [0, 1, 0, -1]))
    assert_allclose(epstein_sum(np.eye(2), s, 200.0).real, want, rtol=1e-6)


def test_eisenstein_invariant_under_integer_change(rng):
    from siegel_lab.symplectic import symplectic_completion

    g = random_symplectic(2, rng, scale=0.3)
    gamma = symplectic_completion([2, -3, 5, 7]).astype(float)
    assert_allclose(eisenstein_series(6.5, gamma @ g, R=15), eisenstein_series(6.5, g, R=15), rtol=1e-10)


def test_eisenstein_domain():
    with pytest.raises(TailTooLarge):
        eisenstein_series(5.0, np.eye(4))


def test_eisenstein_typed_matches_primitive_sum(rng):
    g = random_symplectic(2, rng, scale=0.3)
    phi = hm.psi_11(2)
    s = 8.0
    direct = siegel_transform(lambda x: phi.evaluate(x) / np.sum(x * x, axis=1) ** ((s + 2) / 2), g, 12.0)
    assert_allclose(eisenstein_series(s, g, phi, R=12.0), direct, rtol=1e-12)


def test_constant_term_n1_against_direct():
    s, y = 4.5, 1.3
    ts = np.arange(32) / 32
    direct = np.mean([eisenstein_series(s, unipotent([t]) @ a_y(y, 1), R=150.0) for t in ts])
    assert_allclose(direct, constant_term_closed(s, None, y, 1), rtol=1e-5)


@pytest.mark.parametrize("s,y", [(6.0, 0.8), (8.0, 1.2)])
def test_constant_term_n2(s, y):
    m = np.array([[1.2, 0.3], [-0.4, (1 - 0.3 * 0.4) / 1.2]])
    d = constant_term_direct(s, m, y, grid=6, R=9.0)
    assert_allclose(d, constant_term_closed(s, m, y, 2), rtol=1e-3)


def test_constant_term_errors():
    with pytest.raises(ValueError):
        constant_term_direct(6.0, np.eye(4), 1.0)
    with pytest.raises(TailTooLarge):
        constant_term_direct(5.0, np.eye(2), 1.0)
    with pytest.raises(ValueError):
        constant_term_closed(6.0, np.eye(4), 1.0, 2)


@pytest.mark.parametrize("n", [1, 2])
def test_mellin_relation(n, rng):
    g = random_symplectic(n, rng, scale=0.3)
    f = ProductFunction(LogGaussian(b=2 * n + 3.0), n)
    assert_allclose(theta_mellin(f, g, 2 * n + 3.0, R=10.0), incomplete_theta(f, g), rtol=1e-6)


def test_incomplete_theta_matches_siegel_transform(rng):
    g = random_symplectic(2, rng)
    f = ProductFunction(LogGaussian(b=4.0), 2, hm.psi_11(2))
    R = f.support_radius(1e-8)
    assert_allclose(incomplete_theta(f, g, cutoff=1e-8), siegel_transform(f, g, R), rtol=1e-12)
    with pytest.raises(ValueError):
        incomplete_theta(lambda x: x[:, 0], g)


def test_product_function_validation():
    with pytest.raises(ValueError):
        ProductFunction(LogGaussian(), 2, hm.BidegreePolynomial.z(2, 1))
    with pytest.raises(ValueError):
        ProductFunction(LogGaussian(), 1, hm.psi_11(2))


def test_z_on_line_removable_point():
    assert_allclose(z_on_line(0, 1, np.array([0.0]))[0], -1)
    assert_allclose(z_on_line(2, 1, np.array([1e-6]))[0], -1, atol=1e-5)


@pytest.mark.parametrize("ang", [None, "z2", "zb2"])
@pytest.mark.parametrize("y", [0.7, 1.0, 1.6])
def test_period_n1(ang, y, rng):
    z = hm.BidegreePolynomial.z(1, 1)
    zb = hm.BidegreePolynomial.zbar(1, 1)
    phi = {None: None, "z2": z * z, "zb2": zb * zb}[ang]
    f = ProductFunction(LogGaussian(b=2.5, scale=1.1), 1, phi)
    u = rng.normal(size=2)
    u /= np.linalg.norm(u)
    assert_allclose(period_direct_n1(f, y, u), period_closed(f, y, u), rtol=1e-8)


def test_period_slow_family_warns():
    f = ProductFunction(YInterval(0.5, 1.0), 1)
    with pytest.warns(SlowDecayWarning):
        period_closed(f, 1.0, np.array([1.0, 0.0]))


def test_iota_involution():
    f = ProductFunction(LogGaussian(b=1.5), 2, hm.psi_11(2))
    v = iota_apply(f)
    back = iota_transform(v)
    t = np.linspace(-20, 20, 41)
    assert_allclose(back(2 + 1j * t), f.radial.transform(2 + 1j * t), atol=1e-12)


def test_iota_zero():
    f = ProductFunction(ZeroPair(), 2)
    assert isinstance(iota_apply(f).radial, ZeroPair)
    assert moment_rhs(f).second_rhs == 0


@pytest.mark.parametrize("pq", [(0, 0), (2, 0), (1, 1), (2, 2)])
def test_isometry(pq, rng):
    from siegel_lab.acceptance import random_harmonic

    ang = random_harmonic(2, *pq, rng)
    f = ProductFunction(LogGaussian(b=2.0, scale=0.9), 2, ang)
    assert_allclose(isometry_ratio(f), 1, atol=1e-9)
    assert_allclose(isometry_ratio(f, method="y-side"), 1, atol=1e-8)


def test_moment_rhs_first_moment_closed_form():
    rad = LogGaussian(b=3.0)
    r = moment_rhs(ProductFunction(rad, 1))
    assert_allclose(r.first_rhs, 2 * np.pi * rad.transform(2) / zeta_c(2).real, rtol=1e-12)
    assert_allclose(r.norm_sq, 2 * np.pi * pairing_y_side(rad, rad, 1), rtol=1e-8)


def test_moment_rhs_annulus_integral_is_volume():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SlowDecayWarning)
        r = moment_rhs(ProductFunction(YInterval(1 / 1.5, 2.0), 2))
    vol = np.pi**2 / 2 * (1.5**4 - 0.5**4)
    assert_allclose(r.integral, vol, rtol=1e-12)
    assert_allclose(r.norm_sq, vol, rtol=1e-9)


def test_moment_rhs_typed_first_moment_vanishes():
    r = moment_rhs(ProductFunction(LogGaussian(b=2.0), 2, hm.psi_22(2)))
    assert r.first_rhs == 0
    phi2 = float(sp.N(hm.sphere_inner(hm.psi_22(2), hm.psi_22(2))))
    assert_allclose(r.norm_sq, sphere_area(2) * pairing_y_side(LogGaussian(b=2.0), LogGaussian(b=2.0), 2) * phi2,
                    rtol=1e-8)
