import numpy as np
import pytest
import sympy as sp
from numpy.testing import assert_allclose

from siegel_lab import harmonic as hm
from siegel_lab.harmonic import BidegreePolynomial as BP


@pytest.mark.parametrize("p,q", [(p, q) for p in range(5) for q in range(5)])
def test_dimension_n2(p, q):
    assert hm.harmonic_dimension(2, p, q) == p + q + 1


def test_dimension_other_n():
    # dim H^{p,q}(C^n) = dim P_{p,q} - dim P_{p-1,q-1}
    from math import comb

    for n in (1, 3):
        for p, q in [(0, 0), (1, 0), (2, 1), (2, 2)]:
            full = comb(n + p - 1, p) * comb(n + q - 1, q)
            lower = comb(n + p - 2, p - 1) * comb(n + q - 2, q - 1) if p and q else 0
            assert hm.harmonic_dimension(n, p, q) == full - lower


def test_factorial_formula_values():
    assert hm.dimension_factorial_formula(2, 1, 1) == 6
    assert hm.dimension_factorial_formula(2, 2, 2) == 120
    assert hm.dimension_factorial_formula(2, 0, 0) == 1
    assert hm.dimension_factorial_formula(1, 0, 0) is None


def test_polynomial_algebra():
    z1, zb2 = BP.z(2, 1), BP.zbar(2, 2)
    P = z1 * zb2
    assert P.bidegree == (1, 1)
    assert P.is_harmonic()
    assert not (z1 * BP.zbar(2, 1)).is_harmonic()
    assert (P - P).is_zero()
    with pytest.raises(ValueError):
        z1 + zb2
    x = np.array([[0.3, -1.2, 0.5, 0.7]])
    z = x[:, :2] + 1j * x[:, ::-1][:, :2]
    assert_allclose(P.evaluate(x), z[:, 0] * np.conj(z[:, 1]))
    assert_allclose(P.conj().evaluate(x), np.conj(P.evaluate(x)))


def test_laplacian_of_r2():
    # the real Laplacian of |x|^2 on R^(2n) is 4n
    assert hm.laplacian_apply(BP.r2(3)) == BP.constant(3, 12)


def test_basis_is_harmonic():
    for b in hm.harmonic_basis(2, 2, 2):
        assert b.is_harmonic() and b.bidegree == (2, 2)


@pytest.mark.parametrize("p,q", [(p, q) for p in range(5) for q in range(5)])
def test_raising_identities_exact(p, q):
    s = hm.s
    F = hm.h_family(2, p, q)
    assert hm.raising_apply("R20", F).equals(hm.h_family(2, p + 2, q).scale(-(s + p + q)))
    assert hm.raising_apply("R02", F).equals(hm.h_family(2, p, q + 2).scale(-(s + p + q)))


def test_raising_numeric_vs_finite_differences(rng):
    for p, q in [(0, 0), (1, 1), (3, 2), (4, 4)]:
        for sv in rng.uniform(0.5, 6, 3):
            x = rng.normal(size=(10, 4))
            f = lambda pts: hm.eval_h(sv, p, q, pts)
            for kind in ("R20", "R02", "AUX"):
                exact = hm.raising_apply(kind, hm.h_family(2, p, q)).evaluate(x, s_value=sv)
                fd = hm.raising_fd(kind, f, x)
                assert_allclose(fd, exact, rtol=1e-6, atol=1e-6)


def test_r20_on_h000():
    s = hm.s
    assert hm.raising_apply("R20", hm.h_family(2, 0, 0)).equals(hm.h_family(2, 2, 0).scale(-s))


def test_aux_decomposition():
    n = 2
    s = hm.s
    aux = hm.raising_apply("AUX", hm.h_family(n, 0, 2))
    expected = hm.RadialPower((s + 2) * hm.psi_22(n), -(s + 4) / 2) + hm.RadialPower(
        (n - s) * hm.psi_11(n), -(s + 2) / 2)
    assert aux.equals(expected)
    assert hm.psi_22(n).is_harmonic() and hm.psi_22(n).bidegree == (2, 2)
    assert hm.psi_11(n).is_harmonic() and hm.psi_11(n).bidegree == (1, 1)


def test_raising_operators_commute():
    F = hm.h_family(2, 1, 1)
    a = hm.raising_apply("R02", hm.raising_apply("R20", F))
    b = hm.raising_apply("R20", hm.raising_apply("R02", F))
    assert a.equals(b)


def test_unknown_operator():
    with pytest.raises(ValueError):
        hm.raising_apply("R11", hm.h_family(2, 0, 0))


def test_sphere_monomial_integral_exact():
    # probability measure on S^3: E|z1|^2 = 1/2, E|z1|^4 = 1/3, E|z1 z2|^2 = 1/6
    assert hm.sphere_monomial_integral((1, 0), (1, 0)) == sp.Rational(1, 2)
    assert hm.sphere_monomial_integral((2, 0), (2, 0)) == sp.Rational(1, 3)
    assert hm.sphere_monomial_integral((1, 1), (1, 1)) == sp.Rational(1, 6)
    assert hm.sphere_monomial_integral((1, 0), (0, 1)) == 0


def test_sphere_inner_vs_monte_carlo(rng):
    x = rng.normal(size=(400_000, 4))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    for P in (hm.psi_22(2), hm.psi_11(2), BP.z(2, 1) ** 2 + BP.z(2, 2) * BP.z(2, 1)):
        vals = np.abs(P.evaluate(x)) ** 2
        exact = float(sp.N(hm.sphere_inner(P, P)))
        se = vals.std() / np.sqrt(len(vals))
        assert abs(vals.mean() - exact) < 5 * se


def test_distinct_types_orthogonal():
    assert hm.sphere_inner(hm.psi_22(2), hm.psi_11(2)) == 0
    assert hm.sphere_inner(hm.psi_11(2), BP.constant(2)) == 0
