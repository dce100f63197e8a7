import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from siegel_lab.lattice import (
    EnumerationOverflow,
    LatticeBasis,
    RegionSpec,
    ball_volume,
    count_in_region,
    enumerate_ball,
    primitive_sqnorms,
    reduce_basis,
    siegel_transform,
    siegel_transform_coset,
)
from siegel_lab.symplectic import random_symplectic


def test_z4_counts():
    Z = LatticeBasis(np.eye(4))
    assert count_in_region(Z, RegionSpec.ball(1.5)) == (32, 32)
    assert count_in_region(Z, RegionSpec.ball(2.0)) == (88, 80)
    # closed box [-1, 1]^4 minus the origin
    assert count_in_region(Z, RegionSpec.box([-1] * 4, [1] * 4)) == (80, 80)


def test_annulus_boundary_convention():
    Z = LatticeBasis(np.eye(4))
    # r1 < |x| <= r2: norm 1 excluded at r1 = 1, norm sqrt(2) included at r2 = sqrt(2)
    assert count_in_region(Z, RegionSpec.annulus(1.0, np.sqrt(2.0))) == (24, 24)


def test_ball_volume():
    assert_allclose(ball_volume(1.0, 2), np.pi)
    assert_allclose(ball_volume(2.0, 4), np.pi**2 / 2 * 16)


def test_not_unimodular():
    with pytest.raises(ValueError):
        LatticeBasis(2 * np.eye(4))
    with pytest.raises(ValueError):
        LatticeBasis(np.eye(3))


def test_reduce_basis_transform(rng):
    g = random_symplectic(2, rng)
    red, U = reduce_basis(g)
    assert_allclose(U @ g, red.rows, atol=1e-10)
    assert red.reduced


def _brute_coeffs(g, R):
    inv = np.linalg.inv(g)
    b = np.floor(R * np.linalg.norm(inv, axis=0) + 1e-9).astype(int)
    C = np.array(list(itertools.product(*[range(-k, k + 1) for k in b])))
    V = C @ g
    keep = (np.sum(V * V, axis=1) <= R * R) & np.any(C != 0, axis=1)
    return {tuple(c) for c in C[keep]}


def test_enumerate_matches_brute(rng):
    for _ in range(15):
        g = random_symplectic(2, rng, scale=0.4)
        R = rng.uniform(1.0, 2.5)
        X, V, red = enumerate_ball(g, R)
        T = np.rint(red.rows @ np.linalg.inv(g)).astype(int)
        assert {tuple(c) for c in X @ T} == _brute_coeffs(g, R)
        assert_allclose(V, X @ red.rows)


def test_off_center_count_matches_enumeration(rng):
    g = random_symplectic(2, rng)
    c = np.array([1.0, -0.5, 0.3, 2.0])
    reg = RegionSpec.ball(1.2, center=c)
    X, V, _ = enumerate_ball(g, reg.bounding_radius + 0.01)
    want = int(reg.contains(V).sum())
    assert count_in_region(LatticeBasis(g), reg)[0] == want


def test_custom_region(rng):
    g = random_symplectic(2, rng)
    half = RegionSpec.custom(lambda x: (np.sum(x * x, axis=1) <= 4) & (x[:, 0] > 0), bounding_radius=2.0)
    full = count_in_region(LatticeBasis(g), RegionSpec.ball(2.0))
    got = count_in_region(LatticeBasis(g), half)
    # the ball is symmetric; x_0 = 0 has probability zero for a random basis
    assert 2 * got[0] == full[0] and 2 * got[1] == full[1]
    with pytest.raises(ValueError):
        half.volume(4)


def test_primitive_sqnorms(rng):
    g = random_symplectic(2, rng)
    sq, prim = primitive_sqnorms(g, 2.0, primitive_only=False)
    X, V, _ = enumerate_ball(g, 2.0)
    assert_allclose(np.sort(sq), np.sort(np.sum(V * V, axis=1)), rtol=1e-12)
    assert len(primitive_sqnorms(g, 2.0)) == prim.sum()


def test_cap():
    with pytest.raises(EnumerationOverflow):
        enumerate_ball(np.eye(4), 30.0, cap=1000)
    with pytest.raises(EnumerationOverflow):
        count_in_region(np.eye(4), RegionSpec.ball(30.0), cap=1000)


def test_siegel_transform_coset_agrees(rng):
    g = random_symplectic(2, rng, scale=0.3)
    f = lambda x: np.exp(-np.sum(x * x, axis=1)) * (1 + x[:, 0])
    R = 5.0
    assert_allclose(siegel_transform_coset(f, g, R), siegel_transform(f, g, R), rtol=1e-12)
    with pytest.raises(ValueError):
        siegel_transform_coset(f, np.diag([2.0, 1.0, 1.0, 0.5]) @ np.array(
            [[1, 0, 0, 0], [1, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1.0]]), R)


@given(st.floats(0.6, 2.4))
def test_count_monotone_in_radius(R):
    g = np.array([[1.0, 0.2, 0, 0], [0, 1.0, 0, 0], [0, 0, 1.0, 0], [0.1, 0, 0, 1.0]])
    a = count_in_region(g, RegionSpec.ball(R))
    b = count_in_region(g, RegionSpec.ball(R + 0.1))
    assert a[0] <= b[0] and a[1] <= b[1] and a[1] <= a[0]
    # the lattice is symmetric under v -> -v
    assert a[0] % 2 == 0 and a[1] % 2 == 0
