import itertools
from math import gcd

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal
from scipy.linalg import expm

from siegel_lab.lattice import LatticeBasis, RegionSpec, count_in_region
from siegel_lab.symplectic import (
    a_y,
    from_complex,
    is_integer_symplectic,
    iwasawa_split,
    levi,
    omega,
    orthogonal_to_unitary,
    polar_point,
    random_k,
    random_lie_algebra,
    random_symplectic,
    symplectic_basis,
    symplectic_completion,
    symplectic_reduce,
    to_complex,
    unipotent,
    unitary_to_orthogonal,
    validate_symplectic,
    y_of,
)


def test_omega_pairs_j_with_mirror():
    W = omega(2)
    assert W[0, 3] == 1 and W[1, 2] == 1 and W[3, 0] == -1
    assert_array_equal(W, -W.T)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_building_blocks_are_symplectic(n, rng):
    t = rng.normal(size=2 * n - 1)
    assert validate_symplectic(unipotent(t))
    assert validate_symplectic(a_y(1.7, n))
    assert validate_symplectic(random_k(n, rng))
    if n > 1:
        m = expm(0.3 * random_lie_algebra(n - 1, rng))
        assert validate_symplectic(levi(m))
    assert validate_symplectic(expm(0.5 * random_lie_algebra(n, rng)), 1e-9)


def test_complex_coordinates_roundtrip(rng):
    x = rng.normal(size=(5, 6))
    assert_allclose(from_complex(to_complex(x)), x)
    # z(e_{2n}) = i e_1
    assert_allclose(to_complex(np.eye(4)[3]), [1j, 0])


def test_k_is_unitary(rng):
    k = random_k(3, rng)
    U = orthogonal_to_unitary(k)
    assert_allclose(U @ U.conj().T, np.eye(3), atol=1e-12)
    assert_allclose(unitary_to_orthogonal(U), k, atol=1e-12)
    assert_allclose(k @ k.T, np.eye(6), atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_polar_point(n, rng):
    x = rng.normal(size=2 * n)
    y, k = polar_point(x)
    assert_allclose(y, 1 / np.linalg.norm(x))
    assert_allclose(np.eye(2 * n)[-1] @ a_y(y, n) @ k, x, atol=1e-12)
    assert validate_symplectic(k)
    with pytest.raises(ValueError):
        polar_point(np.zeros(2 * n))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_iwasawa_roundtrip(n, rng):
    g = random_symplectic(n, rng)
    c = iwasawa_split(g)
    assert_allclose(c.assemble(), g, atol=1e-12)
    assert_allclose(c.y, y_of(g))


def test_unipotent_action_on_vectors(rng):
    # v u_t m a_y = (v1 y, (v1 t' + v_M) m, (v1 t_4 + v_M t'* + v_4) / y)
    t = rng.normal(size=3)
    m = expm(0.3 * random_lie_algebra(1, rng))
    y = 1.3
    v = rng.normal(size=4)
    g = unipotent(t) @ levi(m) @ a_y(y, 2)
    tstar = np.array([t[1], -t[0]])
    want = np.concatenate([[v[0] * y], (v[0] * t[:2] + v[1:3]) @ m, [(v[0] * t[2] + v[1:3] @ tstar + v[3]) / y]])
    assert_allclose(v @ g, want, atol=1e-12)


def test_primitive_vectors_complete_exactly():
    count = 0
    for v in itertools.product(range(-3, 4), repeat=4):
        if 0 < sum(c * c for c in v) <= 12 and gcd(*v) == 1:
            gamma = symplectic_completion(v)
            assert is_integer_symplectic(gamma)
            assert list(gamma[-1]) == list(v)
            count += 1
    assert count > 300


@given(st.lists(st.integers(-50, 50), min_size=6, max_size=6))
def test_completion_property(v):
    g = 0
    for c in v:
        g = gcd(g, c)
    if g != 1:
        with pytest.raises(ValueError):
            symplectic_completion(v)
        return
    gamma = symplectic_completion(v)
    assert is_integer_symplectic(gamma)
    assert list(gamma[-1]) == v


def test_symplectic_basis_of_scrambled_form(rng):
    A = np.eye(4, dtype=np.int64)
    for _ in range(6):
        i, j = rng.choice(4, 2, replace=False)
        A[i] += int(rng.integers(-3, 4)) * A[j]
    W = A @ np.rint(omega(2)).astype(np.int64) @ A.T
    P = symplectic_basis(W)
    assert_array_equal(P @ W @ P.T, np.rint(omega(2)))


def test_is_integer_symplectic_rejects():
    assert not is_integer_symplectic(np.diag([2, 1, 1, 0.5]))
    assert is_integer_symplectic(np.eye(4, dtype=int))


def test_symplectic_reduce_preserves_lattice(rng):
    g0 = random_symplectic(2, rng, scale=0.3)
    gamma0 = symplectic_completion([3, -7, 11, 5]).astype(float)
    gamma0 = gamma0 @ symplectic_completion([1, 13, -4, 9]).astype(float)
    g = gamma0 @ g0
    gamma, g2 = symplectic_reduce(g)
    assert is_integer_symplectic(gamma)
    assert_allclose(gamma @ g, g2, atol=1e-9)
    assert np.linalg.norm(g2) <= np.linalg.norm(g)
    reg = RegionSpec.ball(2.0)
    assert count_in_region(LatticeBasis(g), reg) == count_in_region(LatticeBasis(g2), reg)


def test_symplectic_reduce_well_conditioned_input(rng):
    g = random_symplectic(2, rng, scale=0.1)
    _, g2 = symplectic_reduce(g)
    assert validate_symplectic(g2, 1e-9)
    assert np.linalg.norm(g2) <= np.linalg.norm(g) + 1e-9


def test_validate_symplectic_shape_error():
    with pytest.raises(ValueError):
        validate_symplectic(np.eye(3))
