import itertools

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from siegel_lab import kernels
from siegel_lab.lattice import LatticeBasis

BACKENDS = [kernels.python_backend]
if kernels.compiled_backend is not None:
    BACKENDS.append(kernels.compiled_backend)


def _random_basis(rng, dim=4, spread=0.4):
    d = np.exp(rng.normal(0, spread, dim))
    d /= np.prod(d) ** (1 / dim)
    Q1, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
    Q2, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
    return Q1 @ np.diag(d) @ Q2


def _brute(g, R, center=None):
    inv = np.linalg.inv(g)
    c = np.zeros(g.shape[0]) if center is None else np.asarray(center)
    tau = c @ inv
    rad = R * np.linalg.norm(inv, axis=0)
    axes = [np.arange(np.floor(t - r) - 1, np.ceil(t + r) + 2) for t, r in zip(tau, rad)]
    C = np.array(list(itertools.product(*axes)), dtype=int)
    V = C @ g
    return {tuple(x) for x in C[np.sum((V - c) ** 2, axis=1) <= R * R]}


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.__name__.rsplit(".", 1)[-1])
def test_fp_enumerate_matches_brute_force(backend, rng):
    for _ in range(10):
        g = _random_basis(rng)
        q = LatticeBasis(g).fp_form()
        R = rng.uniform(0.8, 2.2)
        got = backend.fp_enumerate(q, np.zeros(4), R * R, 10**7)
        want = _brute(g, R)
        assert {tuple(x) for x in got} == want


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.__name__.rsplit(".", 1)[-1])
def test_fp_enumerate_off_center(backend, rng):
    g = _random_basis(rng)
    c = rng.normal(size=4)
    tau = np.linalg.solve(g.T, c)
    got = backend.fp_enumerate(LatticeBasis(g).fp_form(), tau, 1.7**2, 10**7)
    assert {tuple(x) for x in got} == _brute(g, 1.7, c)


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.__name__.rsplit(".", 1)[-1])
def test_fp_count_and_sqnorms_agree(backend, rng):
    g = _random_basis(rng)
    q = LatticeBasis(g).fp_form()
    X = backend.fp_enumerate(q, np.zeros(4), 4.0, 10**7)
    X = X[np.any(X != 0, axis=1)]
    prim = backend.primitive_mask(np.ascontiguousarray(X))
    total, nprim = backend.fp_count(q, np.zeros(4), -1.0, 4.0)
    assert total == len(X) and nprim == prim.sum()
    sq, p = backend.fp_sqnorms(q, 4.0, 10**7)
    assert len(sq) == len(X) and p.sum() == prim.sum()
    assert_allclose(np.sort(sq), np.sort(np.sum((X @ g) ** 2, axis=1)), rtol=1e-12)


def test_primitive_mask():
    X = np.array([[2, 4, 0, 0], [1, 0, 0, 0], [3, 5, 0, 0], [0, 0, -6, 9]], dtype=np.int64)
    assert_array_equal(kernels.primitive_mask(X), [False, True, True, False])


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.__name__.rsplit(".", 1)[-1])
def test_lll_reduces_and_is_unimodular(backend, rng):
    g = _random_basis(rng, spread=1.0)
    skew = np.eye(4)
    skew[0, 1:] = rng.integers(-30, 30, 3)
    bad = skew @ g
    b, U = backend.lll_reduce(np.ascontiguousarray(bad), 0.99)
    assert round(abs(np.linalg.det(U))) == 1
    assert_allclose(U @ bad, b, atol=1e-9)
    assert np.max(np.linalg.norm(b, axis=1)) <= np.max(np.linalg.norm(bad, axis=1))


def test_overflow_cap():
    q = LatticeBasis(np.eye(4)).fp_form()
    with pytest.raises(OverflowError):
        kernels.fp_enumerate(q, np.zeros(4), 25.0, 100)


@pytest.mark.skipif(kernels.compiled_backend is None, reason="compiled extension not built")
def test_backends_bit_identical(rng):
    cy, py = kernels.compiled_backend, kernels.python_backend
    for _ in range(5):
        g = _random_basis(rng)
        q = LatticeBasis(g).fp_form()
        assert_array_equal(cy.fp_enumerate(q, np.zeros(4), 3.0, 10**7), py.fp_enumerate(q, np.zeros(4), 3.0, 10**7))
        s1, p1 = cy.fp_sqnorms(q, 3.0, 10**7)
        s2, p2 = py.fp_sqnorms(q, 3.0, 10**7)
        assert_array_equal(s1, s2)
        assert_array_equal(p1, p2)
        b1, u1 = cy.lll_reduce(np.ascontiguousarray(g * 3), 0.99)
        b2, u2 = py.lll_reduce(np.ascontiguousarray(g * 3), 0.99)
        assert_array_equal(u1, u2)
        assert_array_equal(b1, b2)
