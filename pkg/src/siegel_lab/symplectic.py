"""Symplectic group machinery.

Conventions
-----------
Matrices act on row vectors, ``v -> v @ g``.  The symplectic form is
``omega(x, x') = x @ Omega @ x'.T`` with ``Omega = [[0, J_n], [-J_n, 0]]`` and
``J_n`` the ``n x n`` exchange matrix, so coordinate ``j`` pairs with
coordinate ``2n + 1 - j`` (1-based) and ``omega(e_j, e_{2n+1-j}) = 1`` for
``j <= n``.

The complex coordinates ``z_j = x_j + i x_{2n+1-j}`` identify ``R^(2n)`` with
``C^n``; the Euclidean inner product and ``omega`` are the real and (minus the)
imaginary parts of the Hermitian product, so the orthogonal symplectic group
``K_n`` is the unitary group ``U(n)`` acting on the right.

Group elements used throughout:

* ``u_t`` (:func:`unipotent`) with parameters ``t = (t_2, ..., t_{2n})``,
* ``m~ = diag(1, m, 1)`` (:func:`levi`) for ``m`` in ``Sp(2n - 2, R)``,
* ``a_y = diag(y, I, 1/y)`` (:func:`a_y`),
* ``k`` in ``K_n``.

Every ``g`` factors as ``u_t m~ a_y k`` (:func:`iwasawa_split`) with ``y``
unique and equal to ``1 / |e_{2n} g|``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np
from scipy.linalg import expm
from scipy.stats import unitary_group

from . import kernels

__all__ = [
    "omega",
    "validate_symplectic",
    "y_of",
    "to_complex",
    "from_complex",
    "unitary_to_orthogonal",
    "orthogonal_to_unitary",
    "polar_point",
    "unipotent",
    "levi",
    "a_y",
    "IwasawaCoordinates",
    "iwasawa_split",
    "random_k",
    "lie_algebra_element",
    "random_lie_algebra",
    "random_symplectic",
    "symplectic_basis",
    "symplectic_completion",
    "symplectic_reduce",
    "is_integer_symplectic",
]


def omega(n: int) -> np.ndarray:
    """The ``2n x 2n`` form matrix ``[[0, J_n], [-J_n, 0]]``."""
    if n < 1:
        raise ValueError("n must be positive")
    J = np.fliplr(np.eye(n))
    Z = np.zeros((n, n))
    return np.block([[Z, J], [-J, Z]])


def _half_rank(M) -> int:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2:
        raise ValueError(f"expected a square matrix of even size, got shape {M.shape}")
    return M.shape[0] // 2


def validate_symplectic(M, tol: float = 1e-10) -> bool:
    """True when ``max |M Omega M^T - Omega| < tol``."""
    n = _half_rank(M)
    M = np.asarray(M, dtype=float)
    W = omega(n)
    return bool(np.max(np.abs(M @ W @ M.T - W)) < tol)


def is_integer_symplectic(M) -> bool:
    """Exact check that an integer matrix lies in ``Sp(2n, Z)``."""
    n = _half_rank(M)
    A = np.asarray(M, dtype=object)
    if not all(float(x).is_integer() for x in A.ravel()):
        return False
    A = np.vectorize(int, otypes=[object])(A)
    W = np.asarray(np.rint(omega(n)).astype(int), dtype=object)
    return bool(np.all(A.dot(W).dot(A.T) == W))


def y_of(g) -> float:
    """``y = 1 / |e_{2n} g|``, the ``A_n`` coordinate of ``g``."""
    last = np.asarray(g, dtype=float)[-1]
    norm = float(np.linalg.norm(last))
    if norm == 0.0:
        raise ValueError("last row of g is zero")
    return 1.0 / norm


def to_complex(x) -> np.ndarray:
    """Map real vectors (last axis ``2n``) to ``z_j = x_j + i x_{2n+1-j}``."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1] // 2
    return x[..., :n] + 1j * x[..., ::-1][..., :n]


def from_complex(z) -> np.ndarray:
    """Inverse of :func:`to_complex`."""
    z = np.asarray(z, dtype=complex)
    return np.concatenate([z.real, z.imag[..., ::-1]], axis=-1)


def unitary_to_orthogonal(U) -> np.ndarray:
    """Real ``2n x 2n`` matrix of the map ``z -> z @ U`` in ``x`` coordinates."""
    U = np.asarray(U, dtype=complex)
    n = U.shape[0]
    basis = to_complex(np.eye(2 * n))
    return from_complex(basis @ U)


def orthogonal_to_unitary(k) -> np.ndarray:
    """Inverse of :func:`unitary_to_orthogonal` for ``k`` in ``K_n``."""
    k = np.asarray(k, dtype=float)
    n = k.shape[0] // 2
    # rows e_1..e_n have z = e_j, so row j of U is z(e_j k)
    return to_complex(k[:n])


def _complete_unitary(first_row: np.ndarray) -> np.ndarray:
    """Unitary matrix whose first row is the given unit vector."""
    n = first_row.size
    rows = [first_row / np.linalg.norm(first_row)]
    for e in np.eye(n, dtype=complex):
        if len(rows) == n:
            break
        v = e.copy()
        for r in rows:
            v = v - np.vdot(r, v) * r
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            rows.append(v / nv)
    return np.array(rows)


def polar_point(x):
    """Polar coordinates of a nonzero vector.

    Parameters
    ----------
    x : array_like, shape (2n,)

    Returns
    -------
    y : float
        ``1 / |x|``.
    k : ndarray, shape (2n, 2n)
        Orthogonal symplectic matrix with last row ``x / |x|``, so that
        ``e_{2n} @ a_y(y) @ k == x``.
    """
    x = np.asarray(x, dtype=float)
    norm = float(np.linalg.norm(x))
    if norm == 0.0:
        raise ValueError("polar_point needs a nonzero vector")
    u = x / norm
    # z(e_{2n}) = i e_1, so row 1 of U must be -i z(u)
    U = _complete_unitary(-1j * to_complex(u))
    k = unitary_to_orthogonal(U)
    k[-1] = u  # exact by construction; remove rounding noise
    return 1.0 / norm, k


def unipotent(t) -> np.ndarray:
    """The unipotent ``u_t`` for ``t = (t_2, ..., t_{2n})``.

    First row ``(1, t', t_{2n})`` with ``t' = (t_2, ..., t_{2n-1})``; last
    column ``(t_{2n}, t'*, 1)`` with
    ``t'* = (t_{2n-1}, ..., t_{n+1}, -t_n, ..., -t_2)``.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.size % 2 == 0:
        raise ValueError("unipotent expects 2n - 1 parameters")
    n = (t.size + 1) // 2
    g = np.eye(2 * n)
    tp = t[:-1]
    g[0, 1:-1] = tp
    g[0, -1] = t[-1]
    if n > 1:
        half = n - 1
        star = np.concatenate([tp[half:][::-1], -tp[:half][::-1]])
        g[1:-1, -1] = star
    return g


def levi(m) -> np.ndarray:
    """Embed ``m`` in ``Sp(2n - 2)`` as ``diag(1, m, 1)``."""
    m = np.asarray(m, dtype=float)
    d = m.shape[0] + 2
    g = np.eye(d)
    g[1:-1, 1:-1] = m
    return g


def a_y(y: float, n: int) -> np.ndarray:
    """``diag(y, 1, ..., 1, 1/y)`` of size ``2n``."""
    if y <= 0:
        raise ValueError("y must be positive")
    g = np.eye(2 * n)
    g[0, 0] = y
    g[-1, -1] = 1.0 / y
    return g


@dataclass
class IwasawaCoordinates:
    """Coordinates ``g = u_t m~ a_y k``.

    Attributes
    ----------
    t : ndarray, shape (2n - 1,)
    m : ndarray, shape (2n - 2, 2n - 2)
        Empty for ``n = 1``.
    y : float
    k : ndarray, shape (2n, 2n)
    """

    t: np.ndarray
    m: np.ndarray
    y: float
    k: np.ndarray

    @property
    def n(self) -> int:
        return self.k.shape[0] // 2

    def assemble(self) -> np.ndarray:
        return unipotent(self.t) @ levi(self.m) @ a_y(self.y, self.n) @ self.k


def iwasawa_split(g) -> IwasawaCoordinates:
    """Factor ``g = u_t m~ a_y k``.

    ``y`` comes from the last row, ``k`` from :func:`polar_point` of the last
    row, and ``u_t m~ = g k^{-1} a_y^{-1}`` is read off blockwise.
    """
    g = np.asarray(g, dtype=float)
    n = _half_rank(g)
    y, k = polar_point(g[-1])
    h = g @ k.T @ a_y(1.0 / y, n)
    m = h[1:-1, 1:-1].copy()
    t = np.empty(2 * n - 1)
    t[-1] = h[0, -1]
    if n > 1:
        t[:-1] = np.linalg.solve(m.T, h[0, 1:-1])
    return IwasawaCoordinates(t=t, m=m, y=y, k=k)


def random_k(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random element of ``K_n``."""
    if n == 1:
        theta = rng.uniform(0.0, 2 * np.pi)
        U = np.array([[np.exp(1j * theta)]])
    else:
        U = unitary_group.rvs(n, random_state=rng)
    return unitary_to_orthogonal(U)


def lie_algebra_element(S) -> np.ndarray:
    """``X = S Omega`` for symmetric ``S``; ``expm(X)`` is symplectic."""
    S = np.asarray(S, dtype=float)
    n = _half_rank(S)
    S = 0.5 * (S + S.T)
    return S @ omega(n)


def random_lie_algebra(n: int, rng: np.random.Generator, size=None) -> np.ndarray:
    """Gaussian elements of ``sp(2n, R)``; entries of ``S`` are standard normal."""
    shape = () if size is None else (size,)
    A = rng.standard_normal(shape + (2 * n, 2 * n))
    S = (A + np.swapaxes(A, -1, -2)) / np.sqrt(2.0)
    return S @ omega(n)


def random_symplectic(n: int, rng: np.random.Generator, scale: float = 0.5) -> np.ndarray:
    """Random ``u_t m~ a_y k`` with moderate coordinates (for tests)."""
    t = rng.uniform(-1, 1, 2 * n - 1)
    m = expm(scale * random_lie_algebra(n - 1, rng)) if n > 1 else np.zeros((0, 0))
    y = float(np.exp(rng.uniform(-scale, scale)))
    return unipotent(t) @ levi(m) @ a_y(y, n) @ random_k(n, rng)


# --------------------------------------------------------------------------
# integer symplectic bases


def _egcd(a: int, b: int):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _bezout(c: list[int]):
    """Coefficients ``a`` with ``sum a_i c_i = gcd(c)``."""
    g = 0
    a = [0] * len(c)
    for i, ci in enumerate(c):
        if ci == 0:
            continue
        if g == 0:
            g = abs(ci)
            a[i] = 1 if ci > 0 else -1
            continue
        g2, x, y = _egcd(g, ci)
        a = [x * ai for ai in a]
        a[i] += y
        g = g2
    return g, a


def _row_basis(rows: list[list[int]]) -> list[list[int]]:
    """Integer basis of the lattice spanned by ``rows`` (echelon form)."""
    A = [list(r) for r in rows if any(r)]
    basis = []
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        while True:
            nz = [r for r in A if r[col] != 0]
            if len(nz) <= 1:
                break
            piv = min(nz, key=lambda r: abs(r[col]))
            for r in nz:
                if r is not piv:
                    q = r[col] // piv[col]
                    for j in range(ncols):
                        r[j] -= q * piv[j]
            A = [r for r in A if any(r)]
        if nz:
            basis.append(nz[0])
            A = [r for r in A if r is not nz[0]]
    return basis


def _form(W, x, y) -> int:
    return sum(x[i] * W[i][j] * y[j] for i in range(len(x)) if x[i] for j in range(len(y)) if y[j])


def _lll_int(vectors: list[list[int]], embedding: np.ndarray) -> list[list[int]]:
    """LLL-reduce integer coordinate vectors under a real embedding."""
    if len(vectors) <= 1:
        return vectors
    X = np.array(vectors, dtype=float)
    _, U = kernels.lll_reduce(np.ascontiguousarray(X @ embedding))
    Xi = np.array(vectors, dtype=object)
    return [list(map(int, row)) for row in U.astype(object).dot(Xi)]


def symplectic_basis(W, last=None, embedding=None) -> np.ndarray:
    """Integer change of basis putting an integral symplectic form in standard shape.

    Parameters
    ----------
    W : array_like of int, shape (2n, 2n)
        Antisymmetric unimodular integer matrix (the Gram matrix of ``omega``
        on some basis).
    last : array_like of int, optional
        Primitive vector that must become the last row of the result.
    embedding : ndarray, optional
        Real matrix whose rows embed the coordinate basis in Euclidean space.
        Complements are LLL-reduced under this embedding so the output stays
        short; defaults to the identity.

    Returns
    -------
    ndarray of int64
        ``P`` with ``P W P^T = Omega``; the last row equals ``last`` if given.
    """
    Wl = [[int(round(float(v))) for v in row] for row in np.asarray(W)]
    dim = len(Wl)
    if dim % 2 or any(Wl[i][j] != -Wl[j][i] for i in range(dim) for j in range(dim)):
        raise ValueError("W must be an antisymmetric matrix of even size")
    emb = np.eye(dim) if embedding is None else np.asarray(embedding, dtype=float)
    E = [[int(i == j) for j in range(dim)] for i in range(dim)]
    firsts, lasts = [], []
    pending = None if last is None else [int(v) for v in np.asarray(last).ravel()]
    if pending is not None:
        if len(pending) != dim:
            raise ValueError("last has the wrong length")
        g = 0
        for v in pending:
            g = gcd(g, v)
        if g != 1:
            raise ValueError("last must be a primitive integer vector")
    while E:
        if pending is not None:
            v, pending = pending, None
        else:
            v = E[0]
        c = [_form(Wl, e, v) for e in E]
        unit = [i for i, ci in enumerate(c) if abs(ci) == 1]
        if unit:
            norms = [float(np.linalg.norm(np.array(E[i], dtype=float) @ emb)) for i in unit]
            i = unit[int(np.argmin(norms))]
            w = [c[i] * x for x in E[i]]
        else:
            g, a = _bezout(c)
            if g != 1:
                raise ValueError("form is not unimodular on this lattice")
            w = [sum(a[i] * E[i][j] for i in range(len(E))) for j in range(dim)]
        # project the basis onto the omega-complement of span(v, w)
        images = []
        for x in E:
            xw, xv = _form(Wl, x, w), _form(Wl, x, v)
            images.append([x[j] + xw * v[j] - xv * w[j] for j in range(dim)])
        E = _lll_int(_row_basis(images), emb) if len(E) > 2 else []
        firsts.append(w)
        lasts.append(v)
    P = np.array(firsts + lasts[::-1], dtype=np.int64)
    return P


def symplectic_completion(v) -> np.ndarray:
    """An element of ``Sp(2n, Z)`` whose last row is the primitive vector ``v``.

    The result is deterministic in ``v``.
    """
    v = np.asarray(v).ravel()
    n = v.size // 2
    if v.size != 2 * n or n < 1:
        raise ValueError("v must have even length")
    W = np.rint(omega(n)).astype(int)
    return symplectic_basis(W, last=v)


def symplectic_reduce(g):
    """Replace ``g`` by a shorter symplectic basis of the same lattice.

    Returns
    -------
    gamma : ndarray of int64
        Element of ``Sp(2n, Z)``.
    g_new : ndarray
        ``gamma @ g``.
    """
    g = np.ascontiguousarray(g, dtype=float)
    n = _half_rank(g)
    b, U = kernels.lll_reduce(g)
    Wf = b @ omega(n) @ b.T
    W = np.rint(Wf)
    if np.max(np.abs(Wf - W)) > 1e-6:
        raise ValueError("g is not symplectic to working precision")
    P = symplectic_basis(W, embedding=b)
    gamma = P @ U
    return gamma, gamma @ g
