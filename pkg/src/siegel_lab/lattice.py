"""Lattice point enumeration, counting in regions and Siegel transforms.

A lattice is ``Z^{2n} g`` for a basis matrix ``g`` whose rows are the basis
vectors.  Enumeration reduces the basis (LLL) and runs a Fincke-Pohst search
on the Gram matrix; coefficient vectors are exact integers, so primitivity
(``gcd == 1``) is exact as well.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import gamma as _gamma

from . import kernels
from .symplectic import symplectic_completion, validate_symplectic

__all__ = [
    "DEFAULT_CAP",
    "EnumerationOverflow",
    "LatticeBasis",
    "RegionSpec",
    "reduce_basis",
    "enumerate_ball",
    "primitive_sqnorms",
    "count_in_region",
    "siegel_transform",
    "siegel_transform_coset",
    "ball_volume",
]

#: Largest number of vectors a single enumeration may return.
DEFAULT_CAP = 10**8
# relative slack on the search radius; points are re-filtered exactly
_SLACK = 1e-12


class EnumerationOverflow(RuntimeError):
    """The requested enumeration would exceed the configured cap."""


def ball_volume(r: float, dim: int) -> float:
    """Volume of the Euclidean ball of radius ``r`` in ``R^dim``."""
    return float(np.pi ** (dim / 2) / _gamma(dim / 2 + 1) * r**dim)


@dataclass
class LatticeBasis:
    """Row basis of a unimodular lattice in ``R^(2n)``.

    Attributes
    ----------
    rows : ndarray, shape (2n, 2n)
    reduced : bool
        Whether the rows are known to be LLL-reduced.
    """

    rows: np.ndarray
    reduced: bool = False
    _form: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        rows = np.ascontiguousarray(self.rows, dtype=float)
        if rows.ndim != 2 or rows.shape[0] != rows.shape[1] or rows.shape[0] % 2:
            raise ValueError("basis must be a square matrix of even size")
        det = abs(np.linalg.det(rows))
        if not abs(det - 1.0) < 1e-8:
            raise ValueError(f"basis is not unimodular (|det| = {det:.3g})")
        self.rows = rows

    @property
    def n(self) -> int:
        return self.rows.shape[0] // 2

    @property
    def dim(self) -> int:
        return self.rows.shape[0]

    def fp_form(self) -> np.ndarray:
        """Quadratic form in Fincke-Pohst shape (see ``_kernels.pyx``)."""
        if self._form is None:
            G = self.rows @ self.rows.T
            R = np.linalg.cholesky(G).T
            d = np.diag(R)
            q = R / d[:, None]
            q[np.diag_indices_from(q)] = d * d
            self._form = np.ascontiguousarray(q)
        return self._form

    def coordinates(self, x) -> np.ndarray:
        """Real coordinates ``tau`` with ``x = tau @ rows``."""
        return np.linalg.solve(self.rows.T, np.asarray(x, dtype=float))


def _as_basis(b) -> LatticeBasis:
    return b if isinstance(b, LatticeBasis) else LatticeBasis(np.asarray(b, dtype=float))


def reduce_basis(b, delta: float = 0.99):
    """LLL-reduce a lattice basis.

    Returns
    -------
    reduced : LatticeBasis
    U : ndarray of int64
        Unimodular matrix with ``reduced.rows == U @ b.rows``.
    """
    b = _as_basis(b)
    rows, U = kernels.lll_reduce(np.ascontiguousarray(b.rows), delta)
    if round(abs(np.linalg.det(U.astype(float)))) != 1:
        raise ValueError("reduction produced a singular transform")
    return LatticeBasis(rows, reduced=True), U


def _reduced(b) -> LatticeBasis:
    b = _as_basis(b)
    return b if b.reduced else reduce_basis(b)[0]


def _check_cap(R: float, dim: int, cap: int) -> None:
    predicted = ball_volume(R, dim)
    if predicted > cap:
        raise EnumerationOverflow(
            f"radius {R:g} would give about {predicted:.3g} vectors (cap {cap:.3g})"
        )


def enumerate_ball(b, R: float, *, center=None, cap: int = DEFAULT_CAP):
    """Nonzero lattice vectors with ``|x - center| <= R``.

    Parameters
    ----------
    b : LatticeBasis or array_like
    R : float
    center : array_like, optional
        Centre of the ball (origin by default).
    cap : int

    Returns
    -------
    coeffs : ndarray of int64, shape (k, 2n)
        Integer coefficient vectors with respect to the reduced basis.
    vectors : ndarray, shape (k, 2n)
    basis : LatticeBasis
        The reduced basis the coefficients refer to.
    """
    if R <= 0:
        raise ValueError("R must be positive")
    b = _reduced(b)
    _check_cap(R, b.dim, cap)
    tau = np.zeros(b.dim) if center is None else b.coordinates(center)
    try:
        X = kernels.fp_enumerate(b.fp_form(), np.ascontiguousarray(tau), R * R * (1 + _SLACK), cap)
    except OverflowError as exc:
        raise EnumerationOverflow(str(exc)) from None
    V = X.astype(float) @ b.rows
    c = np.zeros(b.dim) if center is None else np.asarray(center, dtype=float)
    keep = (np.sum((V - c) ** 2, axis=1) <= R * R) & np.any(X != 0, axis=1)
    return X[keep], V[keep], b


def primitive_sqnorms(b, R: float, *, cap: int = DEFAULT_CAP, primitive_only: bool = True):
    """Squared norms of (primitive) nonzero lattice vectors with norm ``<= R``.

    The fast path behind radial Siegel transforms; norms come from the
    Fincke-Pohst recursion rather than from explicit vectors.
    """
    b = _reduced(b)
    _check_cap(R, b.dim, cap)
    try:
        sq, prim = kernels.fp_sqnorms(b.fp_form(), R * R, cap)
    except OverflowError as exc:
        raise EnumerationOverflow(str(exc)) from None
    return sq[prim] if primitive_only else (sq, prim)


@dataclass
class RegionSpec:
    """A bounded region of ``R^(2n)``.

    Use the constructors :meth:`ball`, :meth:`annulus`, :meth:`box` and
    :meth:`custom`.  Boundary conventions: balls are closed, annuli are
    ``r1 < |x| <= r2``, boxes are closed.
    """

    kind: str
    r1: float = 0.0
    r2: float = 0.0
    center: Optional[np.ndarray] = None
    lo: Optional[np.ndarray] = None
    hi: Optional[np.ndarray] = None
    predicate: Optional[Callable[[np.ndarray], np.ndarray]] = None
    bounding_radius: float = 0.0

    @classmethod
    def ball(cls, r: float, center=None) -> "RegionSpec":
        c = None if center is None else np.asarray(center, dtype=float)
        bound = r + (0.0 if c is None else float(np.linalg.norm(c)))
        return cls("ball", r2=float(r), center=c, bounding_radius=bound)

    @classmethod
    def annulus(cls, r1: float, r2: float) -> "RegionSpec":
        if not 0 <= r1 < r2:
            raise ValueError("annulus needs 0 <= r1 < r2")
        return cls("annulus", r1=float(r1), r2=float(r2), bounding_radius=float(r2))

    @classmethod
    def box(cls, lo, hi) -> "RegionSpec":
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        bound = float(np.linalg.norm(np.maximum(np.abs(lo), np.abs(hi))))
        return cls("box", lo=lo, hi=hi, bounding_radius=bound)

    @classmethod
    def custom(cls, predicate, bounding_radius: float) -> "RegionSpec":
        return cls("custom", predicate=predicate, bounding_radius=float(bounding_radius))

    def contains(self, x) -> np.ndarray:
        """Vectorised membership test for points ``x`` of shape ``(k, 2n)``."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.kind == "ball":
            c = 0.0 if self.center is None else self.center
            return np.sum((x - c) ** 2, axis=1) <= self.r2**2
        if self.kind == "annulus":
            sq = np.sum(x * x, axis=1)
            return (sq > self.r1**2) & (sq <= self.r2**2)
        if self.kind == "box":
            return np.all((x >= self.lo) & (x <= self.hi), axis=1)
        return np.asarray(self.predicate(x), dtype=bool)

    def volume(self, dim: int) -> float:
        """Lebesgue volume (not available for custom regions)."""
        if self.kind == "ball":
            return ball_volume(self.r2, dim)
        if self.kind == "annulus":
            return ball_volume(self.r2, dim) - ball_volume(self.r1, dim)
        if self.kind == "box":
            return float(np.prod(self.hi - self.lo))
        raise ValueError("volume of a custom region is unknown")


def count_in_region(b, region: RegionSpec, *, cap: int = DEFAULT_CAP):
    """Counts of nonzero and of primitive lattice vectors in ``region``.

    Returns
    -------
    (int, int)
        ``(count_all, count_primitive)``.
    """
    b = _reduced(b)
    if region.bounding_radius <= 0:
        return 0, 0
    q = b.fp_form()
    if region.kind in ("ball", "annulus"):
        if region.volume(b.dim) > cap:
            raise EnumerationOverflow(f"region volume {region.volume(b.dim):.3g} exceeds cap {cap:.3g}")
    else:
        _check_cap(region.bounding_radius, b.dim, cap)
    if region.kind == "ball":
        tau = np.zeros(b.dim) if region.center is None else b.coordinates(region.center)
        return kernels.fp_count(q, np.ascontiguousarray(tau), -1.0, region.r2**2)
    if region.kind == "annulus":
        return kernels.fp_count(q, np.zeros(b.dim), region.r1**2, region.r2**2)
    X, V, _ = enumerate_ball(b, region.bounding_radius, cap=cap)
    inside = region.contains(V)
    prim = kernels.primitive_mask(np.ascontiguousarray(X[inside]))
    return int(inside.sum()), int(prim.sum())


def siegel_transform(f, b, R: float, *, cap: int = DEFAULT_CAP) -> complex:
    """Sum of ``f`` over primitive lattice vectors of norm at most ``R``.

    Parameters
    ----------
    f : callable
        Vectorised function of points with shape ``(k, 2n)``; should vanish
        outside the ball of radius ``R``.
    b : LatticeBasis or array_like
    R : float
        Support radius of ``f``.
    """
    X, V, _ = enumerate_ball(b, R, cap=cap)
    prim = kernels.primitive_mask(np.ascontiguousarray(X))
    if not prim.any():
        return 0.0
    return complex(np.sum(f(V[prim])))


def siegel_transform_coset(f, g, R: float, *, cap: int = DEFAULT_CAP) -> complex:
    """Siegel transform through the coset bijection with ``Sp(2n, Z)``.

    Every primitive coefficient vector ``c`` (with respect to the symplectic
    basis ``g``) is completed to ``gamma`` in ``Sp(2n, Z)`` with last row
    ``c`` and ``f`` is evaluated at ``e_{2n} gamma g``.  Slow; meant as a
    cross-check of :func:`siegel_transform`.
    """
    g = np.asarray(g, dtype=float)
    if not validate_symplectic(g, 1e-8):
        raise ValueError("g must be a symplectic matrix")
    red, U = reduce_basis(g)
    X, _, _ = enumerate_ball(red, R, cap=cap)
    prim = kernels.primitive_mask(np.ascontiguousarray(X))
    if not prim.any():
        return 0.0
    pts = []
    for c in X[prim] @ U:
        gamma = symplectic_completion(c)
        pts.append((gamma.astype(float) @ g)[-1])
    return complex(np.sum(f(np.array(pts))))
