"""Eisenstein series, constant terms, periods, the isometry ``iota`` and moment formulas.

Notation
--------
For ``g`` in ``Sp(2n, R)`` the lattice is ``Z^{2n} g``.  The Eisenstein series
is ``E(s, g, phi) = sum_v |v g|^{-s} phi(v g / |v g|)`` over primitive ``v``;
for ``phi = 1`` one has ``zeta(s) E(s, g) = sum_{v != 0} |v g|^{-s}``.

Functions of product type ``f(x) = rho(1/|x|) phi(x/|x|)`` are represented by
:class:`ProductFunction`; ``rho`` is a :class:`~siegel_lab.mellin.MellinPair`
and ``phi`` a :class:`~siegel_lab.harmonic.BidegreePolynomial` restricted to
the unit sphere.

All contour integrals are taken on the line ``Re s = n``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from . import harmonic as hm
from .lattice import LatticeBasis, enumerate_ball, primitive_sqnorms, reduce_basis
from .mellin import (
    SLOW,
    CriticalLinePair,
    MellinPair,
    SlowDecayWarning,
    ZeroPair,
    mellin_inverse,
    pairing_y_side,
    plancherel_pairing,
    vertical_grid,
)
from .special import p_factor, sphere_area, xi_c, xi_ratio, z_factor, zeta_c
from .symplectic import a_y, levi, polar_point, to_complex, unipotent

__all__ = [
    "ProductFunction",
    "MomentReport",
    "TailTooLarge",
    "eisenstein_series",
    "epstein_sum",
    "incomplete_theta",
    "theta_mellin",
    "constant_term_direct",
    "constant_term_closed",
    "period_closed",
    "period_direct_n1",
    "iota_apply",
    "iota_transform",
    "isometry_ratio",
    "z_on_line",
    "moment_rhs",
]


class TailTooLarge(ValueError):
    """The requested tolerance cannot be met at the given truncation."""


# ---------------------------------------------------------------------------
# product functions


@dataclass(frozen=True)
class ProductFunction:
    """``f(x) = rho(1/|x|) phi(x/|x|)`` on ``R^(2n) \\ {0}``.

    Attributes
    ----------
    radial : MellinPair
    n : int
    angular : BidegreePolynomial, optional
        Harmonic polynomial of bidegree ``(p, q)`` with ``p = q (mod 2)``;
        the constant 1 when omitted.
    """

    radial: MellinPair
    n: int
    angular: hm.BidegreePolynomial = field(default=None)

    def __post_init__(self):
        if self.angular is None:
            object.__setattr__(self, "angular", hm.BidegreePolynomial.constant(self.n))
        if self.angular.n != self.n:
            raise ValueError("angular part lives in a different dimension")
        bd = self.angular.bidegree
        if bd is not None and (bd[0] - bd[1]) % 2:
            raise ValueError("bidegree (p, q) must have p = q (mod 2)")

    @property
    def bidegree(self):
        return self.angular.bidegree or (0, 0)

    @property
    def is_spherical(self) -> bool:
        return self.bidegree == (0, 0)

    def angular_bound(self) -> float:
        """Upper bound for ``|phi|`` on the unit sphere (sum of ``|coefficients|``)."""
        return float(sum(abs(complex(sp.N(c))) for c in self.angular.terms.values()))

    def phi(self, u) -> np.ndarray:
        """Angular part at unit vectors ``u``."""
        return self.angular.evaluate(u)

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        r = np.linalg.norm(x, axis=1)
        p, q = self.bidegree
        out = self.radial.rho(1.0 / r) * (self.angular.evaluate(x) / r ** (p + q))
        return out

    def support_radius(self, cutoff: float = 1e-12) -> float:
        """Radius beyond which ``|f| < cutoff``."""
        bound = max(self.angular_bound(), 1e-300)
        return self.radial.support_radius(cutoff / bound)


@dataclass
class MomentReport:
    """Right-hand sides of the first and second moment formulas.

    Attributes
    ----------
    integral : complex
        ``int f`` over ``R^(2n)``.
    norm_sq : complex
        ``int |f|^2``.
    iota_pairing : complex
        ``int conj(f) iota(f)``.
    first_rhs, second_rhs : complex
    n : int
    pairing_error : float
        Error estimate of the contour integral behind ``iota_pairing``.
    """

    integral: complex
    norm_sq: complex
    iota_pairing: complex
    first_rhs: complex
    second_rhs: complex
    n: int
    pairing_error: float = 0.0

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


# ---------------------------------------------------------------------------
# Eisenstein series


def _power_sum(sq: np.ndarray, s) -> complex:
    """``sum sq^{-s/2}`` for real or complex ``s``."""
    if np.isrealobj(s) or complex(s).imag == 0:
        return complex(np.sum(sq ** (-0.5 * complex(s).real)))
    return complex(np.sum(np.exp(-0.5 * complex(s) * np.log(sq))))


def _tail(s, R: float, dim: int) -> complex:
    """``int_{|x| > R} |x|^{-s} dx = |S^{dim-1}| R^{dim-s} / (s - dim)``."""
    return sphere_area(dim // 2) * R ** (dim - s) / (s - dim)


def epstein_sum(g, s, R: float, *, tail: bool = True) -> complex:
    """``sum_{v != 0, |v g| <= R} |v g|^{-s}`` plus (optionally) the continuum tail."""
    b = g if isinstance(g, LatticeBasis) else LatticeBasis(np.asarray(g, dtype=float))
    sq, _ = primitive_sqnorms(b, R, primitive_only=False)
    total = _power_sum(sq, s)
    if tail:
        total += _tail(s, R, b.dim)
    return total


def _default_radius(s, dim: int, tol: float) -> float:
    # remainder after the continuum tail correction behaves like R^{dim-2-sigma};
    sigma = complex(s).real
    return min(40.0, max(4.0, (1.0 / tol) ** (1.0 / (sigma - dim + 2))))


def eisenstein_series(s, g, phi: hm.BidegreePolynomial | None = None, *, R: float | None = None,
                      tol: float = 1e-6) -> complex:
    """Truncated Eisenstein series ``E_n(s, g, phi)``.

    Parameters
    ----------
    s : complex
        ``Re s >= 2n + 2``.
    g : array_like
        Symplectic basis matrix.
    phi : BidegreePolynomial, optional
        Angular part; ``None`` for the spherical series.
    R : float, optional
        Truncation radius; by default chosen from ``tol``.

    Notes
    -----
    The spherical series is ``zeta(s)^{-1} sum_{v != 0} |v g|^{-s}`` with the
    continuum tail added.  With ``phi`` the sum runs over primitive vectors;
    non-constant harmonics average to zero on spheres, so no tail term is
    added for them.
    """
    g = np.asarray(g, dtype=float)
    dim = g.shape[0]
    n = dim // 2
    if complex(s).real < 2 * n + 2 - 1e-12:
        raise TailTooLarge(f"Re s must be at least 2n + 2 = {2 * n + 2}")
    if R is None:
        R = _default_radius(s, dim, tol)
    b = LatticeBasis(g)
    if phi is None or phi.bidegree == (0, 0):
        c = 1.0 if phi is None else complex(sp.N(next(iter(phi.terms.values()), 0)))
        return c * epstein_sum(b, s, R) / zeta_c(s)
    X, V, _ = enumerate_ball(b, R)
    from . import kernels

    prim = kernels.primitive_mask(np.ascontiguousarray(X))
    V = V[prim]
    r = np.linalg.norm(V, axis=1)
    p, q = phi.bidegree
    vals = phi.evaluate(V) / r ** (p + q)
    return complex(np.sum(vals * np.exp(-complex(s) * np.log(r))))


def incomplete_theta(f, g, *, cutoff: float = 1e-12, R: float | None = None) -> complex:
    """``Theta_f(g) = sum over primitive v of f(v g)``.

    Parameters
    ----------
    f : ProductFunction or callable
        A callable needs an explicit ``R``.
    cutoff : float
        For product functions the sum is truncated where ``|f| < cutoff``.
    """
    if isinstance(f, ProductFunction):
        if isinstance(f.radial, ZeroPair):
            return 0j
        R = f.support_radius(cutoff) if R is None else R
        if f.is_spherical:
            sq = primitive_sqnorms(LatticeBasis(np.asarray(g, dtype=float)), R)
            c = complex(sp.N(next(iter(f.angular.terms.values()), 0)))
            return c * complex(np.sum(f.radial.rho(1.0 / np.sqrt(sq))))
    elif R is None:
        raise ValueError("an explicit radius R is required for a plain callable")
    from .lattice import siegel_transform

    return siegel_transform(f, g, R)


def theta_mellin(f: ProductFunction, g, sigma: float, *, R: float = 10.0, h: float = 0.05,
                 T: float | None = None) -> complex:
    """``(1 / 2 pi i) int_(sigma) rho_hat(s) E(s, g, phi) ds`` (contour form of ``Theta_f``).

    ``E(s, g, phi)`` is the primitive-vector sum truncated at ``R`` with the
    continuum tail added for the spherical part.
    """
    g = np.asarray(g, dtype=float)
    dim = g.shape[0]
    n = dim // 2
    if sigma <= 2 * n:
        raise ValueError("the contour must lie in Re s > 2n")
    T = f.radial.default_cutoff(sigma) if T is None else T
    t, w = vertical_grid(T, h)
    s = sigma + 1j * t
    X, V, _ = enumerate_ball(LatticeBasis(g), R)
    from . import kernels

    prim = kernels.primitive_mask(np.ascontiguousarray(X))
    V = V[prim]
    r = np.linalg.norm(V, axis=1)
    p, q = f.bidegree
    weights = f.angular.evaluate(V) / r ** (p + q)
    logr = np.log(r)
    E = np.empty(s.size, dtype=complex)
    for start in range(0, s.size, 256):
        blk = s[start : start + 256]
        E[start : start + 256] = np.exp(-np.multiply.outer(blk, logr)) @ weights
    if f.is_spherical:
        # primitive density is 1/zeta(2n)
        c = complex(sp.N(next(iter(f.angular.terms.values()), 0)))
        E += c * _tail(s, R, dim) / zeta_c(2 * n).real
    return complex(np.sum(w * f.radial.transform(s) * E) / (2 * math.pi))


# ---------------------------------------------------------------------------
# constant term


def constant_term_direct(s, m, y: float, *, grid: int = 8, R: float = 12.0) -> complex:
    """``int_{U(Z)\\U} E_2(s, u_t m~ a_y) dt`` by a tensor trapezoid rule on ``[0, 1]^3``.

    Parameters
    ----------
    s : complex
        ``Re s >= 6``.
    m : array_like, shape (2, 2)
        Element of ``Sp(2, R) = SL(2, R)``.
    y : float
    grid : int
        Nodes per dimension.
    R : float
        Truncation radius of each Eisenstein evaluation.
    """
    m = np.asarray(m, dtype=float)
    if m.shape != (2, 2):
        raise ValueError("constant_term_direct supports n = 2 only (m is 2 x 2)")
    if complex(s).real < 6 - 1e-12:
        raise TailTooLarge("Re s must be at least 6")
    nodes = np.arange(grid) / grid
    base = levi(m) @ a_y(y, 2)
    zs = zeta_c(s)
    total = 0j
    for t2 in nodes:
        for t3 in nodes:
            for t4 in nodes:
                g = unipotent([t2, t3, t4]) @ base
                total += epstein_sum(g, s, R)
    return total / grid**3 / zs


def constant_term_closed(s, m, y: float, n: int, *, R: float = 200.0) -> complex:
    """Closed form of the constant term along the unipotent radical.

    ``n = 1``: ``2 (y^s + xi(s-1)/xi(s) y^(2-s))``.
    ``n >= 2``: ``2 y^s + 2 xi(s-2n+1)/xi(s) y^(2n-s) + xi(s-1)/xi(s) y E_{n-1}(s-1, m)``.

    The inner Eisenstein series is a truncated lattice sum of radius ``R``
    with the continuum tail added.
    """
    s = complex(s)
    if n == 1:
        return 2 * (y**s + xi_ratio(s - 1, s) * y ** (2 - s))
    m = np.asarray(m, dtype=float)
    if m.shape != (2 * n - 2, 2 * n - 2):
        raise ValueError("m must be a (2n-2) x (2n-2) symplectic matrix")
    inner = epstein_sum(m, s - 1, R) / zeta_c(s - 1)
    return 2 * y**s + 2 * xi_ratio(s - 2 * n + 1, s) * y ** (2 * n - s) + xi_ratio(s - 1, s) * y * inner


# ---------------------------------------------------------------------------
# periods and the isometry


def z_on_line(m: int, n: int, t) -> np.ndarray:
    """``Z_m(n + i t)``, with the removable singularity at ``n = 1, t = 0`` filled in.

    At ``n = 1`` the ratio ``xi(s - 1) / xi(s)`` tends to ``-1`` as ``s -> 1``
    and ``P_m(1) = 1``.
    """
    t = np.asarray(t, dtype=float)
    if n == 1:
        out = np.full(t.shape, -1.0 + 0j)
        nz = t != 0
        if np.any(nz):
            out[nz] = z_factor(m, n, 1 + 1j * t[nz])
        return out
    return np.asarray(z_factor(m, n, n + 1j * t))


def _contour_term(f: ProductFunction, y: float, T: float | None, h: float) -> complex:
    """``(1 / pi i) int_(n) rho_hat(s) Z_{p+q}(s) y^{2n-s} ds``."""
    n = f.n
    p, q = f.bidegree
    if f.radial.decay == SLOW:
        warnings.warn("period contour for an O(1/|s|) radial part converges slowly",
                      SlowDecayWarning, stacklevel=3)
    T = f.radial.default_cutoff(n) if T is None else T
    # midpoint nodes avoid the removable singularity at n = 1
    t, w = vertical_grid(T, h, offset=(n == 1))
    s = n + 1j * t
    vals = f.radial.transform(s) * z_on_line(p + q, n, t) * np.exp((2 * n - s) * math.log(y))
    return complex(np.sum(w * vals) / math.pi)


def period_closed(f: ProductFunction, y: float, k, *, T: float | None = None, h: float = 0.05) -> complex:
    """Closed-form period ``P_f(a_y k)``.

    Parameters
    ----------
    f : ProductFunction
    y : float
    k : array_like
        Unit vector in ``R^(2n)`` (the last row of ``k``), or a full ``K_n``
        matrix.
    """
    n = f.n
    u = np.asarray(k, dtype=float)
    u = u[-1] if u.ndim == 2 else u
    phi_k = complex(f.angular.evaluate(u))
    p, q = f.bidegree
    rho_y = float(f.radial.rho(y))
    contour = _contour_term(f, y, T, h)
    if (p, q) == (0, 0):
        const = 2 * f.radial.transform(2 * n) / xi_c(2 * n)
        return (2 * rho_y + contour + const) * phi_k
    return (2 * rho_y + (-1) ** p * contour) * phi_k


def period_direct_n1(f: ProductFunction, y: float, k, *, nodes: int = 64, cutoff: float = 1e-13) -> complex:
    """``int_0^1 Theta_f(u_t a_y k) dt`` at ``n = 1`` by the trapezoid rule in ``t``."""
    if f.n != 1:
        raise ValueError("period_direct_n1 requires n = 1")
    if isinstance(f.radial, ZeroPair):
        return 0j
    u = np.asarray(k, dtype=float)
    kmat = u if u.ndim == 2 else polar_point(u)[1]
    base = a_y(y, 1) @ kmat
    R = f.support_radius(cutoff)
    total = 0j
    for t in np.arange(nodes) / nodes:
        total += incomplete_theta(f, unipotent([t]) @ base, R=R)
    return total / nodes


def iota_transform(f: ProductFunction):
    """Transform of the radial part of ``iota(f)`` as a function on ``Re s = n``.

    ``v_hat(s) = (-1)^p rho_hat(2n - s) Z_{p+q}(2n - s)``.
    """
    n = f.n
    p, q = f.bidegree
    sign = (-1) ** p

    def v_hat(s):
        s = np.asarray(s, dtype=complex)
        t = -(s.imag)  # 2n - s = n - i Im s on the line
        return sign * f.radial.transform(2 * n - s) * z_on_line(p + q, n, t)

    return v_hat


def iota_apply(f: ProductFunction) -> ProductFunction:
    """``iota(f)`` as a product function whose radial part is known on ``Re s = n``."""
    if isinstance(f.radial, ZeroPair):
        return ProductFunction(ZeroPair(), f.n, f.angular)
    n = f.n
    radial = CriticalLinePair(
        func=iota_transform(f),
        sigma=float(n),
        decay_profile=f.radial.decay,
        cutoff=f.radial.default_cutoff(n),
    )
    return ProductFunction(radial, n, f.angular)


def isometry_ratio(f: ProductFunction, *, method: str = "line", h: float = 0.02) -> float:
    """``|iota(f)|_2 / |f|_2``.

    Parameters
    ----------
    method : {"line", "y-side"}
        ``"line"`` compares the transforms on ``Re s = n``.  ``"y-side"``
        recovers the radial part of ``iota(f)`` by Mellin inversion on a
        grid in ``log y`` and integrates ``|v(y)|^2 y^(-2n-1)`` there; it is
        slower and only accurate for rapidly decaying transforms.
    """
    if isinstance(f.radial, ZeroPair):
        return 1.0
    n = f.n
    v = iota_apply(f).radial
    allow = f.radial.decay == SLOW
    den = plancherel_pairing(f.radial, f.radial, n, allow_slow=allow).real
    if method == "line":
        num = plancherel_pairing(v, v, n, allow_slow=allow).real
    elif method == "y-side":
        lo, hi = f.radial.log_support()
        u = np.arange(lo, hi + h, h)
        vals = mellin_inverse(v, float(n), np.exp(u))
        num = float(np.sum(np.abs(vals) ** 2 * np.exp(-2 * n * u)) * h)
    else:
        raise ValueError("method must be 'line' or 'y-side'")
    return math.sqrt(num / den)


def moment_rhs(f: ProductFunction, *, tol: float = 1e-6, T_max: float = 1024.0) -> MomentReport:
    """Right-hand sides of the first and second moment formulas for ``f``.

    ``first = int f / zeta(2n)`` and
    ``second = |int f / zeta(2n)|^2 + 2/zeta(2n) (int |f|^2 + int conj(f) iota(f))``.
    """
    n = f.n
    area = sphere_area(n)
    phi1 = complex(sp.N(hm.sphere_inner(f.angular, hm.BidegreePolynomial.constant(n))))
    phi2 = complex(sp.N(hm.sphere_inner(f.angular, f.angular))).real
    z2n = zeta_c(2 * n).real
    if isinstance(f.radial, ZeroPair):
        return MomentReport(0j, 0j, 0j, 0j, 0j, n)
    integral = area * f.radial.transform(2 * n) * phi1
    if f.radial.decay == SLOW:
        norm_rad = pairing_y_side(f.radial, f.radial, n)
    else:
        norm_rad = plancherel_pairing(f.radial, f.radial, n)
    norm_sq = area * norm_rad * phi2
    v = iota_apply(f).radial
    pair, err = plancherel_pairing(v, f.radial, n, allow_slow=True, tol=tol, T_max=T_max,
                                   return_error=True)
    iota_pairing = area * pair * phi2
    first = integral / z2n
    second = abs(first) ** 2 + 2.0 / z2n * (norm_sq + iota_pairing)
    return MomentReport(
        integral=complex(integral),
        norm_sq=complex(norm_sq),
        iota_pairing=complex(iota_pairing),
        first_rhs=complex(first),
        second_rhs=complex(second),
        n=n,
        pairing_error=float(area * err * phi2),
    )
