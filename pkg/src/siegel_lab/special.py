"""Complex Gamma, Riemann zeta and completed zeta, plus the rational and
zeta-ratio factors ``P_m`` and ``Z_m`` used by the period and isometry
formulas.

All functions accept scalars or numpy arrays and return complex values of the
same shape (a Python ``complex`` for scalar input).

The zeta function is evaluated by Euler-Maclaurin summation with a cut point
chosen per argument, which keeps the relative error near machine precision on
the region ``Re s >= -5`` used throughout the package.  The completed zeta
``xi(s) = pi^(-s/2) Gamma(s/2) zeta(s)`` is built in log space so ratios such as
``xi(s - 2n + 1) / xi(s)`` stay finite far up the critical strip, where each
factor underflows individually.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np
from scipy import special as _sp

__all__ = [
    "PoleError",
    "DomainError",
    "gamma_c",
    "loggamma_c",
    "zeta_c",
    "xi_c",
    "log_xi",
    "xi_ratio",
    "p_factor",
    "z_factor",
    "ZFactorSpec",
    "sphere_area",
]

#: Number of Bernoulli correction terms in the Euler-Maclaurin tail.
_EM_ORDER = 12
#: Smallest real part accepted by :func:`zeta_c`.
ZETA_MIN_REAL = -5.0
_CHUNK = 2048


class PoleError(ValueError):
    """Raised when a function is evaluated exactly at one of its poles."""


class DomainError(ValueError):
    """Raised when an argument lies outside the supported region."""


def _as_complex(s):
    arr = np.asarray(s, dtype=complex)
    return arr, arr.ndim == 0


def _ret(out, scalar):
    return complex(out) if scalar else out


def _is_nonpositive_integer(z):
    return (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))


def loggamma_c(s):
    """Principal branch of ``log Gamma(s)`` for complex ``s``.

    Raises
    ------
    PoleError
        If any entry is a non-positive integer.
    """
    z, scalar = _as_complex(s)
    if np.any(_is_nonpositive_integer(z)):
        raise PoleError("Gamma has a pole at non-positive integers")
    return _ret(_sp.loggamma(z), scalar)


def gamma_c(s):
    """Gamma function for complex arguments.

    Parameters
    ----------
    s : complex or array_like
        Argument(s). Non-positive integers are poles.

    Returns
    -------
    complex or ndarray
        ``Gamma(s)``. Values are computed as ``exp(loggamma(s))`` which keeps
        the relative error at the level of ``loggamma`` itself.
    """
    z, scalar = _as_complex(s)
    return _ret(np.exp(loggamma_c(z)), scalar)


def _bernoulli(m: int) -> list[Fraction]:
    # Akiyama-Tanigawa; returns B_0..B_m with B_1 = +1/2 (unused here)
    a = [Fraction(0)] * (m + 1)
    out = []
    for i in range(m + 1):
        a[i] = Fraction(1, i + 1)
        for j in range(i, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        out.append(a[0])
    return out


@lru_cache(maxsize=None)
def _em_coefficients(order: int) -> np.ndarray:
    # B_{2j} / (2j)! for j = 1..order, rounded once to extended precision
    b = _bernoulli(2 * order)
    vals = [b[2 * j] / factorial(2 * j) for j in range(1, order + 1)]
    return np.array(
        [np.longdouble(v.numerator) / np.longdouble(v.denominator) for v in vals],
        dtype=np.longdouble,
    )


def _cut_point(s: np.ndarray, order: int) -> np.ndarray:
    # smallest N with |s + 2M + 1| / (2 pi N) <= 1/4
    return np.maximum(12, np.ceil(2.0 * np.abs(s + 2 * order + 1) / np.pi)).astype(int)


def _zeta_em_chunk(s: np.ndarray, order: int, N: int) -> np.ndarray:
    """Euler-Maclaurin evaluation for a batch sharing the cut point ``N``.

    Left of the critical line the partial sum cancels heavily, so the
    arithmetic is carried out in extended precision there.
    """
    if np.min(s.real) < 0.5:
        s = s.astype(np.clongdouble)
    real = s.real.dtype.type
    sig, tau = s.real, s.imag

    def power(k):
        # k^{-s} from real exp/cos/sin, which honour extended precision
        lk = np.log(real(k))
        mag = np.exp(-sig * lk)
        return mag * np.cos(tau * lk) - 1j * (mag * np.sin(tau * lk))

    total = np.zeros_like(s)
    for k in range(1, N):
        total += power(k)
    Ns = power(N)
    total += N * Ns / (s - 1.0) + 0.5 * Ns
    coef = _em_coefficients(order)
    # rising factorial s (s+1) ... (s+2j-2) times N^{-s-2j+1}
    rising = s.copy()
    power = Ns / N
    for j in range(1, order + 1):
        total += coef[j - 1] * rising * power
        rising = rising * (s + 2 * j - 1) * (s + 2 * j)
        power = power / (N * N)
    return total.astype(complex)


def zeta_c(s):
    """Riemann zeta function for complex ``s`` with ``Re s >= -5``.

    Parameters
    ----------
    s : complex or array_like

    Returns
    -------
    complex or ndarray

    Raises
    ------
    PoleError
        At ``s = 1``.
    DomainError
        If ``Re s < -5``; use the functional equation through :func:`xi_c`
        for those arguments.
    """
    z, scalar = _as_complex(s)
    if np.any(z == 1.0):
        raise PoleError("zeta has a pole at s = 1")
    if np.any(z.real < ZETA_MIN_REAL):
        raise DomainError(f"zeta_c requires Re s >= {ZETA_MIN_REAL}")
    flat = z.ravel()
    out = np.empty_like(flat)
    cuts = _cut_point(flat, _EM_ORDER)
    left = flat.real < 0.5
    # right of the critical line the terms decrease, so a batch may share the
    # largest cut point; to the left the partial sum grows like N^(1 - Re s)
    # and each point keeps its own N
    right = np.nonzero(~left)[0]
    right = right[np.argsort(cuts[right], kind="stable")]
    for start in range(0, right.size, _CHUNK):
        idx = right[start : start + _CHUNK]
        out[idx] = _zeta_em_chunk(flat[idx], _EM_ORDER, int(cuts[idx].max()))
    for N in np.unique(cuts[left]):
        idx = np.nonzero(left & (cuts == N))[0]
        out[idx] = _zeta_em_chunk(flat[idx], _EM_ORDER, int(N))
    return _ret(out.reshape(z.shape), scalar)


def _check_xi_poles(z):
    if np.any((z == 0.0) | (z == 1.0)):
        raise PoleError("xi has poles at s = 0 and s = 1")


def log_xi(s, *, reflect: bool = True):
    """Logarithm of the completed zeta function (branch unspecified).

    Only ``exp`` of sums and differences of these values is meaningful.  With
    ``reflect=True`` arguments with ``Re s < 1/2`` are mapped to ``1 - s``.
    """
    z, scalar = _as_complex(s)
    _check_xi_poles(z)
    if reflect:
        z = np.where(z.real < 0.5, 1.0 - z, z)
    val = -0.5 * z * np.log(np.pi) + _sp.loggamma(0.5 * z) + np.log(zeta_c(z))
    return _ret(val, scalar)


def xi_c(s, *, reflect: bool = True):
    """Completed zeta ``xi(s) = pi^(-s/2) Gamma(s/2) zeta(s)``.

    Parameters
    ----------
    s : complex or array_like
    reflect : bool, default True
        Use ``xi(s) = xi(1 - s)`` for ``Re s < 1/2``.  With ``reflect=False``
        the definition is evaluated directly, which is what an independent
        check of the functional equation needs; it then requires
        ``Re s >= -5``.
    """
    z, scalar = _as_complex(s)
    return _ret(np.exp(log_xi(z, reflect=reflect)), scalar)


def xi_ratio(a, b):
    """``xi(a) / xi(b)`` evaluated in log space."""
    za, sa = _as_complex(a)
    zb, sb = _as_complex(b)
    out = np.exp(log_xi(za) - log_xi(zb))
    return _ret(out, sa and sb)


def _check_m_n(m: int, n: int) -> None:
    if n < 1:
        raise ValueError("n must be a positive integer")
    if m < 0 or m % 2:
        raise ValueError("m must be a non-negative even integer")


def p_factor(m: int, n: int, s):
    """Rational factor ``P_m(s) = prod_{j=0}^{(m-2)/2} (2n - s + 2j) / (s + 2j)``.

    ``P_0 = 1``.  Raises :class:`PoleError` when a denominator vanishes.
    """
    _check_m_n(m, n)
    z, scalar = _as_complex(s)
    out = np.ones_like(z)
    for j in range(m // 2):
        den = z + 2 * j
        if np.any(den == 0):
            raise PoleError(f"P_{m} has a pole at s = {-2 * j}")
        out = out * (2 * n - z + 2 * j) / den
    return _ret(out, scalar)


def z_factor(m: int, n: int, s):
    """``Z_m(s) = P_m(s) xi(s - 2n + 1) / xi(s)``."""
    _check_m_n(m, n)
    z, scalar = _as_complex(s)
    out = p_factor(m, n, z) * xi_ratio(z - 2 * n + 1, z)
    return _ret(out, scalar)


@dataclass(frozen=True)
class ZFactorSpec:
    """Validated arguments for :func:`p_factor` and :func:`z_factor`.

    Attributes
    ----------
    m : int
        Non-negative even K-type degree ``p + q``.
    n : int
        Half-rank.
    s : complex
        Spectral parameter.
    """

    m: int
    n: int
    s: complex

    def __post_init__(self):
        _check_m_n(self.m, self.n)

    def p(self) -> complex:
        return p_factor(self.m, self.n, self.s)

    def z(self) -> complex:
        return z_factor(self.m, self.n, self.s)


def sphere_area(n: int) -> float:
    """Surface area ``2 pi^n / Gamma(n)`` of the unit sphere in ``R^(2n)``."""
    return 2.0 * np.pi**n / _sp.gamma(n)
