"""Test functions on the positive half-line together with their Mellin transforms.

The transform is ``rho_hat(s) = int_0^inf rho(y) y^(-s-1) dy`` and the inverse
is ``rho(y) = (1 / 2 pi i) int_(sigma) rho_hat(s) y^s ds``.  Vertical-line
integrals use the trapezoid rule in ``t = Im s``.

Families
--------
``LogGaussian(b, scale)``
    ``rho(y) = (y/scale)^b exp(-log(y/scale)^2)``; entire transform
    ``scale^(-s) sqrt(pi) exp((b - s)^2 / 4)`` with Gaussian decay.
``YInterval(alpha, beta)``
    Indicator of ``[alpha, beta)``; transform ``(alpha^-s - beta^-s) / s``
    decays only like ``1/|s|``.
``NumericBump(center, width, samples)``
    Smooth compactly supported bump in ``log y``; transform by quadrature.
``CriticalLinePair``
    Transform given only on a vertical line (the output of the isometry).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

__all__ = [
    "SlowDecayWarning",
    "DomainError",
    "MellinPair",
    "LogGaussian",
    "YInterval",
    "NumericBump",
    "ZeroPair",
    "Dilated",
    "CriticalLinePair",
    "mellin_forward",
    "mellin_inverse",
    "plancherel_pairing",
    "pairing_y_side",
    "vertical_grid",
    "line_integral",
]

FAST = "super-polynomial"
SLOW = "O(1/|s|)"


class SlowDecayWarning(UserWarning):
    """A vertical-line integral of an ``O(1/|s|)`` transform was truncated."""


class DomainError(ValueError):
    """A transform was requested outside its domain of definition."""


class MellinPair:
    """Base class: a function ``rho`` on ``(0, inf)`` bundled with its transform."""

    decay: str = FAST
    #: open strip ``lo < Re s < hi`` where the transform is defined
    strip: tuple = (-math.inf, math.inf)

    def rho(self, y):
        raise NotImplementedError

    def transform(self, s):
        raise NotImplementedError

    def log_support(self):
        """Interval in ``u = log y`` outside which ``rho`` is negligible or zero."""
        return (-math.inf, math.inf)

    def check_domain(self, s) -> None:
        re = np.real(s)
        lo, hi = self.strip
        if np.any(re <= lo) or np.any(re >= hi):
            raise DomainError(f"Re s must lie in ({lo}, {hi})")

    def default_cutoff(self, sigma: float) -> float:
        """Half-length ``T`` of the vertical line beyond which the transform is negligible."""
        return 40.0


@dataclass(frozen=True)
class LogGaussian(MellinPair):
    """``rho(y) = (y/scale)^b exp(-(log(y/scale))^2)``."""

    b: float = 0.0
    scale: float = 1.0

    def rho(self, y):
        u = np.log(np.asarray(y, dtype=float) / self.scale)
        return np.exp(self.b * u - u * u)

    def transform(self, s):
        s = np.asarray(s, dtype=complex)
        out = np.exp(-s * math.log(self.scale)) * math.sqrt(math.pi) * np.exp((self.b - s) ** 2 / 4)
        return complex(out) if out.ndim == 0 else out

    def log_support(self):
        c = math.log(self.scale) + self.b / 2
        return (c - 15.0, c + 15.0)

    def default_cutoff(self, sigma: float) -> float:
        # |rho_hat| ~ exp(((b - sigma)^2 - t^2) / 4); make the tail < 1e-40 of the peak
        return max(40.0, math.sqrt((self.b - sigma) ** 2 + 4 * 40 * math.log(10)))

    def support_radius(self, cutoff: float) -> float:
        """Radius ``r`` with ``rho(1/|x|) < cutoff`` for ``|x| > r`` (``y = 1/|x|``)."""
        # rho(1/r) = exp(-b L - L^2) with L = log(r * scale); solve L^2 + b L = log(1/cutoff)
        c = math.log(1.0 / cutoff)
        L = (-self.b + math.sqrt(self.b**2 + 4 * c)) / 2
        return math.exp(L) / self.scale


@dataclass(frozen=True)
class YInterval(MellinPair):
    """Indicator of ``alpha <= y < beta``.

    With ``y = 1/|x|`` this is the annulus ``1/beta < |x| <= 1/alpha``.
    """

    alpha: float = 1.0
    beta: float = 2.0

    decay = SLOW

    def __post_init__(self):
        if not 0 < self.alpha < self.beta:
            raise ValueError("YInterval needs 0 < alpha < beta")

    def rho(self, y):
        y = np.asarray(y, dtype=float)
        return ((y >= self.alpha) & (y < self.beta)).astype(float)

    def transform(self, s):
        s = np.asarray(s, dtype=complex)
        la, lb = math.log(self.alpha), math.log(self.beta)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = (np.exp(-s * la) - np.exp(-s * lb)) / s
        out = np.where(s == 0, lb - la, out)
        return complex(out) if out.ndim == 0 else out

    def log_support(self):
        return (math.log(self.alpha), math.log(self.beta))

    def support_radius(self, cutoff: float = 0.0) -> float:
        return 1.0 / self.alpha


@dataclass(frozen=True)
class NumericBump(MellinPair):
    """``rho(y) = exp(-1 / (1 - u^2))`` for ``u = log(y/center)/width``, ``|u| < 1``.

    The transform has no closed form and is computed with a ``samples``-point
    Gauss-Legendre rule in ``u``.
    """

    center: float = 1.0
    width: float = 0.5
    samples: int = 800

    def rho(self, y):
        u = np.log(np.asarray(y, dtype=float) / self.center) / self.width
        out = np.zeros_like(u)
        inside = np.abs(u) < 1
        out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
        return out

    def transform(self, s):
        s = np.asarray(s, dtype=complex)
        u, w = np.polynomial.legendre.leggauss(self.samples)
        bump = np.exp(-1.0 / (1.0 - u**2))
        logy = math.log(self.center) + self.width * u
        vals = np.exp(-np.multiply.outer(s, logy)) @ (w * bump) * self.width
        return complex(vals) if np.ndim(vals) == 0 else vals

    def log_support(self):
        c = math.log(self.center)
        return (c - self.width, c + self.width)

    def default_cutoff(self, sigma: float) -> float:
        # the transform decays like exp(-sqrt(2 width |t|)); stop near exp(-28)
        return 400.0 / self.width

    def support_radius(self, cutoff: float = 0.0) -> float:
        return math.exp(self.width) / self.center


@dataclass(frozen=True)
class ZeroPair(MellinPair):
    """The zero function."""

    def rho(self, y):
        return np.zeros_like(np.asarray(y, dtype=float))

    def transform(self, s):
        out = np.zeros_like(np.asarray(s, dtype=complex))
        return complex(out) if out.ndim == 0 else out

    def log_support(self):
        return (0.0, 0.0)

    def support_radius(self, cutoff: float = 0.0) -> float:
        return 0.0


@dataclass(frozen=True)
class Dilated(MellinPair):
    """``rho_lambda(y) = rho(y / lam)`` with transform ``lam^(-s) rho_hat(s)``."""

    base: MellinPair
    lam: float

    @property
    def decay(self):
        return self.base.decay

    @property
    def strip(self):
        return self.base.strip

    def rho(self, y):
        return self.base.rho(np.asarray(y, dtype=float) / self.lam)

    def transform(self, s):
        s = np.asarray(s, dtype=complex)
        out = np.exp(-s * math.log(self.lam)) * self.base.transform(s)
        return complex(out) if np.ndim(out) == 0 else out

    def log_support(self):
        lo, hi = self.base.log_support()
        return (lo + math.log(self.lam), hi + math.log(self.lam))

    def default_cutoff(self, sigma: float) -> float:
        return self.base.default_cutoff(sigma)

    def support_radius(self, cutoff: float) -> float:
        return self.base.support_radius(cutoff) / self.lam


@dataclass(frozen=True)
class CriticalLinePair(MellinPair):
    """A function known through its transform on the line ``Re s = sigma``.

    ``rho(y)`` is recovered by :func:`mellin_inverse` on that line.
    """

    func: Callable = None
    sigma: float = 1.0
    decay_profile: str = FAST
    cutoff: float = 40.0

    @property
    def decay(self):
        return self.decay_profile

    def transform(self, s):
        s = np.asarray(s, dtype=complex)
        if np.any(np.abs(s.real - self.sigma) > 1e-12):
            raise DomainError(f"transform only available on Re s = {self.sigma}")
        out = self.func(s)
        return complex(out) if np.ndim(out) == 0 else out

    def rho(self, y):
        return np.real_if_close(mellin_inverse(self, self.sigma, y))

    def default_cutoff(self, sigma: float) -> float:
        return self.cutoff


# ---------------------------------------------------------------------------


def mellin_forward(pair: MellinPair, s, *, numeric: bool = False):
    """Mellin transform of ``pair`` at ``s``.

    Parameters
    ----------
    numeric : bool
        Ignore any closed form and integrate ``rho(e^u) e^(-s u)`` over the
        log-support with adaptive quadrature (relative error about 1e-10).
    """
    pair.check_domain(s)
    if not numeric:
        return pair.transform(s)
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    lo, hi = pair.log_support()
    out = np.empty(s_arr.shape, dtype=complex)
    for i, sv in enumerate(s_arr):
        def re(u, sv=sv):
            return float(pair.rho(math.exp(u)) * (np.exp(-sv * u)).real)

        def im(u, sv=sv):
            return float(pair.rho(math.exp(u)) * (np.exp(-sv * u)).imag)

        kw = dict(limit=400, epsabs=0.0, epsrel=1e-11)
        if math.isfinite(lo) and math.isfinite(hi) and not isinstance(pair, (LogGaussian, Dilated)):
            a, b = lo, hi
        else:
            # centre the window on the peak of |rho(e^u) e^{-sigma u}|
            a, b = lo, hi
            if isinstance(pair, LogGaussian):
                c = math.log(pair.scale) + (pair.b - sv.real) / 2
                a, b = c - 12.0, c + 12.0
        out[i] = integrate.quad(re, a, b, **kw)[0] + 1j * integrate.quad(im, a, b, **kw)[0]
    return complex(out[0]) if np.ndim(s) == 0 else out.reshape(np.shape(s))


def vertical_grid(T: float, h: float = 0.05, *, offset: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Trapezoid nodes and weights on ``[-T, T]``.

    With ``offset=True`` the nodes sit at half-integer multiples of ``h``
    (midpoint rule), which avoids ``t = 0``.
    """
    m = int(math.ceil(T / h))
    if offset:
        t = (np.arange(-m, m) + 0.5) * h
        w = np.full(t.size, h)
    else:
        t = np.arange(-m, m + 1) * h
        w = np.full(t.size, h)
        w[0] = w[-1] = h / 2
    return t, w


def line_integral(func, sigma: float, T: float, h: float = 0.05, *, offset: bool = False) -> complex:
    """``(1 / 2 pi) int_{-T}^{T} func(sigma + i t) dt`` by the trapezoid rule."""
    t, w = vertical_grid(T, h, offset=offset)
    return complex(np.sum(w * func(sigma + 1j * t)) / (2 * math.pi))


def mellin_inverse(pair: MellinPair, sigma: float, y, *, T: float | None = None, h: float = 0.05):
    """``(1 / 2 pi i) int_(sigma) rho_hat(s) y^s ds`` truncated to ``|Im s| <= T``.

    Issues :class:`SlowDecayWarning` for ``O(1/|s|)`` families, whose
    truncated inverse converges slowly and shows Gibbs oscillation at jumps.
    """
    if pair.decay == SLOW:
        warnings.warn(
            "inverse Mellin transform of an O(1/|s|) family is slowly convergent",
            SlowDecayWarning,
            stacklevel=2,
        )
    if T is None:
        T = pair.default_cutoff(sigma)
    y_arr = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(y_arr <= 0):
        raise ValueError("y must be positive")
    t, w = vertical_grid(T, h)
    s = sigma + 1j * t
    pair.check_domain(s)
    vals = pair.transform(s) * w
    phase = np.exp(np.multiply.outer(np.log(y_arr), s))
    out = phase @ vals / (2 * math.pi)
    return complex(out[0]) if np.ndim(y) == 0 else out.reshape(np.shape(y))


def _richardson(func, T0: float, h: float, tol: float, T_max: float):
    """Trapezoid integral with the ``1/T`` truncation error extrapolated away."""
    Ts = [T0, 2 * T0]
    vals = [func(T0), func(2 * T0)]
    est = 2 * vals[1] - vals[0]
    err = math.inf
    while Ts[-1] < T_max:
        T = 2 * Ts[-1]
        Ts.append(T)
        vals.append(func(T))
        new = 2 * vals[-1] - vals[-2]
        err = abs(new - est)
        est = new
        if err < tol:
            break
    return est, err


def plancherel_pairing(
    p1: MellinPair,
    p2: MellinPair,
    n: int,
    *,
    T: float | None = None,
    h: float = 0.05,
    allow_slow: bool = False,
    tol: float = 1e-7,
    T_max: float = 4096.0,
    return_error: bool = False,
):
    """``(1 / 2 pi) int rho_hat_1(n + it) conj(rho_hat_2(n + it)) dt``.

    Equals ``int_0^inf rho_1(y) conj(rho_2(y)) y^(-2n-1) dy``.

    Parameters
    ----------
    allow_slow : bool
        Two ``O(1/|s|)`` transforms give an integrand decaying only like
        ``1/t^2``; such pairings are rejected unless ``allow_slow`` is set, in
        which case the cutoff is doubled until the Richardson-extrapolated
        value changes by less than ``tol`` (or ``T_max`` is reached).
    return_error : bool
        Also return the error estimate (zero for fast pairings).
    """
    if isinstance(p1, ZeroPair) or isinstance(p2, ZeroPair):
        return (0j, 0.0) if return_error else 0j

    def integrand(t):
        s = n + 1j * t
        return p1.transform(s) * np.conj(p2.transform(s))

    def trap(Tc):
        t, w = vertical_grid(Tc, h)
        return complex(np.sum(w * integrand(t)) / (2 * math.pi))

    slow = p1.decay == SLOW and p2.decay == SLOW
    if slow:
        if not allow_slow:
            raise ValueError("pairing of two O(1/|s|) transforms is rejected (pass allow_slow=True)")
        val, err = _richardson(trap, T or 64.0, h, tol, T_max)
        return (val, err) if return_error else val
    if T is None:
        fast = [p for p in (p1, p2) if p.decay == FAST]
        T = max(p.default_cutoff(n) for p in fast)
    val = trap(T)
    return (val, 0.0) if return_error else val


def pairing_y_side(p1: MellinPair, p2: MellinPair, n: int) -> complex:
    """``int_0^inf rho_1(y) conj(rho_2(y)) y^(-2n-1) dy`` by adaptive quadrature in ``log y``."""
    lo1, hi1 = p1.log_support()
    lo2, hi2 = p2.log_support()
    lo, hi = max(lo1, lo2), min(hi1, hi2)
    if lo >= hi:
        return 0j

    def f(u, part):
        y = math.exp(u)
        v = complex(p1.rho(y) * np.conj(p2.rho(y))) * math.exp(-2 * n * u)
        return v.real if part == 0 else v.imag

    breaks = []
    for p in (p1, p2):
        if p.decay == SLOW:
            breaks.extend(p.log_support())
    pts = [b for b in breaks if lo < b < hi] or None
    kw = dict(limit=400, epsabs=1e-14, epsrel=1e-11, points=pts)
    return integrate.quad(f, lo, hi, args=(0,), **kw)[0] + 1j * integrate.quad(f, lo, hi, args=(1,), **kw)[0]
