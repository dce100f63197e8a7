"""Bihomogeneous polynomials in ``(z, zbar)``, harmonic projections and raising operators.

Polynomials are stored exactly: a map from exponent pairs ``(a, b)`` (each an
``n``-tuple) to sympy coefficients, representing ``sum c z^a zbar^b``.
Coefficients are Gaussian rationals, possibly polynomial in the spectral
symbol :data:`s`.  Floating point appears only in :meth:`evaluate`.

Real points ``x`` in ``R^(2n)`` are mapped to ``z_j = x_j + i x_{2n+1-j}``
(see :func:`siegel_lab.symplectic.to_complex`).
"""

from __future__ import annotations

from itertools import combinations_with_replacement
from math import factorial
from typing import Iterable

import numpy as np
import sympy as sp

from .symplectic import to_complex

__all__ = [
    "s",
    "BidegreePolynomial",
    "RadialPower",
    "laplacian_apply",
    "harmonic_basis",
    "harmonic_dimension",
    "dimension_factorial_formula",
    "h_family",
    "eval_h",
    "raising_apply",
    "raising_fd",
    "psi_22",
    "psi_11",
    "sphere_monomial_integral",
    "sphere_inner",
    "RAISING_KINDS",
]

#: The spectral parameter used in symbolic exponents.
s = sp.Symbol("s")

RAISING_KINDS = ("R20", "R02", "AUX")


def _unit(n: int, j: int) -> tuple:
    return tuple(int(i == j) for i in range(n))


def _clean(c):
    return sp.expand(sp.nsimplify(c) if isinstance(c, float) else sp.sympify(c))


class BidegreePolynomial:
    """Exact polynomial ``sum c_{a,b} z^a zbar^b`` in ``n`` complex variables.

    Parameters
    ----------
    n : int
    terms : mapping
        ``{(a, b): coefficient}`` with ``a``, ``b`` tuples of length ``n``.

    Notes
    -----
    Nonzero polynomials must be bihomogeneous; :attr:`bidegree` returns
    ``(p, q)`` and is ``None`` for the zero polynomial.
    """

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms=None):
        self.n = int(n)
        clean = {}
        for (a, b), c in (terms or {}).items():
            a, b = tuple(int(v) for v in a), tuple(int(v) for v in b)
            if len(a) != self.n or len(b) != self.n:
                raise ValueError("exponent tuples must have length n")
            c = _clean(c)
            if c != 0:
                clean[(a, b)] = sp.expand(clean.get((a, b), 0) + c)
                if clean[(a, b)] == 0:
                    del clean[(a, b)]
        degrees = {(sum(a), sum(b)) for a, b in clean}
        if len(degrees) > 1:
            raise ValueError(f"polynomial is not bihomogeneous: bidegrees {sorted(degrees)}")
        self.terms = clean

    # constructors ---------------------------------------------------------
    @classmethod
    def monomial(cls, n: int, a, b, coeff=1) -> "BidegreePolynomial":
        return cls(n, {(tuple(a), tuple(b)): coeff})

    @classmethod
    def constant(cls, n: int, c=1) -> "BidegreePolynomial":
        zero = (0,) * n
        return cls(n, {(zero, zero): c})

    @classmethod
    def z(cls, n: int, j: int) -> "BidegreePolynomial":
        """The coordinate ``z_j`` (1-based)."""
        return cls.monomial(n, _unit(n, j - 1), (0,) * n)

    @classmethod
    def zbar(cls, n: int, j: int) -> "BidegreePolynomial":
        """The coordinate ``zbar_j`` (1-based)."""
        return cls.monomial(n, (0,) * n, _unit(n, j - 1))

    @classmethod
    def r2(cls, n: int) -> "BidegreePolynomial":
        """``sum_j z_j zbar_j``."""
        return cls(n, {(_unit(n, j), _unit(n, j)): 1 for j in range(n)})

    # structure ------------------------------------------------------------
    @property
    def bidegree(self):
        if not self.terms:
            return None
        a, b = next(iter(self.terms))
        return sum(a), sum(b)

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self) -> str:
        return f"BidegreePolynomial(n={self.n}, {self.as_expr()})"

    def as_expr(self):
        """Sympy expression in symbols ``z1..zn, zb1..zbn``."""
        zs = sp.symbols(f"z1:{self.n + 1}")
        zbs = sp.symbols(f"zb1:{self.n + 1}")
        out = 0
        for (a, b), c in self.terms.items():
            mono = sp.Mul(*[zs[j] ** a[j] * zbs[j] ** b[j] for j in range(self.n)])
            out += c * mono
        return out

    # arithmetic -----------------------------------------------------------
    def _check(self, other):
        if other.n != self.n:
            raise ValueError("polynomials live in different dimensions")

    def __add__(self, other):
        if not isinstance(other, BidegreePolynomial):
            return NotImplemented
        self._check(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, 0) + c
        return BidegreePolynomial(self.n, terms)

    def __neg__(self):
        return BidegreePolynomial(self.n, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, BidegreePolynomial):
            self._check(other)
            terms: dict = {}
            for (a1, b1), c1 in self.terms.items():
                for (a2, b2), c2 in other.terms.items():
                    key = (
                        tuple(x + y for x, y in zip(a1, a2)),
                        tuple(x + y for x, y in zip(b1, b2)),
                    )
                    terms[key] = terms.get(key, 0) + c1 * c2
            return BidegreePolynomial(self.n, terms)
        c = _clean(other)
        return BidegreePolynomial(self.n, {k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = BidegreePolynomial.constant(self.n)
        for _ in range(int(k)):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, BidegreePolynomial):
            return NotImplemented
        return self.n == other.n and (self - other).is_zero()

    def __hash__(self):
        return hash((self.n, frozenset(self.terms)))

    def subs(self, *args, **kwargs) -> "BidegreePolynomial":
        return BidegreePolynomial(
            self.n, {k: sp.sympify(c).subs(*args, **kwargs) for k, c in self.terms.items()}
        )

    def conj(self) -> "BidegreePolynomial":
        """Complex conjugate (swaps ``z`` and ``zbar``; ``s`` treated as real)."""
        return BidegreePolynomial(
            self.n, {(b, a): sp.conjugate(c).subs(sp.conjugate(s), s) for (a, b), c in self.terms.items()}
        )

    # calculus -------------------------------------------------------------
    def d_z(self, j: int) -> "BidegreePolynomial":
        """``d/dz_j`` (1-based)."""
        k = j - 1
        terms = {}
        for (a, b), c in self.terms.items():
            if a[k]:
                a2 = a[:k] + (a[k] - 1,) + a[k + 1 :]
                terms[(a2, b)] = terms.get((a2, b), 0) + c * a[k]
        return BidegreePolynomial(self.n, terms)

    def d_zbar(self, j: int) -> "BidegreePolynomial":
        """``d/dzbar_j`` (1-based)."""
        k = j - 1
        terms = {}
        for (a, b), c in self.terms.items():
            if b[k]:
                b2 = b[:k] + (b[k] - 1,) + b[k + 1 :]
                terms[(a, b2)] = terms.get((a, b2), 0) + c * b[k]
        return BidegreePolynomial(self.n, terms)

    def laplacian(self) -> "BidegreePolynomial":
        """``4 sum_j d^2 / dz_j dzbar_j``."""
        out = BidegreePolynomial(self.n)
        for j in range(1, self.n + 1):
            out = out + self.d_z(j).d_zbar(j)
        return 4 * out

    def is_harmonic(self) -> bool:
        return self.laplacian().is_zero()

    # numerics -------------------------------------------------------------
    def evaluate(self, x=None, *, z=None, s_value=None) -> np.ndarray:
        """Evaluate at real points ``x`` (shape ``(..., 2n)``) or complex ``z``."""
        if z is None:
            z = to_complex(x)
        z = np.asarray(z, dtype=complex)
        zb = np.conj(z)
        out = np.zeros(z.shape[:-1], dtype=complex)
        for (a, b), c in self.terms.items():
            cv = sp.sympify(c)
            if s_value is not None:
                cv = cv.subs(s, s_value)
            coef = complex(sp.N(cv, 17))
            mono = np.ones(z.shape[:-1], dtype=complex)
            for j in range(self.n):
                if a[j]:
                    mono = mono * z[..., j] ** a[j]
                if b[j]:
                    mono = mono * zb[..., j] ** b[j]
            out = out + coef * mono
        return out


def laplacian_apply(P: BidegreePolynomial) -> BidegreePolynomial:
    """Exact image of ``P`` under the Euclidean Laplacian."""
    return P.laplacian()


def _exponents(n: int, d: int) -> list[tuple]:
    out = []
    for combo in combinations_with_replacement(range(n), d):
        e = [0] * n
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return sorted(out, reverse=True)


def harmonic_basis(n: int, p: int, q: int) -> list[BidegreePolynomial]:
    """Exact rational basis of the harmonic polynomials of bidegree ``(p, q)``."""
    if p < 0 or q < 0:
        raise ValueError("p and q must be non-negative")
    cols = [(a, b) for a in _exponents(n, p) for b in _exponents(n, q)]
    if p == 0 or q == 0:
        return [BidegreePolynomial.monomial(n, a, b) for a, b in cols]
    rows = [(a, b) for a in _exponents(n, p - 1) for b in _exponents(n, q - 1)]
    index = {k: i for i, k in enumerate(rows)}
    M = sp.zeros(len(rows), len(cols))
    for j, (a, b) in enumerate(cols):
        img = BidegreePolynomial.monomial(n, a, b).laplacian()
        for key, c in img.terms.items():
            M[index[key], j] = c
    basis = []
    for vec in M.nullspace():
        denom = sp.ilcm(*[sp.fraction(v)[1] for v in vec])
        basis.append(BidegreePolynomial(n, {cols[i]: v * denom for i, v in enumerate(vec) if v != 0}))
    return basis


def harmonic_dimension(n: int, p: int, q: int) -> int:
    """Dimension of the harmonic polynomials of bidegree ``(p, q)`` (exact kernel)."""
    return len(harmonic_basis(n, p, q))


def dimension_factorial_formula(n: int, p: int, q: int):
    """The closed form ``(n+p-2)!(n+q-2)!(n+p+q-1)! / ((n-1)!(n-2)! p! q!)``.

    Reported side by side with :func:`harmonic_dimension`; the two disagree
    whenever ``(n + p + q - 1)! != n + p + q - 1``.  Returns ``None`` for
    ``n = 1`` where ``(n - 2)!`` is undefined.
    """
    if n < 2:
        return None
    num = factorial(n + p - 2) * factorial(n + q - 2) * factorial(n + p + q - 1)
    den = factorial(n - 1) * factorial(n - 2) * factorial(p) * factorial(q)
    return sp.Rational(num, den)


class RadialPower:
    """``poly * (sum z zbar) ** exponent`` with a symbolic exponent.

    The family is closed under ``d/dz_j`` and ``d/dzbar_j``:
    ``d/dzbar_j [P r^{2e}] = (dP/dzbar_j * r^2 + e z_j P) r^{2(e-1)}``.
    """

    __slots__ = ("poly", "exponent")

    def __init__(self, poly: BidegreePolynomial, exponent):
        self.poly = poly
        self.exponent = sp.expand(sp.sympify(exponent))

    @property
    def n(self) -> int:
        return self.poly.n

    def __repr__(self) -> str:
        return f"RadialPower({self.poly.as_expr()} * r2**({self.exponent}))"

    def d_z(self, j: int) -> "RadialPower":
        R = BidegreePolynomial.r2(self.n)
        new = self.poly.d_z(j) * R + self.poly * BidegreePolynomial.zbar(self.n, j) * self.exponent
        return RadialPower(new, self.exponent - 1)

    def d_zbar(self, j: int) -> "RadialPower":
        R = BidegreePolynomial.r2(self.n)
        new = self.poly.d_zbar(j) * R + self.poly * BidegreePolynomial.z(self.n, j) * self.exponent
        return RadialPower(new, self.exponent - 1)

    def times(self, P: BidegreePolynomial) -> "RadialPower":
        return RadialPower(self.poly * P, self.exponent)

    def scale(self, c) -> "RadialPower":
        return RadialPower(self.poly * c, self.exponent)

    def _lifted(self, exponent) -> BidegreePolynomial:
        shift = sp.simplify(self.exponent - exponent)
        if not (shift.is_integer and shift >= 0):
            raise ValueError("exponents differ by a non-integer or negative amount")
        return self.poly * BidegreePolynomial.r2(self.n) ** int(shift)

    def __add__(self, other: "RadialPower") -> "RadialPower":
        diff = sp.simplify(self.exponent - other.exponent)
        if not diff.is_integer:
            raise ValueError("cannot add radial powers whose exponents differ by a non-integer")
        low = other.exponent if diff >= 0 else self.exponent
        return RadialPower(self._lifted(low) + other._lifted(low), low)

    def __neg__(self):
        return RadialPower(-self.poly, self.exponent)

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def equals(self, other: "RadialPower") -> bool:
        """Exact equality as functions on ``C^n \\ {0}``."""
        return (self - other).is_zero()

    def evaluate(self, x, s_value=None) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        e = self.exponent if s_value is None else self.exponent.subs(s, s_value)
        r2 = np.sum(x * x, axis=-1)
        return self.poly.evaluate(x, s_value=s_value) * r2 ** complex(sp.N(e, 17))


def h_family(n: int, p: int, q: int, s_value=s) -> RadialPower:
    """``h_{s,p,q} = z_1^p zbar_n^q / (sum z zbar)^{(s+p+q)/2}``."""
    a = (p,) + (0,) * (n - 1)
    b = (0,) * (n - 1) + (q,)
    if n == 1:
        a, b = (p,), (q,)
    return RadialPower(BidegreePolynomial.monomial(n, a, b), -(sp.sympify(s_value) + p + q) / 2)


def eval_h(s_value, p: int, q: int, x) -> np.ndarray:
    """Numeric ``h_{s,p,q}(x)`` for real points ``x`` of shape ``(..., 2n)``."""
    x = np.asarray(x, dtype=float)
    r2 = np.sum(x * x, axis=-1)
    if np.any(r2 == 0):
        raise ValueError("h_{s,p,q} is undefined at the origin")
    z = to_complex(x)
    return z[..., 0] ** p * np.conj(z[..., -1]) ** q / r2 ** ((s_value + p + q) / 2)


def raising_apply(kind: str, F: RadialPower) -> RadialPower:
    """Apply ``R20 = 2 z_1 d/dzbar_1``, ``R02 = 2 zbar_n d/dz_n`` or
    ``AUX = 2 z_n d/dzbar_1 + 2 z_1 d/dzbar_n`` exactly."""
    n = F.n
    if kind == "R20":
        return F.d_zbar(1).times(BidegreePolynomial.z(n, 1)).scale(2)
    if kind == "R02":
        return F.d_z(n).times(BidegreePolynomial.zbar(n, n)).scale(2)
    if kind == "AUX":
        left = F.d_zbar(1).times(BidegreePolynomial.z(n, n)).scale(2)
        right = F.d_zbar(n).times(BidegreePolynomial.z(n, 1)).scale(2)
        return left + right
    raise ValueError(f"unknown raising operator {kind!r}; expected one of {RAISING_KINDS}")


def raising_fd(kind: str, f, x, step: float = 1e-5) -> np.ndarray:
    """Finite-difference version of :func:`raising_apply` for a numeric ``f``.

    Uses central differences in the real coordinates, with
    ``d/dz_j = (d/dx_j - i d/dx_{2n+1-j}) / 2`` and
    ``d/dzbar_j = (d/dx_j + i d/dx_{2n+1-j}) / 2``.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    dim = x.shape[-1]
    n = dim // 2

    def partial(i):
        e = np.zeros(dim)
        e[i] = step
        return (f(x + e) - f(x - e)) / (2 * step)

    def d_z(j):
        return 0.5 * (partial(j - 1) - 1j * partial(dim - j))

    def d_zbar(j):
        return 0.5 * (partial(j - 1) + 1j * partial(dim - j))

    z = to_complex(x)
    if kind == "R20":
        return 2 * z[:, 0] * d_zbar(1)
    if kind == "R02":
        return 2 * np.conj(z[:, n - 1]) * d_z(n)
    if kind == "AUX":
        return 2 * z[:, n - 1] * d_zbar(1) + 2 * z[:, 0] * d_zbar(n)
    raise ValueError(f"unknown raising operator {kind!r}")


def psi_22(n: int) -> BidegreePolynomial:
    """``-2 (z_1 z_n zbar_n^2 - 2/(n+2) (sum z zbar) z_1 zbar_n)``, harmonic of bidegree (2, 2)."""
    z1, zn = BidegreePolynomial.z(n, 1), BidegreePolynomial.z(n, n)
    zbn = BidegreePolynomial.zbar(n, n)
    R = BidegreePolynomial.r2(n)
    return -2 * (z1 * zn * zbn * zbn - sp.Rational(2, n + 2) * R * z1 * zbn)


def psi_11(n: int) -> BidegreePolynomial:
    """``4 z_1 zbar_n / (n + 2)``, harmonic of bidegree (1, 1) for ``n >= 2``."""
    return sp.Rational(4, n + 2) * BidegreePolynomial.z(n, 1) * BidegreePolynomial.zbar(n, n)


def sphere_monomial_integral(a: Iterable[int], b: Iterable[int]) -> sp.Rational:
    """``int z^a zbar^b`` over the unit sphere of ``C^n`` (probability measure).

    Zero unless ``a == b``; otherwise ``(n-1)! prod a_j! / (n - 1 + |a|)!``.
    """
    a, b = tuple(a), tuple(b)
    if len(a) != len(b):
        raise ValueError("exponent tuples must have equal length")
    if a != b:
        return sp.Integer(0)
    n = len(a)
    num = factorial(n - 1)
    for aj in a:
        num *= factorial(aj)
    return sp.Rational(num, factorial(n - 1 + sum(a)))


def sphere_inner(phi: BidegreePolynomial, psi: BidegreePolynomial):
    """Hermitian inner product ``int phi conj(psi)`` over the unit sphere."""
    if phi.n != psi.n:
        raise ValueError("polynomials live in different dimensions")
    total = sp.Integer(0)
    for (a1, b1), c1 in phi.terms.items():
        for (a2, b2), c2 in psi.terms.items():
            za = tuple(x + y for x, y in zip(a1, b2))
            zb = tuple(x + y for x, y in zip(b1, a2))
            val = sphere_monomial_integral(za, zb)
            if val:
                total += c1 * sp.conjugate(c2) * val
    return sp.nsimplify(sp.expand(total)) if total.free_symbols == set() else sp.expand(total)
