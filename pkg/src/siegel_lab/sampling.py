"""Random symplectic lattices distributed (approximately) by Haar measure.

Two samplers are provided.

``exact`` (``n = 1``)
    Draws ``x + iy`` from the standard fundamental domain of ``SL(2, Z)``
    with density ``3/pi dx dy / y^2`` by inversion and multiplies by a
    uniform rotation.  The samples are exactly Haar distributed.

``walk`` (``n >= 2``)
    Starts at a uniformly chosen point of the big cell of the Hecke
    correspondence of a large prime ``p`` (these points equidistribute as
    ``p`` grows), rotates by a Haar element of ``K_n`` and then runs ``L``
    steps of the right random walk ``g -> g exp(eps X)``.  Bases are kept
    well conditioned by :func:`~siegel_lab.symplectic.symplectic_reduce`.
    The output is approximately Haar distributed.

Streams are split into fixed shards seeded through
:class:`numpy.random.SeedSequence`, so a result depends on the seed and the
shard size but not on the number of workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .symplectic import omega, random_k, random_lie_algebra, symplectic_reduce, validate_symplectic

__all__ = [
    "HaarSampler",
    "sample_modular_exact",
    "sample_symplectic_walk",
    "hecke_start",
    "y_marginal_cdf",
    "EXPECTED_INV_Y",
    "HERMITE_BOUND_N1",
    "ConditioningError",
    "shard_seeds",
]

#: ``E[1/y]`` under the normalised measure on the modular fundamental domain.
EXPECTED_INV_Y = 3.0 / math.pi * math.atanh(0.5)
#: Hermite bound for the shortest vector of a unimodular planar lattice.
HERMITE_BOUND_N1 = (4.0 / 3.0) ** 0.25
# entries beyond this mean the walk has lost conditioning
_COND_LIMIT = 1e12


class ConditioningError(RuntimeError):
    """A random-walk basis grew beyond the conditioning limit."""


def y_marginal_cdf(y) -> np.ndarray:
    """CDF of the imaginary part of a Haar point of the modular fundamental domain.

    ``P(Y > y) = 3/(pi y)`` for ``y >= 1`` and
    ``3/pi (2 arcsin c + (1 - 2c)/y)`` with ``c = sqrt(1 - y^2)`` for
    ``sqrt(3)/2 <= y < 1``.
    """
    y = np.asarray(y, dtype=float)
    lo = math.sqrt(3.0) / 2
    yc = np.clip(y, lo, None)
    c = np.sqrt(np.clip(1.0 - yc * yc, 0.0, None))
    tail = np.where(yc >= 1.0, 3.0 / (math.pi * yc), 3.0 / math.pi * (2 * np.arcsin(c) + (1 - 2 * c) / yc))
    return np.where(y < lo, 0.0, 1.0 - tail)


def _rotations(theta: np.ndarray) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.stack([np.stack([c, s], -1), np.stack([-s, c], -1)], -2)


def sample_modular_exact(size: int, rng: np.random.Generator, *, return_xy: bool = False):
    """Exact Haar samples of ``SL(2, Z) \\ SL(2, R)`` as basis matrices.

    Parameters
    ----------
    size : int
    rng : numpy.random.Generator
    return_xy : bool
        Also return the points ``x`` and ``y`` of the fundamental domain.

    Returns
    -------
    g : ndarray, shape (size, 2, 2)
        Rows ``(1/sqrt(y), 0)`` and ``(x/sqrt(y), sqrt(y))`` times a uniform
        rotation.
    """
    # the x-marginal has density proportional to 1/sqrt(1 - x^2) on [-1/2, 1/2]
    x = np.sin(rng.uniform(-math.pi / 6, math.pi / 6, size))
    u = rng.random(size)
    y = np.sqrt(1.0 - x * x) / (1.0 - u)
    theta = rng.uniform(0.0, 2 * math.pi, size)
    sy = np.sqrt(y)
    base = np.zeros((size, 2, 2))
    base[:, 0, 0] = 1.0 / sy
    base[:, 1, 0] = x / sy
    base[:, 1, 1] = sy
    g = base @ _rotations(theta)
    return (g, x, y) if return_xy else g


def hecke_start(n: int, rng: np.random.Generator, prime: int = 100003) -> np.ndarray:
    """A uniform point of the big cell of the Hecke correspondence at ``prime``.

    The basis ``p^(-1/2) [[I, J S], [0, p I]]`` with ``S`` a uniformly random
    symmetric matrix mod ``p`` is symplectic; it is returned after reduction.
    """
    A = rng.integers(0, prime, size=(n, n))
    S = np.triu(A) + np.triu(A, 1).T
    J = np.fliplr(np.eye(n, dtype=np.int64))
    B = (J @ S) % prime
    M = np.zeros((2 * n, 2 * n))
    M[:n, :n] = np.eye(n)
    M[:n, n:] = B
    M[n:, n:] = prime * np.eye(n)
    _, g = symplectic_reduce(M / math.sqrt(prime))
    return g


@dataclass(frozen=True)
class HaarSampler:
    """Configuration of a Haar sampler.

    Attributes
    ----------
    n : int
    kind : str
        ``"exact"`` (``n = 1`` only) or ``"walk"``.
    eps : float
        Step size of the random walk.
    burn_in : int
        Number of walk steps ``L``.
    reduce_every : int
        Reduction period of the walk.
    prime : int
        Hecke prime of the starting point.
    seed : int
    """

    n: int
    kind: str = "walk"
    eps: float = 0.08
    burn_in: int = 64
    reduce_every: int = 32
    prime: int = 100003
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("exact", "walk"):
            raise ValueError("kind must be 'exact' or 'walk'")
        if self.kind == "exact" and self.n != 1:
            raise ValueError("the exact sampler exists for n = 1 only")
        if self.n < 1:
            raise ValueError("n must be positive")

    @classmethod
    def default(cls, n: int, seed: int = 0) -> "HaarSampler":
        return cls(n=n, kind="exact" if n == 1 else "walk", seed=seed)

    @property
    def approximate(self) -> bool:
        return self.kind == "walk"

    def draw(self, size: int, rng: np.random.Generator) -> np.ndarray:
        """``size`` basis matrices, shape ``(size, 2n, 2n)``."""
        if self.kind == "exact":
            return sample_modular_exact(size, rng)
        return sample_symplectic_walk(
            self.n, size, rng, eps=self.eps, burn_in=self.burn_in,
            reduce_every=self.reduce_every, prime=self.prime,
        )


def sample_symplectic_walk(n: int, size: int, rng: np.random.Generator, *, eps: float = 0.08,
                           burn_in: int = 64, reduce_every: int = 32, prime: int = 100003) -> np.ndarray:
    """Approximate Haar samples for ``n >= 2`` (see the module docstring).

    Raises
    ------
    ConditioningError
        If a basis entry exceeds ``1e12``; retry with a smaller ``eps``.
    """
    if n < 2:
        raise ValueError("the random-walk sampler needs n >= 2; use the exact sampler for n = 1")
    if reduce_every < 1:
        raise ValueError("reduce_every must be positive")
    G = np.stack([hecke_start(n, rng, prime) @ random_k(n, rng) for _ in range(size)])
    for step in range(1, burn_in + 1):
        X = random_lie_algebra(n, rng, size=size)
        G = G @ expm(eps * X)
        if step % reduce_every == 0 or step == burn_in:
            if np.max(np.abs(G)) > _COND_LIMIT:
                raise ConditioningError("walk basis lost conditioning; use a smaller step")
            G = np.stack([symplectic_reduce(g)[1] for g in G])
    return G


def shard_seeds(seed: int, total: int, shard_size: int) -> list[tuple[np.random.SeedSequence, int]]:
    """Split ``total`` draws into shards of ``shard_size`` with independent seeds."""
    if shard_size < 1:
        raise ValueError("shard_size must be positive")
    count = max(1, math.ceil(total / shard_size))
    children = np.random.SeedSequence(seed).spawn(count)
    sizes = [shard_size] * (count - 1) + [total - shard_size * (count - 1)]
    return list(zip(children, sizes))


def check_basis(g, tol: float = 1e-10) -> bool:
    """Symplectic and unimodular to ``tol`` (used by tests and self-checks)."""
    g = np.asarray(g, dtype=float)
    return validate_symplectic(g, tol) and abs(np.linalg.det(g) - 1.0) < tol and g.shape[0] == omega(g.shape[0] // 2).shape[0]
