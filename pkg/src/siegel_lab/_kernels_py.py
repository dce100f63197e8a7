"""Pure-Python twin of the compiled kernels in ``_kernels.pyx``.

The search tree and all floating point operations follow the compiled code
exactly; only the innermost coordinate is vectorised with numpy, which leaves
each per-point operation (and therefore each rounding) unchanged.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["fp_enumerate", "fp_sqnorms", "fp_count", "primitive_mask", "lll_reduce"]


def _leaves(q, tau, r2):
    """Yield ``(prefix, x0_values, l0_values)`` for every innermost segment.

    ``prefix`` holds coordinates ``1..d-1``; the segment covers the admissible
    range of coordinate 0, with ``l0`` the value of ``Q(x - tau)``.
    """
    q = np.asarray(q, dtype=float)
    tau = np.asarray(tau, dtype=float)
    d = q.shape[0]
    x = [0] * d
    ub = [0] * d
    c = [0.0] * d
    ell = [0.0] * (d + 1)

    def centre(k):
        acc = float(tau[k])
        for j in range(k + 1, d):
            acc -= float(q[k, j]) * (x[j] - float(tau[j]))
        c[k] = acc

    def bounds(k):
        rem = r2 - ell[k + 1]
        if rem < 0.0:
            rem = 0.0
        h = math.sqrt(rem / float(q[k, k]))
        x[k] = math.ceil(c[k] - h)
        ub[k] = math.floor(c[k] + h)

    k = d - 1
    centre(k)
    bounds(k)
    q00 = float(q[0, 0])
    while True:
        if k == 0:
            if x[0] <= ub[0]:
                xs = np.arange(x[0], ub[0] + 1, dtype=np.int64)
                diff = xs.astype(float) - c[0]
                l0 = ell[1] + q00 * diff * diff
                yield tuple(x[1:]), xs, l0
            k = 1
            if k == d:
                return
            x[k] += 1
            continue
        if x[k] > ub[k]:
            k += 1
            if k == d:
                return
            x[k] += 1
            continue
        diff = x[k] - c[k]
        ell[k] = ell[k + 1] + float(q[k, k]) * diff * diff
        k -= 1
        centre(k)
        bounds(k)


def _gcd_rows(xs: np.ndarray) -> np.ndarray:
    return np.gcd.reduce(np.abs(xs), axis=1)


def fp_enumerate(q, tau, r2, cap):
    """Integer vectors ``x`` with ``Q(x - tau) <= r2`` (zero included)."""
    d = np.asarray(q).shape[0]
    chunks = []
    count = 0
    for prefix, xs, l0 in _leaves(q, tau, r2):
        sel = xs[l0 <= r2]
        if sel.size:
            block = np.empty((sel.size, d), dtype=np.int64)
            block[:, 0] = sel
            block[:, 1:] = prefix
            chunks.append(block)
            count += sel.size
            if count > cap:
                raise OverflowError("enumeration cap exceeded")
    if not chunks:
        return np.zeros((0, d), dtype=np.int64)
    return np.concatenate(chunks)


def fp_sqnorms(q, r2, cap):
    """Squared norms and primitivity flags of nonzero vectors with ``Q(x) <= r2``."""
    d = np.asarray(q).shape[0]
    sqs, prs = [], []
    count = 0
    for prefix, xs, l0 in _leaves(q, np.zeros(d), r2):
        keep = l0 <= r2
        if not any(prefix):
            keep &= xs != 0
        if not keep.any():
            continue
        sel = xs[keep]
        g = np.gcd.reduce(np.abs(np.array(prefix, dtype=np.int64))) if d > 1 else 0
        sqs.append(l0[keep])
        prs.append(np.gcd(np.abs(sel), g) == 1)
        count += sel.size
        if count > cap:
            raise OverflowError("enumeration cap exceeded")
    if not sqs:
        return np.zeros(0), np.zeros(0, dtype=bool)
    return np.concatenate(sqs), np.concatenate(prs)


def fp_count(q, tau, r2_lo, r2_hi):
    """Count nonzero ``x`` with ``r2_lo < Q(x - tau) <= r2_hi``."""
    d = np.asarray(q).shape[0]
    n_all = n_pr = 0
    for prefix, xs, l0 in _leaves(q, tau, r2_hi):
        keep = (l0 <= r2_hi) & (l0 > r2_lo)
        if not any(prefix):
            keep &= xs != 0
        if not keep.any():
            continue
        sel = xs[keep]
        g = np.gcd.reduce(np.abs(np.array(prefix, dtype=np.int64))) if d > 1 else 0
        n_all += int(sel.size)
        n_pr += int(np.count_nonzero(np.gcd(np.abs(sel), g) == 1))
    return n_all, n_pr


def primitive_mask(xs):
    """Boolean mask of rows whose entries have gcd 1."""
    xs = np.asarray(xs, dtype=np.int64)
    if xs.shape[0] == 0:
        return np.zeros(0, dtype=bool)
    return _gcd_rows(xs) == 1


def _dot(a, b):
    # sequential sum, matching the compiled loop bit for bit
    acc = 0.0
    for s, t in zip(a.tolist(), b.tolist()):
        acc += s * t
    return acc


def _gs_full(b, bs, mu, bn, i):
    bs[i] = b[i]
    for j in range(i):
        mu[i, j] = _dot(b[i], bs[j]) / bn[j]
        bs[i] -= mu[i, j] * bs[j]
    bn[i] = _dot(bs[i], bs[i])


def lll_reduce(basis, delta=0.99):
    """Lovasz-reduce the rows of ``basis``; returns ``(reduced, U)``."""
    b = np.array(basis, dtype=float, copy=True)
    d, m = b.shape
    u = np.eye(d, dtype=np.int64)
    bs = np.zeros((d, m))
    mu = np.zeros((d, d))
    bn = np.zeros(d)
    for i in range(d):
        _gs_full(b, bs, mu, bn, i)
    k = 1
    guard = 0
    while k < d:
        guard += 1
        if guard > 1_000_000:
            raise RuntimeError("LLL failed to terminate")
        for j in range(k - 1, -1, -1):
            qf = mu[k, j]
            if abs(qf) > 0.5:
                qi = math.floor(qf + 0.5)
                b[k] -= qi * b[j]
                u[k] -= qi * u[j]
                mu[k, :j] -= qi * mu[j, :j]
                mu[k, j] -= qi
        _gs_full(b, bs, mu, bn, k)
        if bn[k] < (delta - mu[k, k - 1] ** 2) * bn[k - 1]:
            b[[k - 1, k]] = b[[k, k - 1]]
            u[[k - 1, k]] = u[[k, k - 1]]
            for i in range(k - 1, d):
                _gs_full(b, bs, mu, bn, i)
            k = max(k - 1, 1)
        else:
            k += 1
    return b, u
