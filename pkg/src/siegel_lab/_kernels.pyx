# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled lattice kernels.

Every function here has a line-by-line twin in ``_kernels_py.py``; the two
must perform the same floating point operations in the same order so that
enumeration results agree exactly.

The quadratic form is passed in Fincke-Pohst shape: ``q[k, k] = r_kk**2`` and
``q[k, j] = r_kj / r_kk`` for ``j > k`` where ``G = R^T R`` is the Cholesky
factorisation of the Gram matrix of the basis rows.  With ``tau`` the real
coordinates of the centre, ``Q(x - tau) = sum_k q_kk (x_k - c_k)**2`` where
``c_k = tau_k - sum_{j>k} q_kj (x_j - tau_j)``.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, floor, ceil, fabs

cnp.import_array()

cdef enum:
    MAXD = 16


cdef inline long long _gcd(long long a, long long b) noexcept nogil:
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a


cdef inline bint _is_primitive(long long *x, int d) noexcept nogil:
    cdef long long g = 0
    cdef int i
    for i in range(d):
        g = _gcd(g, x[i])
        if g == 1:
            return True
    return g == 1


cdef inline void _centre(double[:, ::1] q, double[::1] tau, long long *x,
                         double *c, int k, int d) noexcept nogil:
    cdef double acc = tau[k]
    cdef int j
    for j in range(k + 1, d):
        acc -= q[k, j] * (x[j] - tau[j])
    c[k] = acc


cdef inline void _bounds(double[:, ::1] q, double *c, double *l, long long *x,
                         long long *ub, double r2, int k) noexcept nogil:
    cdef double rem = r2 - l[k + 1]
    cdef double h
    if rem < 0.0:
        rem = 0.0
    h = sqrt(rem / q[k, k])
    x[k] = <long long>ceil(c[k] - h)
    ub[k] = <long long>floor(c[k] + h)


def fp_enumerate(double[:, ::1] q, double[::1] tau, double r2, long long cap):
    """Integer vectors ``x`` with ``Q(x - tau) <= r2`` (zero included).

    Returns an ``(k, d)`` int64 array.  Raises ``OverflowError`` when more
    than ``cap`` vectors qualify.
    """
    cdef int d = q.shape[0]
    if d > MAXD:
        raise ValueError("dimension too large")
    cdef long long x[MAXD]
    cdef long long ub[MAXD]
    cdef double c[MAXD]
    cdef double l[MAXD + 1]
    cdef Py_ssize_t size = 1024, count = 0
    out_arr = np.empty((size, d), dtype=np.int64)
    cdef long long[:, ::1] out = out_arr
    cdef int k, j
    cdef double diff
    l[d] = 0.0
    k = d - 1
    _centre(q, tau, x, c, k, d)
    _bounds(q, c, l, x, ub, r2, k)
    while True:
        if x[k] > ub[k]:
            k += 1
            if k == d:
                break
            x[k] += 1
            continue
        diff = x[k] - c[k]
        l[k] = l[k + 1] + q[k, k] * diff * diff
        if k == 0:
            if l[0] <= r2:
                if count == size:
                    if count >= cap:
                        raise OverflowError("enumeration cap exceeded")
                    size *= 2
                    out_arr = np.resize(out_arr, (size, d))
                    out = out_arr
                for j in range(d):
                    out[count, j] = x[j]
                count += 1
            x[0] += 1
            continue
        k -= 1
        _centre(q, tau, x, c, k, d)
        _bounds(q, c, l, x, ub, r2, k)
    if count > cap:
        raise OverflowError("enumeration cap exceeded")
    return out_arr[:count].copy()


def fp_sqnorms(double[:, ::1] q, double r2, long long cap):
    """Squared norms and primitivity flags of nonzero vectors with ``Q(x) <= r2``.

    Returns ``(sq, prim)`` with ``sq`` float64 and ``prim`` uint8 arrays.
    """
    cdef int d = q.shape[0]
    if d > MAXD:
        raise ValueError("dimension too large")
    cdef long long x[MAXD]
    cdef long long ub[MAXD]
    cdef double c[MAXD]
    cdef double l[MAXD + 1]
    cdef Py_ssize_t size = 1024, count = 0
    sq_arr = np.empty(size, dtype=np.float64)
    pr_arr = np.empty(size, dtype=np.uint8)
    cdef double[::1] sq = sq_arr
    cdef unsigned char[::1] pr = pr_arr
    tau_arr = np.zeros(d, dtype=np.float64)
    cdef double[::1] tau = tau_arr
    cdef int k, j
    cdef bint nonzero
    cdef double diff
    l[d] = 0.0
    k = d - 1
    _centre(q, tau, x, c, k, d)
    _bounds(q, c, l, x, ub, r2, k)
    while True:
        if x[k] > ub[k]:
            k += 1
            if k == d:
                break
            x[k] += 1
            continue
        diff = x[k] - c[k]
        l[k] = l[k + 1] + q[k, k] * diff * diff
        if k == 0:
            if l[0] <= r2:
                nonzero = False
                for j in range(d):
                    if x[j] != 0:
                        nonzero = True
                        break
                if nonzero:
                    if count == size:
                        if count >= cap:
                            raise OverflowError("enumeration cap exceeded")
                        size *= 2
                        sq_arr = np.resize(sq_arr, size)
                        pr_arr = np.resize(pr_arr, size)
                        sq = sq_arr
                        pr = pr_arr
                    sq[count] = l[0]
                    pr[count] = _is_primitive(x, d)
                    count += 1
            x[0] += 1
            continue
        k -= 1
        _centre(q, tau, x, c, k, d)
        _bounds(q, c, l, x, ub, r2, k)
    return sq_arr[:count].copy(), pr_arr[:count].view(np.bool_).copy()


def fp_count(double[:, ::1] q, double[::1] tau, double r2_lo, double r2_hi):
    """Count nonzero ``x`` with ``r2_lo < Q(x - tau) <= r2_hi``.

    Returns ``(count_all, count_primitive)``.  Pass a negative ``r2_lo`` for
    a full ball.
    """
    cdef int d = q.shape[0]
    if d > MAXD:
        raise ValueError("dimension too large")
    cdef long long x[MAXD]
    cdef long long ub[MAXD]
    cdef double c[MAXD]
    cdef double l[MAXD + 1]
    cdef long long n_all = 0, n_pr = 0
    cdef int k, j
    cdef bint zero
    cdef double diff
    with nogil:
        l[d] = 0.0
        k = d - 1
        _centre(q, tau, x, c, k, d)
        _bounds(q, c, l, x, ub, r2_hi, k)
        while True:
            if x[k] > ub[k]:
                k += 1
                if k == d:
                    break
                x[k] += 1
                continue
            diff = x[k] - c[k]
            l[k] = l[k + 1] + q[k, k] * diff * diff
            if k == 0:
                if l[0] <= r2_hi and l[0] > r2_lo:
                    zero = True
                    for j in range(d):
                        if x[j] != 0:
                            zero = False
                            break
                    if not zero:
                        n_all += 1
                        if _is_primitive(x, d):
                            n_pr += 1
                x[0] += 1
                continue
            k -= 1
            _centre(q, tau, x, c, k, d)
            _bounds(q, c, l, x, ub, r2_hi, k)
    return n_all, n_pr


def primitive_mask(long long[:, ::1] xs):
    """Boolean mask of rows whose entries have gcd 1."""
    cdef Py_ssize_t n = xs.shape[0], i
    cdef int d = xs.shape[1]
    out_arr = np.zeros(n, dtype=np.bool_)
    cdef cnp.npy_bool[::1] out = out_arr
    for i in range(n):
        out[i] = _is_primitive(&xs[i, 0], d)
    return out_arr


cdef void _gs_full(double[:, ::1] b, double[:, ::1] bs, double[:, ::1] mu,
                   double[::1] bn, int i, int m) noexcept nogil:
    cdef int j, t
    cdef double dot
    for t in range(m):
        bs[i, t] = b[i, t]
    for j in range(i):
        dot = 0.0
        for t in range(m):
            dot += b[i, t] * bs[j, t]
        mu[i, j] = dot / bn[j]
        for t in range(m):
            bs[i, t] -= mu[i, j] * bs[j, t]
    dot = 0.0
    for t in range(m):
        dot += bs[i, t] * bs[i, t]
    bn[i] = dot


def lll_reduce(double[:, ::1] basis, double delta=0.99):
    """Lovasz-reduce the rows of ``basis``.

    Returns ``(reduced, U)`` with ``reduced = U @ basis`` and ``U`` an int64
    unimodular matrix.
    """
    cdef int d = basis.shape[0]
    cdef int m = basis.shape[1]
    b_arr = np.array(basis, dtype=np.float64, copy=True)
    u_arr = np.eye(d, dtype=np.int64)
    bs_arr = np.zeros((d, m), dtype=np.float64)
    mu_arr = np.zeros((d, d), dtype=np.float64)
    bn_arr = np.zeros(d, dtype=np.float64)
    cdef double[:, ::1] b = b_arr
    cdef long long[:, ::1] u = u_arr
    cdef double[:, ::1] bs = bs_arr
    cdef double[:, ::1] mu = mu_arr
    cdef double[::1] bn = bn_arr
    cdef int i, j, k, t, l
    cdef double qf, tmp
    cdef long long qi, itmp
    cdef long long guard = 0
    for i in range(d):
        _gs_full(b, bs, mu, bn, i, m)
    k = 1
    while k < d:
        guard += 1
        if guard > 1000000:
            raise RuntimeError("LLL failed to terminate")
        for j in range(k - 1, -1, -1):
            qf = mu[k, j]
            if fabs(qf) > 0.5:
                qi = <long long>floor(qf + 0.5)
                for t in range(m):
                    b[k, t] -= qi * b[j, t]
                for t in range(d):
                    u[k, t] -= qi * u[j, t]
                for l in range(j):
                    mu[k, l] -= qi * mu[j, l]
                mu[k, j] -= qi
        _gs_full(b, bs, mu, bn, k, m)
        if bn[k] < (delta - mu[k, k - 1] * mu[k, k - 1]) * bn[k - 1]:
            for t in range(m):
                tmp = b[k, t]
                b[k, t] = b[k - 1, t]
                b[k - 1, t] = tmp
            for t in range(d):
                itmp = u[k, t]
                u[k, t] = u[k - 1, t]
                u[k - 1, t] = itmp
            for i in range(k - 1, d):
                _gs_full(b, bs, mu, bn, i, m)
            k = k - 1 if k > 1 else 1
        else:
            k += 1
    return b_arr, u_arr
