"""Cyclic Jacobi eigenvalue kernel for dense symmetric matrices.

Rotations are applied in round-robin (tournament) order: each round rotates
n/2 disjoint index pairs, which lets the row and column updates run as two
row-major passes over the matrix instead of strided column sweeps.
"""

import math

import numba
import numpy as np


@numba.njit(cache=True)
def _off_norm(a):
    n = a.shape[0]
    s = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            s += a[i, j] * a[i, j]
    return math.sqrt(2.0 * s)


@numba.njit(cache=True)
def jacobi_sweeps(a, v, want_vectors, tol, max_sweeps):
    """Diagonalise ``a`` in place; returns ``(sweeps, off_norm)``.

    ``v`` accumulates the eigenvectors as *rows* (v[i] is the i-th vector)
    when ``want_vectors`` is true. Stops once the Frobenius norm of the
    off-diagonal part is <= tol; ``sweeps == -1`` signals the cap was hit.
    """
    n = a.shape[0]
    m = n + (n % 2)
    half = m // 2
    order = np.arange(m)
    cs = np.empty(half)
    sn = np.empty(half)
    ps = np.empty(half, np.int64)
    qs = np.empty(half, np.int64)
    for sweep in range(max_sweeps):
        off = _off_norm(a)
        if off <= tol:
            return sweep, off
        for _ in range(m - 1):
            cnt = 0
            for i in range(half):
                p = order[i]
                q = order[m - 1 - i]
                if p > q:
                    p, q = q, p
                if q >= n:
                    continue
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                sign = 1.0 if theta >= 0.0 else -1.0
                t = sign / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                ps[cnt] = p
                qs[cnt] = q
                cs[cnt] = c
                sn[cnt] = t * c
                cnt += 1
            # rows: a <- J^T a
            for i in range(cnt):
                p = ps[i]
                q = qs[i]
                c = cs[i]
                s = sn[i]
                for k in range(n):
                    x = a[p, k]
                    y = a[q, k]
                    a[p, k] = c * x - s * y
                    a[q, k] = s * x + c * y
                if want_vectors:
                    for k in range(n):
                        x = v[p, k]
                        y = v[q, k]
                        v[p, k] = c * x - s * y
                        v[q, k] = s * x + c * y
            # columns: a <- a J, row by row
            for k in range(n):
                for i in range(cnt):
                    p = ps[i]
                    q = qs[i]
                    c = cs[i]
                    s = sn[i]
                    x = a[k, p]
                    y = a[k, q]
                    a[k, p] = c * x - s * y
                    a[k, q] = s * x + c * y
            for i in range(cnt):
                a[ps[i], qs[i]] = 0.0
                a[qs[i], ps[i]] = 0.0
            # tournament rotation, order[0] stays put
            last = order[m - 1]
            for i in range(m - 1, 1, -1):
                order[i] = order[i - 1]
            order[1] = last
    return -1, _off_norm(a)
