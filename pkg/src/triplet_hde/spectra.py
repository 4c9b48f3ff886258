"""Second eigenvalues of normalised graph operators and the closed-form bounds.

All reported spectra are of the normalised operator, so values lie in
[0, 1]. ``lambda`` is the largest *magnitude* among the non-Perron
eigenvalues, so a bipartite graph reports 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse.linalg as spla

from . import _jacobi
from .errors import ConfigurationError, DomainError, NumericalError, StructuralError
from .graphs import Graph, is_connected

DENSE_TOL = 1e-10
ITERATIVE_TOL = 1e-8
MAX_MATVECS = 1_000_000
MAX_SWEEPS = 60
# above this size the O(n^3) Jacobi solver is replaced by power iteration
DENSE_LIMIT = 1024
# hard ceiling for an explicitly requested dense solve
DENSE_HARD_LIMIT = 4096


@dataclass
class SpectrumResult:
    lam: float
    method: str
    residual: float
    degree: Optional[int] = None
    all_eigenvalues: Optional[list] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "method": self.method, "residual": self.residual,
                "degree": self.degree}


def jacobi_eigh(a, tol: float = DENSE_TOL, vectors: bool = False, max_sweeps: int = MAX_SWEEPS):
    """Eigen-decompose a dense symmetric matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors, off_norm)`` with eigenvalues in
    ascending order and eigenvectors as columns (``None`` unless requested).
    ``off_norm`` is the Frobenius norm of the off-diagonal remainder, which
    bounds the absolute error of every eigenvalue.
    """
    a = np.array(a, dtype=np.float64, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("jacobi_eigh needs a square matrix")
    n = a.shape[0]
    if n == 0:
        return np.empty(0), (np.empty((0, 0)) if vectors else None), 0.0
    if not np.allclose(a, a.T, rtol=0, atol=1e-12 * max(1.0, np.abs(a).max())):
        raise ValueError("jacobi_eigh needs a symmetric matrix")
    a = (a + a.T) / 2
    v = np.eye(n) if vectors else np.empty((1, 1))
    sweeps, off = _jacobi.jacobi_sweeps(a, v, vectors, tol, max_sweeps)
    if sweeps < 0:
        raise NumericalError(f"Jacobi did not converge in {max_sweeps} sweeps", residual=off)
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    vecs = v[order].T.copy() if vectors else None
    return w[order], vecs, float(off)


def normalized_adjacency(g: Graph):
    """Symmetric normalised operator as a scipy sparse matrix.

    A/d for regular graphs, D^{-1/2} A D^{-1/2} otherwise; the second
    element of the result is the unit Perron vector.
    """
    a = g.sparse_adjacency()
    deg = g.degrees().astype(np.float64)
    if (deg <= 0).any():
        raise StructuralError("graph has an isolated vertex", witness={"vertex": int(np.argmin(deg))})
    if g.is_regular():
        m = a / deg[0]
        perron = np.full(g.vertex_count, 1.0 / math.sqrt(g.vertex_count))
    else:
        s = 1.0 / np.sqrt(deg)
        m = a.multiply(s[:, None]).multiply(s[None, :]).tocsr()
        perron = np.sqrt(deg / deg.sum())
    return m, perron


def second_eigenvalue(g: Graph, tol: float | None = None, method: str = "auto") -> SpectrumResult:
    """lambda(g): max |eigenvalue| of the normalised operator, Perron value excluded.

    ``method`` is ``"dense"`` (Jacobi), ``"power"`` (deflated power
    iteration) or ``"auto"`` (dense up to :data:`DENSE_LIMIT` vertices).
    """
    if g.vertex_count == 0:
        raise StructuralError("spectrum of the empty graph")
    if not is_connected(g):
        raise StructuralError("graph is disconnected; its lambda would be 1")
    if method == "auto":
        method = "dense" if g.vertex_count <= DENSE_LIMIT else "power"
    degree = int(g.degrees()[0]) if g.is_regular() else None
    m, perron = normalized_adjacency(g)
    if g.vertex_count == 1:
        return SpectrumResult(0.0, "dense-full", 0.0, degree, [1.0])
    if method == "dense":
        if g.vertex_count > DENSE_HARD_LIMIT:
            raise ConfigurationError(f"dense path limited to {DENSE_HARD_LIMIT} vertices")
        tol = DENSE_TOL if tol is None else tol
        w, _, off = jacobi_eigh(m.toarray(), tol)
        # the Perron eigenvalue is simple for a connected graph: drop the top one
        lam = float(np.abs(w[:-1]).max())
        res = SpectrumResult(lam, "dense-full", off, degree, w.tolist())
    elif method == "power":
        tol = ITERATIVE_TOL if tol is None else tol
        lam, resid = _deflated_power_lambda(m.dot, g.vertex_count, perron, tol)
        res = SpectrumResult(lam, "power-deflate", resid, degree)
    else:
        raise ConfigurationError(f"unknown method {method!r}")
    if res.lam > 1 + 10 * tol:
        raise NumericalError(f"lambda {res.lam} exceeds 1", residual=res.residual)
    return res


def spectral_lambda(g: Graph, tol: float | None = None, method: str = "auto") -> SpectrumResult:
    """Like :func:`second_eigenvalue`, but a disconnected graph gets lambda = 1.

    For callers that certify an inequality, where lambda = 1 is the honest
    value and the bound may still hold trivially.
    """
    if g.vertex_count > 0 and not is_connected(g):
        degree = int(g.degrees()[0]) if g.is_regular() else None
        return SpectrumResult(1.0, "disconnected", 0.0, degree)
    return second_eigenvalue(g, tol, method)


def operator_second_eigenvalue(matvec: Callable, n: int, perron, tol: float = ITERATIVE_TOL,
                               max_matvecs: int = MAX_MATVECS) -> SpectrumResult:
    """Matrix-free lambda of a symmetric stochastic operator with known Perron vector."""
    perron = np.asarray(perron, dtype=np.float64)
    perron = perron / np.linalg.norm(perron)
    lam, resid = _deflated_power_lambda(matvec, n, perron, tol, max_matvecs)
    return SpectrumResult(lam, "power-deflate", resid)


def _deflated_power_lambda(matvec, n, perron, tol, max_matvecs=MAX_MATVECS):
    # (I + M)/2 isolates the largest non-trivial eigenvalue, (I - M)/2 the most negative
    shifted_plus = lambda x: 0.5 * (x + matvec(x))
    shifted_minus = lambda x: 0.5 * (x - matvec(x))
    budget = max_matvecs // 2
    mu_plus, r1 = _power(shifted_plus, n, perron, tol / 2, budget, seed=1)
    mu_minus, r2 = _power(shifted_minus, n, perron, tol / 2, budget, seed=2)
    top = 2 * mu_plus - 1
    bottom = 1 - 2 * mu_minus
    # residuals of the shifted problems scale by 2 back on the original operator
    return max(abs(top), abs(bottom)), 2 * max(r1, r2)


def _power(op, n, perron, tol, budget, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    x -= perron.dot(x) * perron
    x /= np.linalg.norm(x)
    resid = math.inf
    for _ in range(budget):
        y = op(x)
        y -= perron.dot(y) * perron
        mu = float(x.dot(y))
        resid = float(np.linalg.norm(y - mu * x))
        if resid <= tol:
            return mu, resid
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return 0.0, 0.0
        x = y / ny
    raise NumericalError(f"power iteration did not converge in {budget} matvecs", residual=resid)


def zigzag_function(l1: float, l2: float) -> float:
    """The zig-zag bound f(l1, l2) for lambda of a zig-zag product.

    f = (1 - l2^2) l1 / 2 + sqrt((1 - l2^2)^2 l1^2 + 4 l2^2) / 2.
    """
    for x in (l1, l2):
        if not (0.0 <= x <= 1.0):
            raise DomainError(f"zig-zag function needs arguments in [0, 1], got {x!r}")
    a = (1.0 - l2 * l2) * l1
    return 0.5 * a + 0.5 * math.sqrt(a * a + 4.0 * l2 * l2)


def main_bound(lambda_zz: float) -> float:
    """sqrt(1/2 + lambda_zz/2), the bound on lambda(G_walk)."""
    if not (0.0 <= lambda_zz <= 1.0):
        raise DomainError(f"main bound needs lambda in [0, 1], got {lambda_zz!r}")
    return math.sqrt(0.5 + 0.5 * lambda_zz)


def clip_unit(x: float, tol: float = 1e-7) -> float:
    """Clamp a computed spectral value into [0, 1], allowing round-off slack."""
    if x < -tol or x > 1 + tol:
        raise DomainError(f"value {x} is not a spectral value in [0, 1]")
    return min(max(x, 0.0), 1.0)


def operator_norm_on_complement(op, excluded, tol: float = ITERATIVE_TOL,
                                max_matvecs: int = MAX_MATVECS, seed: int = 0) -> float:
    """Spectral norm of ``op`` restricted to the orthogonal complement of ``excluded``.

    ``op`` is anything :func:`scipy.sparse.linalg.aslinearoperator` accepts
    (dense array, sparse matrix or LinearOperator with ``rmatvec``). The
    complement must be invariant under ``op``; this is checked first.
    """
    op = spla.aslinearoperator(op)
    u = np.asarray(excluded, dtype=np.float64).ravel()
    nu = np.linalg.norm(u)
    if nu == 0:
        raise ValueError("excluded vector must be non-zero")
    u = u / nu
    n = u.size
    if op.shape != (n, n):
        raise ValueError(f"operator shape {op.shape} does not match vector of length {n}")

    def proj(x):
        return x - u.dot(x) * u

    # complement invariant  <=>  op^T u is parallel to u
    drift = max(np.linalg.norm(proj(op.rmatvec(u))), np.linalg.norm(proj(op.matvec(u))))
    if drift > max(tol, 1e-10):
        raise StructuralError(f"operator does not preserve the complement (drift {drift:.3e})")

    rng = np.random.default_rng(seed)
    x = proj(rng.standard_normal(n))
    x /= np.linalg.norm(x)
    resid = math.inf
    for _ in range(max_matvecs // 2):
        y = proj(op.matvec(x))
        z = proj(op.rmatvec(y))
        sigma2 = float(x.dot(z))
        nz = np.linalg.norm(z)
        if nz == 0.0:
            return 0.0
        resid = float(np.linalg.norm(z - sigma2 * x))
        if resid <= tol * max(sigma2, 1e-300) or resid <= tol * tol:
            return math.sqrt(max(sigma2, 0.0))
        x = z / nz
    raise NumericalError("operator norm iteration did not converge", residual=resid)
