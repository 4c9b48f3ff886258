"""Replacement product G_cay (r) L, the walk operator T and the zig-zag operator.

Vertices of the replacement graph are pairs (g, tau) laid out g-major:
``index = g * |T| + tau``. Red edges are a copy of L inside every g-block;
blue edges form the perfect matching (g, tau) <-> (tau.g, tau^-1).
All operators are applied matrix-free.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse.linalg as spla

from .errors import ConfigurationError, StructuralError
from .graphs import Graph, check_regular
from .spectra import (ITERATIVE_TOL, SpectrumResult, operator_norm_on_complement,
                      operator_second_eigenvalue, spectral_lambda)
from .triplet import TripletStructure, build_L

# materialise the zig-zag graph only up to this many vertices
ZIGZAG_MATERIALIZE_LIMIT = 4096


class RepGraph:
    def __init__(self, group_order: int, L: Graph, blue):
        self.group_order = int(group_order)
        self.L = L
        self.k = L.vertex_count
        self.red_degree = check_regular(L)
        self.n = self.group_order * self.k
        blue = np.asarray(blue, dtype=np.int64)
        if blue.shape != (self.n,):
            raise ConfigurationError(f"blue permutation must have length {self.n}")
        if not np.array_equal(np.sort(blue), np.arange(self.n)):
            raise StructuralError("blue map is not a permutation")
        fixed = np.flatnonzero(blue == np.arange(self.n))
        if fixed.size:
            raise StructuralError("blue matching has a fixed point", witness={"vertex": self.vertex(fixed[0])})
        not_inv = np.flatnonzero(blue[blue] != np.arange(self.n))
        if not_inv.size:
            raise StructuralError("blue map is not an involution", witness={"vertex": self.vertex(not_inv[0])})
        self.blue = blue
        self.blue.setflags(write=False)
        self._red = L.adjacency_matrix(np.float64) / self.red_degree
        # red neighbour lists of L with multiplicity, shape (k, red_degree)
        self.red_nbrs = L.indices.reshape(self.k, self.red_degree)

    def vertex(self, index: int) -> tuple[int, int]:
        return tuple(int(x) for x in divmod(int(index), self.k))

    def index(self, g: int, tau: int) -> int:
        return int(g) * self.k + int(tau)

    @property
    def uniform(self) -> np.ndarray:
        return np.full(self.n, 1.0 / self.n)

    # P_R, P_B, T and friends; all symmetric except T

    def apply_red(self, x: np.ndarray) -> np.ndarray:
        x = self._check(x)
        return (x.reshape(self.group_order, self.k) @ self._red).ravel()

    def apply_blue(self, x: np.ndarray) -> np.ndarray:
        return self._check(x)[self.blue]

    def apply_T(self, x: np.ndarray) -> np.ndarray:
        """T x = (P_R x + P_R P_B x) / 2."""
        x = self._check(x)
        return self.apply_red(0.5 * (x + x[self.blue]))

    def apply_T_transpose(self, x: np.ndarray) -> np.ndarray:
        r = self.apply_red(self._check(x))
        return 0.5 * (r + r[self.blue])

    def apply_zigzag(self, x: np.ndarray) -> np.ndarray:
        """P_R P_B P_R x."""
        return self.apply_red(self.apply_red(x)[self.blue])

    def _check(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n,):
            raise ConfigurationError(f"vector has shape {x.shape}, expected ({self.n},)")
        return x

    def T_operator(self) -> spla.LinearOperator:
        return spla.LinearOperator((self.n, self.n), matvec=self.apply_T, rmatvec=self.apply_T_transpose,
                                   dtype=np.float64)

    def T_squared_operator(self) -> spla.LinearOperator:
        return spla.LinearOperator(
            (self.n, self.n),
            matvec=lambda x: self.apply_T(self.apply_T(x)),
            rmatvec=lambda x: self.apply_T_transpose(self.apply_T_transpose(x)),
            dtype=np.float64)

    def T_neighbors(self, v: int) -> np.ndarray:
        """Out-neighbours of v under T: red neighbours of v, then red neighbours of blue(v)."""
        g, tau = divmod(int(v), self.k)
        gb, taub = divmod(int(self.blue[v]), self.k)
        return np.concatenate([g * self.k + self.red_nbrs[tau], gb * self.k + self.red_nbrs[taub]])

    def with_blue(self, blue) -> "RepGraph":
        return RepGraph(self.group_order, self.L, blue)


def blue_matching(H: TripletStructure) -> np.ndarray:
    """The permutation (g, tau) -> (tau.g, tau^-1) in g-major layout."""
    ts = H.type_set
    if (ts.inverse < 0).any():
        raise StructuralError("a type has no inverse type (condition A)")
    k = len(ts)
    g = H.group.elements()
    target_g = np.asarray(H.group.mul_array(ts.product[None, :], g[:, None]))
    return (target_g * k + ts.inverse[None, :]).ravel()


def build_rep(H: TripletStructure, L: Graph | None = None) -> RepGraph:
    if L is None:
        L = build_L(H.triple_set, H.type_set)
    return RepGraph(H.group.order, L, blue_matching(H))


def zigzag_operator(rep: RepGraph) -> Graph:
    """Multigraph whose normalised adjacency is P_R P_B P_R ((2 d~)^2-regular)."""
    k, d = rep.k, rep.red_degree
    v = np.arange(rep.n)
    g, tau = np.divmod(v, k)
    first = g[:, None] * k + rep.red_nbrs[tau]              # (n, d)
    jumped = rep.blue[first]                                # (n, d)
    g2, tau2 = np.divmod(jumped, k)
    last = g2[..., None] * k + rep.red_nbrs[tau2]           # (n, d, d)
    return Graph.from_neighbor_array(last.reshape(rep.n, d * d))


def zigzag_lambda(rep: RepGraph, tol: float | None = None) -> SpectrumResult:
    if rep.n <= ZIGZAG_MATERIALIZE_LIMIT:
        return spectral_lambda(zigzag_operator(rep), tol)
    return operator_second_eigenvalue(rep.apply_zigzag, rep.n, rep.uniform,
                                      ITERATIVE_TOL if tol is None else tol)


def T_squared_norm(rep: RepGraph, tol: float = ITERATIVE_TOL) -> float:
    """||T^2|| restricted to the complement of the uniform vector."""
    return operator_norm_on_complement(rep.T_squared_operator(), rep.uniform, tol)


def verify_T_norm_bound(rep: RepGraph, tol: float = ITERATIVE_TOL, lambda_zz: float | None = None):
    """Return ``(lhs, rhs, passed)`` for ||T^2||_+ <= 1/2 + lambda(zig-zag)/2."""
    lhs = T_squared_norm(rep, tol)
    if lambda_zz is None:
        lambda_zz = zigzag_lambda(rep).lam
    rhs = 0.5 + 0.5 * lambda_zz
    return lhs, rhs, bool(lhs <= rhs + 1e-8)


def format_rep_header(rep: RepGraph) -> str:
    return f"layout g-major |T|={rep.k}"


def red_graph(rep: RepGraph) -> Graph:
    """The red edges alone: one copy of L per group element."""
    k = rep.k
    g = np.repeat(np.arange(rep.group_order), k)
    nb = g[:, None] * k + np.tile(rep.red_nbrs, (rep.group_order, 1))
    return Graph.from_neighbor_array(nb)


def replacement_graph(rep: RepGraph) -> Graph:
    """Red plus blue edges as one multigraph, for export."""
    k = rep.k
    g = np.repeat(np.arange(rep.group_order), k)
    nb = np.concatenate([g[:, None] * k + np.tile(rep.red_nbrs, (rep.group_order, 1)),
                         rep.blue[:, None]], axis=1)
    return Graph.from_neighbor_array(nb)
