"""Undirected multigraphs stored as sorted CSR neighbour arrays.

Conventions:

* a parallel edge is a repeated neighbour entry;
* a self-loop at ``u`` is a single entry ``u`` in ``u``'s list, so it
  contributes 1 to the degree and 1 to the diagonal of the adjacency matrix.
"""

from __future__ import annotations

import itertools
from collections import Counter, deque
from math import comb
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError, IrregularGraphError, StructuralError
from .groups import FiniteGroup


class Graph:
    def __init__(self, vertex_count: int, indptr, indices, labels=None):
        self.vertex_count = int(vertex_count)
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        if self.indptr.shape != (self.vertex_count + 1,):
            raise ConfigurationError("indptr must have vertex_count + 1 entries")
        if self.indices.size and (self.indices.min() < 0 or self.indices.max() >= self.vertex_count):
            raise ConfigurationError("neighbour index out of range")
        self.labels = labels
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)

    # -- construction -----------------------------------------------------

    @classmethod
    def from_neighbor_array(cls, nbrs, labels=None) -> "Graph":
        """Regular graph from an ``(n, d)`` array of neighbour lists."""
        nbrs = np.sort(np.asarray(nbrs, dtype=np.int64), axis=1)
        n, d = nbrs.shape
        return cls(n, np.arange(n + 1, dtype=np.int64) * d, nbrs.ravel(), labels)

    @classmethod
    def from_half_edges(cls, n: int, src, dst, labels=None) -> "Graph":
        """Graph from directed half-edges ``src[i] -> dst[i]``.

        The caller is responsible for listing both directions of every
        non-loop edge; see :meth:`from_edges` for the undirected form.
        """
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return cls(n, indptr, dst, labels)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], labels=None) -> "Graph":
        edges = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        u, v = edges[:, 0], edges[:, 1]
        loop = u == v
        src = np.concatenate([u, v[~loop]])
        dst = np.concatenate([v, u[~loop]])
        return cls.from_half_edges(n, src, dst, labels)

    # -- basic queries ----------------------------------------------------

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def edge_count(self) -> int:
        loops = int(np.count_nonzero(self.indices == np.repeat(np.arange(self.vertex_count), self.degrees())))
        return (self.indices.size - loops) // 2 + loops

    def is_regular(self) -> bool:
        deg = self.degrees()
        return deg.size > 0 and bool((deg == deg[0]).all())

    def sparse_adjacency(self) -> sp.csr_matrix:
        """Adjacency with multiplicities as a CSR matrix (duplicates summed)."""
        data = np.ones(self.indices.size, dtype=np.float64)
        a = sp.csr_matrix((data, self.indices, self.indptr), shape=(self.vertex_count,) * 2)
        a.sum_duplicates()
        return a

    def adjacency_matrix(self, dtype=np.int64) -> np.ndarray:
        a = np.zeros((self.vertex_count,) * 2, dtype=dtype)
        rows = np.repeat(np.arange(self.vertex_count), self.degrees())
        np.add.at(a, (rows, self.indices), 1)
        return a

    def half_edge_keys(self) -> np.ndarray:
        """Sorted ``u * n + v`` keys of every half-edge, with multiplicity."""
        rows = np.repeat(np.arange(self.vertex_count), self.degrees())
        return np.sort(rows * self.vertex_count + self.indices)

    def is_symmetric(self) -> bool:
        n = self.vertex_count
        keys = self.half_edge_keys()
        u, v = np.divmod(keys, n)
        return bool(np.array_equal(keys, np.sort(v * n + u)))

    def edge_list(self) -> list[tuple[int, int]]:
        """Undirected edges ``(u, v)`` with ``u <= v``, lexicographic, repeated by multiplicity."""
        out = []
        for u in range(self.vertex_count):
            for v in self.neighbors(u):
                if u <= v:
                    out.append((u, int(v)))
        return out

    def same_edges(self, other: "Graph") -> bool:
        return self.vertex_count == other.vertex_count and np.array_equal(
            self.half_edge_keys(), other.half_edge_keys())

    def __repr__(self):
        return f"Graph(n={self.vertex_count}, edges={self.edge_count})"


# -- generators ---------------------------------------------------------------

def cayley_graph(group: FiniteGroup, gens, labels=None) -> Graph:
    """Cay(G, S) with one edge ``{g, s*g}`` per vertex ``g`` and generator ``s``.

    ``gens`` is a multiset; it must be closed under inversion with matching
    multiplicities so that the result is undirected.
    """
    gens = group.check_elements(list(gens))
    if gens.size == 0:
        raise ConfigurationError("Cayley graph needs at least one generator")
    count = Counter(gens.tolist())
    for s, m in sorted(count.items()):
        si = group.inv(s)
        if count.get(si, 0) != m:
            raise StructuralError(
                f"generator multiset not inverse-closed: {s} appears {m} times, its inverse {si} "
                f"appears {count.get(si, 0)} times",
                witness={"generator": s, "inverse": si},
            )
    nbrs = group.mul_array(gens[None, :], group.elements()[:, None])
    return Graph.from_neighbor_array(nbrs, labels)


def johnson_graph(n: int, k: int) -> Graph:
    """J(n, k): k-subsets of range(n), adjacent iff they share k-1 elements."""
    if not (isinstance(n, int) and isinstance(k, int)) or not 0 < k < n:
        raise ConfigurationError(f"Johnson graph needs 0 < k < n, got n={n!r}, k={k!r}")
    verts = list(itertools.combinations(range(n), k))
    index = {v: i for i, v in enumerate(verts)}
    nbrs = np.empty((len(verts), k * (n - k)), dtype=np.int64)
    for i, v in enumerate(verts):
        vs = set(v)
        row = []
        for out in v:
            for new in range(n):
                if new not in vs:
                    row.append(index[tuple(sorted(vs - {out} | {new}))])
        nbrs[i] = row
    assert len(verts) == comb(n, k)
    return Graph.from_neighbor_array(nbrs, labels=verts)


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


# -- properties -----------------------------------------------------------------

def is_connected(g: Graph) -> bool:
    if g.vertex_count == 0:
        raise ConfigurationError("connectivity of the empty graph is undefined")
    return len(bfs_reach(g, 0)) == g.vertex_count


def bfs_reach(g: Graph, start: int) -> set[int]:
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in g.neighbors(u).tolist():
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def check_regular(g: Graph) -> int:
    """Common degree of ``g``; raises :class:`IrregularGraphError` naming a bad vertex."""
    deg = g.degrees()
    if deg.size == 0:
        raise ConfigurationError("regularity of the empty graph is undefined")
    # report the vertex whose degree differs from the most common one
    values, counts = np.unique(deg, return_counts=True)
    common = int(values[counts.argmax()])
    bad = np.flatnonzero(deg != common)
    if bad.size:
        v = int(bad[0])
        raise IrregularGraphError(v, int(deg[v]), common)
    return common


# -- edge-list text format --------------------------------------------------------

def format_edge_list(g: Graph, header: str | None = None) -> str:
    edges = g.edge_list()
    lines = []
    if header:
        lines.append(f"# {header}")
    lines.append(f"{g.vertex_count} {len(edges)}")
    lines.extend(f"{u} {v}" for u, v in edges)
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> Graph:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise ConfigurationError("edge list is empty")
    try:
        n, m = (int(x) for x in rows[0])
        edges = [(int(a), int(b)) for a, b in rows[1:]]
    except ValueError:
        raise ConfigurationError("edge list lines must hold two integers") from None
    if len(edges) != m:
        raise ConfigurationError(f"edge list header announces {m} edges, found {len(edges)}")
    if edges and (min(min(e) for e in edges) < 0 or max(max(e) for e in edges) >= n):
        raise ConfigurationError("edge endpoint out of range")
    return Graph.from_edges(n, edges)


def write_edge_list(g: Graph, path, header: str | None = None) -> None:
    Path(path).write_text(format_edge_list(g, header))


def read_edge_list(path) -> Graph:
    return parse_edge_list(Path(path).read_text())
