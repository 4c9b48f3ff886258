"""The auxiliary walk graph G_walk, the covering-map check and the 2D random walk."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError, StructuralError
from .graphs import Graph, check_regular
from .products import RepGraph, T_squared_norm, build_rep, zigzag_lambda
from .spectra import ITERATIVE_TOL, clip_unit, main_bound, spectral_lambda, zigzag_function
from .triplet import LemmaCheck, TripletStructure, build_L, build_gcay, verify_lemma_two_centers

# trials per independent random stream; fixed so results do not depend on threading
WALK_BLOCK = 4096
BOUND_SLACK = 1e-8


@dataclass
class WalkGraph:
    graph: Graph
    structure: TripletStructure
    degree: int

    @property
    def vertex_count(self) -> int:
        return self.graph.vertex_count

    def label(self, v: int) -> tuple[int, int]:
        return tuple(int(x) for x in self.structure.skeleton[v])


def gwalk_by_triples(H: TripletStructure) -> Graph:
    """Edges adjacent iff a hyper-triple contains both."""
    ht = H.hyper_triples
    sides = H.edge_ids(np.stack([ht[:, [0, 1]], ht[:, [0, 2]], ht[:, [1, 2]]], axis=1))
    src, dst = [], []
    for i in range(3):
        for j in range(3):
            if i != j:
                src.append(sides[:, i])
                dst.append(sides[:, j])
    return Graph.from_half_edges(len(H.skeleton), np.concatenate(src), np.concatenate(dst))


def gwalk_by_centers(H: TripletStructure, L: Graph | None = None) -> Graph:
    """Edges e(c, tau) ~ e(c, tau') for every center c and L-edge tau ~ tau'."""
    if L is None:
        L = build_L(H.triple_set, H.type_set)
    tau = np.repeat(np.arange(L.vertex_count), L.degrees())
    tau2 = L.indices
    E = H.edge_index
    src = E[:, tau].ravel()
    dst = E[:, tau2].ravel()
    return Graph.from_half_edges(len(H.skeleton), src, dst)


def build_gwalk(H: TripletStructure, L: Graph | None = None) -> WalkGraph:
    a = gwalk_by_triples(H)
    b = gwalk_by_centers(H, L)
    if not a.same_edges(b):
        raise StructuralError("the triple-containment and center/type constructions of G_walk differ")
    keys = a.half_edge_keys()
    if (np.diff(keys) == 0).any():
        raise StructuralError("G_walk has parallel edges")
    loops = np.divmod(keys, a.vertex_count)
    if (loops[0] == loops[1]).any():
        raise StructuralError("G_walk has a self-loop")
    degree = check_regular(a)
    if degree != 4 * H.d_tilde:
        raise StructuralError(f"G_walk is {degree}-regular, expected {4 * H.d_tilde}")
    return WalkGraph(a, H, degree)


def verify_lift(H: TripletStructure, rep: RepGraph, gwalk: WalkGraph) -> LemmaCheck:
    """Check that e: V(G_rep) -> V(G_walk) is a 2-to-1 covering map of the T-graph.

    Three exhaustive checks: the labelling is 2-to-1, every T-transition
    maps to a G_walk edge, and each T-neighbourhood maps bijectively onto
    the G_walk neighbourhood of the image.
    """
    label = H.edge_index.ravel()
    counts = np.bincount(label, minlength=gwalk.vertex_count)
    if not (counts == 2).all():
        e = int(np.flatnonzero(counts != 2)[0])
        return LemmaCheck("lift", False, {"check": "two_to_one", "edge": gwalk.label(e),
                                          "preimages": int(counts[e])}, 0)
    g = gwalk.graph
    deg = gwalk.degree
    walk_nbrs = g.indices.reshape(g.vertex_count, deg)
    for v in range(rep.n):
        image = label[rep.T_neighbors(v)]
        target = walk_nbrs[label[v]]
        if not np.isin(image, target).all():
            w = rep.T_neighbors(v)[~np.isin(image, target)][0]
            return LemmaCheck("lift", False, {"check": "homomorphism", "vertex": rep.vertex(v),
                                              "neighbor": rep.vertex(w)}, v)
        if len(image) != deg or not np.array_equal(np.sort(image), np.sort(target)):
            return LemmaCheck("lift", False, {"check": "bijection", "vertex": rep.vertex(v),
                                              "image_size": int(len(np.unique(image))), "expected": deg}, v)
    return LemmaCheck("lift", True, None, rep.n)


# -- certification --------------------------------------------------------------------------

@dataclass
class BoundCheck:
    name: str
    lhs: float
    rhs: float
    passed: bool

    @classmethod
    def leq(cls, name, lhs, rhs, slack=BOUND_SLACK):
        return cls(name, float(lhs), float(rhs), bool(lhs <= rhs + slack))

    def to_dict(self):
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "pass": self.passed}


@dataclass
class CertificateRecord:
    spectra: dict
    bounds: list
    lemmas: list
    sizes: dict
    spectrum_details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(b.passed for b in self.bounds) and all(l.passed for l in self.lemmas)

    def bound(self, name) -> BoundCheck:
        return next(b for b in self.bounds if b.name == name)


@dataclass
class Pipeline:
    """Every object derived from one structure, built once."""
    structure: TripletStructure
    L: Graph
    gcay: Graph
    rep: RepGraph
    gwalk: WalkGraph

    @classmethod
    def build(cls, H: TripletStructure) -> "Pipeline":
        L = build_L(H.triple_set, H.type_set)
        return cls(H, L, build_gcay(H.group, H.type_set), build_rep(H, L), build_gwalk(H, L))


def certify_main_theorem(H: TripletStructure, tol: float = ITERATIVE_TOL,
                         pipeline: Pipeline | None = None) -> CertificateRecord:
    p = pipeline or Pipeline.build(H)
    two_centers = verify_lemma_two_centers(H)
    lift = verify_lift(H, p.rep, p.gwalk)

    s_walk = spectral_lambda(p.gwalk.graph)
    s_zz = zigzag_lambda(p.rep)
    s_cay = spectral_lambda(p.gcay)
    s_L = spectral_lambda(p.L)
    t2 = T_squared_norm(p.rep, tol)

    lam_walk, lam_zz = s_walk.lam, clip_unit(s_zz.lam)
    lam_cay, lam_L = clip_unit(s_cay.lam), clip_unit(s_L.lam)
    f_val = zigzag_function(lam_cay, lam_L)
    bounds = [
        BoundCheck.leq("main_theorem", lam_walk, main_bound(lam_zz)),
        BoundCheck.leq("T_squared_norm", t2, 0.5 + 0.5 * lam_zz),
        BoundCheck.leq("lift_chain", lam_walk ** 2, t2),
        BoundCheck.leq("zigzag_theorem", lam_zz, f_val),
        BoundCheck.leq("corollary_rw", lam_walk, main_bound(f_val)),
    ]
    spectra = {"lambda_L": s_L.lam, "lambda_gcay": s_cay.lam, "lambda_zigzag": s_zz.lam,
               "T_squared_norm": t2, "lambda_gwalk": lam_walk}
    details = {"L": s_L.to_dict(), "gcay": s_cay.to_dict(), "zigzag": s_zz.to_dict(),
               "gwalk": s_walk.to_dict()}
    return CertificateRecord(spectra, bounds, [two_centers, lift], H.sizes(), details)


# -- simulation ---------------------------------------------------------------------------

@dataclass
class MixingCurve:
    tv: list
    trials: int
    seed: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "tv", "trials", "seed"])
        for t, v in enumerate(self.tv):
            w.writerow([t, repr(float(v)), self.trials, self.seed])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "MixingCurve":
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            raise ConfigurationError("empty mixing curve")
        return cls([float(r["tv"]) for r in rows], int(rows[0]["trials"]), int(rows[0]["seed"]))


def _start_distribution(n, start):
    if start is None:
        start = 0
    if isinstance(start, (int, np.integer)):
        if not 0 <= start < n:
            raise ConfigurationError(f"start vertex {start} out of range [0, {n})")
        p = np.zeros(n)
        p[start] = 1.0
        return p
    p = np.asarray(start, dtype=np.float64)
    if p.shape != (n,) or (p < 0).any() or not math.isclose(p.sum(), 1.0, abs_tol=1e-12):
        raise ConfigurationError("start distribution must be a probability vector over the vertices")
    return p


def _regular_nbrs(g: Graph) -> np.ndarray:
    d = check_regular(g)
    return g.indices.reshape(g.vertex_count, d)


def exact_tv_curve(g: Graph, steps: int, start=None) -> list[float]:
    """TV distance to uniform of the exact walk distribution, by repeated matvec."""
    nbrs = _regular_nbrs(g)
    n, d = nbrs.shape
    p = _start_distribution(n, start)
    out = [0.5 * float(np.abs(p - 1.0 / n).sum())]
    for _ in range(steps):
        # walk matrix is symmetric, so pushing mass forward is a neighbour average
        p = p[nbrs].sum(axis=1) / d
        out.append(0.5 * float(np.abs(p - 1.0 / n).sum()))
    return out


def _run_block(nbrs, steps, size, start, seed_seq):
    rng = np.random.Generator(np.random.Philox(seed_seq))
    n, d = nbrs.shape
    if start is None or isinstance(start, (int, np.integer)):
        pos = np.full(size, 0 if start is None else int(start), dtype=np.int64)
    else:
        pos = rng.choice(n, size=size, p=start)
    counts = np.empty((steps + 1, n), dtype=np.int64)
    counts[0] = np.bincount(pos, minlength=n)
    for t in range(1, steps + 1):
        pos = nbrs[pos, rng.integers(0, d, size=size)]
        counts[t] = np.bincount(pos, minlength=n)
    return counts


def simulate_walk(gwalk, steps: int, trials: int, seed: int, start=None, threads: int = 1) -> MixingCurve:
    """Monte Carlo TV-to-uniform curve of the walk; ``trials=0`` gives the exact curve.

    Trials are split into fixed blocks of :data:`WALK_BLOCK`, each driven by
    its own Philox stream spawned from ``seed``; counts are summed, so the
    result is identical for any ``threads``.
    """
    g = gwalk.graph if isinstance(gwalk, WalkGraph) else gwalk
    if steps < 0:
        raise ConfigurationError("steps must be >= 0")
    if trials < 0:
        raise ConfigurationError("trials must be >= 0")
    n = g.vertex_count
    if trials == 0:
        return MixingCurve(exact_tv_curve(g, steps, start), 0, int(seed))
    if start is not None and not isinstance(start, (int, np.integer)):
        start = _start_distribution(n, start)
    else:
        _start_distribution(n, start)
    nbrs = _regular_nbrs(g)
    sizes = [WALK_BLOCK] * (trials // WALK_BLOCK)
    if trials % WALK_BLOCK:
        sizes.append(trials % WALK_BLOCK)
    seqs = np.random.SeedSequence(int(seed)).spawn(len(sizes))
    jobs = list(zip(sizes, seqs))
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(lambda j: _run_block(nbrs, steps, j[0], start, j[1]), jobs))
    else:
        parts = [_run_block(nbrs, steps, s, start, q) for s, q in jobs]
    total = np.sum(parts, axis=0)
    tv = 0.5 * np.abs(total / trials - 1.0 / n).sum(axis=1)
    return MixingCurve([float(x) for x in tv], int(trials), int(seed))


def hoeffding_envelope(trials: int, delta: float = 0.01) -> float:
    return 3.0 * math.sqrt(math.log(2.0 / delta) / (2.0 * trials))
