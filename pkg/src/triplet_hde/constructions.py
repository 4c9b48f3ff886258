"""Conlon's construction over F_2^t and the 3-product construction."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from math import comb
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, SamplingError, StructuralError
from .graphs import Graph, cayley_graph, johnson_graph
from .groups import F2Group, FiniteGroup, ProductGroup, group_from_descriptor
from .spectra import clip_unit, jacobi_eigh, second_eigenvalue, zigzag_function
from .triplet import TripleSet, build_gcay, build_structure, check_all
from .walk import BoundCheck, CertificateRecord, Pipeline, certify_main_theorem


# -- Sidon sets ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SidonSet:
    t: int
    elements: tuple
    seed: int = 0
    attempts: int = 0

    def to_dict(self):
        return {"t": self.t, "elements": list(self.elements), "seed": self.seed, "attempts": self.attempts}


def sidon_violation(elements):
    """First non-trivial solution of a+b = c+d in F_2^t, or None.

    Brute force over all pairs: every pair sum must be distinct.
    """
    seen = {}
    for a, b in itertools.combinations(sorted(elements), 2):
        s = a ^ b
        if s in seen:
            c, d = seen[s]
            return (c, d, a, b)
        seen[s] = (a, b)
    return None


def is_sidon(elements) -> bool:
    elements = list(elements)
    return len(set(elements)) == len(elements) and 0 not in elements and sidon_violation(elements) is None


def sample_sidon(t: int, size: int, seed: int, max_attempts: int = 100) -> SidonSet:
    """Greedy randomised Sidon set of ``size`` nonzero elements of F_2^t.

    Each attempt shuffles the nonzero elements and keeps an element whenever
    its sums with the kept elements avoid every existing pair sum. The
    resulting distribution is not uniform over Sidon sets.
    """
    if size < 3:
        raise ConfigurationError("a Sidon set for Conlon's construction needs at least 3 elements")
    F2Group(t)
    nonzero = (1 << t) - 1
    if size > nonzero or comb(size, 2) > nonzero:
        raise SamplingError(
            f"no {size}-element Sidon set in F_2^{t}: needs {size} distinct nonzero elements and "
            f"{comb(size, 2)} distinct nonzero pair sums, but F_2^{t} has only {nonzero} nonzero elements",
            attempts=0)
    rng = np.random.Generator(np.random.Philox(seed))
    for attempt in range(1, max_attempts + 1):
        chosen, sums = [], set()
        for x in rng.permutation(np.arange(1, nonzero + 1)).tolist():
            new = {x ^ y for y in chosen}
            if new & sums:
                continue
            chosen.append(x)
            sums |= new
            if len(chosen) == size:
                break
        if len(chosen) == size:
            elems = tuple(sorted(chosen))
            if not is_sidon(elems):
                raise AssertionError("greedy sampler produced a non-Sidon set")
            return SidonSet(t, elems, seed, attempt)
    raise SamplingError(f"no {size}-element Sidon set found in F_2^{t} after {max_attempts} attempts",
                        attempts=max_attempts)


# -- Conlon ---------------------------------------------------------------------------------

@dataclass
class PipelineResult:
    certificate: CertificateRecord
    extras: dict
    checks: list = field(default_factory=list)
    pipeline: Pipeline | None = field(default=None, repr=False)

    @property
    def passed(self) -> bool:
        return self.certificate.passed and all(c.passed for c in self.checks)


@dataclass
class IdentityCheck:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self):
        return {"name": self.name, "pass": self.passed, "detail": self.detail}


def conlon_triples(elements) -> TripleSet:
    return TripleSet.from_iterable(itertools.combinations(sorted(elements), 3))


def conlon_pipeline(sidon: SidonSet) -> PipelineResult:
    if not is_sidon(sidon.elements):
        raise ConfigurationError(f"{sidon.elements} is not a Sidon set")
    group = F2Group(sidon.t)
    S = list(sidon.elements)
    d = len(S)
    triples = conlon_triples(S)
    report = check_all(group, triples)
    if not report.passed:
        raise StructuralError("Conlon structure over a Sidon set failed its conditions", report=report)
    H = build_structure(group, triples)
    pipe = Pipeline.build(H)
    cert = certify_main_theorem(H, pipeline=pipe)

    base = cayley_graph(group, S)
    A = base.adjacency_matrix()
    A_cay = pipe.gcay.adjacency_matrix()
    twice = A @ A - d * np.eye(group.order, dtype=np.int64)
    identity_ok = bool(np.array_equal(2 * A_cay, twice))

    lam = second_eigenvalue(base).lam
    alpha = cert.spectra["lambda_gcay"]
    beta = cert.spectra["lambda_L"]
    lam_walk = cert.spectra["lambda_gwalk"]
    a_c, b_c = clip_unit(alpha), clip_unit(beta)

    johnson = johnson_graph(d, 2)
    pos = {s: i for i, s in enumerate(S)}
    relabel = np.array([johnson.labels.index(tuple(sorted((pos[a], pos[b]))))
                        for a, b in H.types.tolist()])
    L_keys = np.sort(relabel[np.repeat(np.arange(pipe.L.vertex_count), pipe.L.degrees())] * johnson.vertex_count
                     + relabel[pipe.L.indices])
    L_is_johnson = bool(np.array_equal(L_keys, johnson.half_edge_keys()))

    checks = [
        IdentityCheck("A_cay = (A^2 - dI)/2", identity_ok),
        IdentityCheck("L isomorphic to J(S,2)", L_is_johnson),
        BoundCheck.leq("alpha <= lambda^2 (1 + 1/(d+1))", abs(alpha), lam ** 2 * (1 + 1 / (d + 1)), 1e-12),
        BoundCheck.leq("beta <= 1/2", beta, 0.5, 1e-12),
        BoundCheck.leq("conlon_f_chain", lam_walk, math.sqrt(0.5 + 0.5 * zigzag_function(a_c, b_c))),
        BoundCheck.leq("conlon_linear", lam_walk, math.sqrt(0.5 * (1 + a_c + b_c))),
        BoundCheck.leq("conlon_preasymptotic", lam_walk, math.sqrt(0.75 + alpha / 2)),
    ]
    extras = {
        "S": S, "t": sidon.t, "d": d, "seed": sidon.seed, "attempts": sidon.attempts,
        "lambda_base": lam, "alpha": alpha, "beta": beta,
        "preasymptotic_bound": math.sqrt(0.75 + alpha / 2),
        # reported only: the O(1/d) term has no explicit constant
        "closed_form_rate": math.sqrt(3) / 2 + lam ** 2 / (2 * math.sqrt(3)),
    }
    return PipelineResult(cert, extras, checks, pipe)


def conlon_spectrum_check(S, t: int, tol: float = 1e-8) -> bool:
    """{(mu^2 - d)/2 : mu in spec(A)} equals the spectrum of the unnormalised A_cay."""
    group = F2Group(t)
    A = cayley_graph(group, S).adjacency_matrix(np.float64)
    H = build_structure(group, conlon_triples(S))
    A_cay = build_gcay(group, H.type_set).adjacency_matrix(np.float64)
    mu, _, _ = jacobi_eigh(A)
    nu, _, _ = jacobi_eigh(A_cay)
    predicted = np.sort((mu ** 2 - len(S)) / 2)
    return bool(np.allclose(predicted, nu, atol=tol, rtol=0))


# -- 3-product -----------------------------------------------------------------------------

@dataclass
class ThreeProductSpec:
    groups: list
    generators: list

    def __post_init__(self):
        if len(self.groups) != 3 or len(self.generators) != 3:
            raise ConfigurationError("a 3-product needs exactly three factor groups")
        sizes = {len(set(s)) for s in self.generators}
        if len(sizes) != 1:
            raise ConfigurationError(f"generator sets must have equal size, got {[len(s) for s in self.generators]}")
        if any(len(set(s)) != len(s) for s in self.generators):
            raise ConfigurationError("generator sets must not repeat elements")
        if len({g.order for g in self.groups}) != 1:
            raise ConfigurationError("factor groups must have equal order")
        for g, s in zip(self.groups, self.generators):
            g.check_elements(s)
            if {g.inv(x) for x in s} != set(s):
                raise ConfigurationError(f"generator set {sorted(s)} is not closed under inversion")
            if g.identity in s:
                raise ConfigurationError("generator sets must not contain the identity")

    @property
    def d(self) -> int:
        return len(self.generators[0])

    @classmethod
    def from_dict(cls, doc) -> "ThreeProductSpec":
        try:
            factors = doc["factors"]
            return cls([group_from_descriptor(f["group"]) for f in factors],
                       [[int(x) for x in f["generators"]] for f in factors])
        except (KeyError, TypeError) as exc:
            raise ConfigurationError(f"malformed 3-product spec: {exc}") from None

    def to_dict(self):
        return {"factors": [{"group": g.to_descriptor(), "generators": list(s)}
                            for g, s in zip(self.groups, self.generators)]}


def load_three_product_spec(path) -> ThreeProductSpec:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: malformed JSON: {exc}") from None
    return ThreeProductSpec.from_dict(doc)


def three_product_structure(spec: ThreeProductSpec):
    G = ProductGroup(spec.groups)
    hats = [[G.embed(i, s) for s in gens] for i, gens in enumerate(spec.generators)]
    return G, hats, TripleSet.from_iterable(itertools.product(*hats))


def tripartite_L_prime(spec: ThreeProductSpec) -> Graph:
    """The tripartite link graph, built from coordinate tuples.

    Vertices are tuples with one identity slot (``None``) and a generator
    index in the other two. Vertices of different parts share exactly one
    slot where both are non-identity; they are adjacent iff they agree there.
    """
    d = spec.d
    verts = []
    for missing in (0, 1, 2):
        for i, j in itertools.product(range(d), repeat=2):
            v = [None, None, None]
            free = [p for p in range(3) if p != missing]
            v[free[0]], v[free[1]] = i, j
            verts.append(tuple(v))
    edges = []
    for a, b in itertools.combinations(range(len(verts)), 2):
        u, v = verts[a], verts[b]
        mu, mv = u.index(None), v.index(None)
        if mu == mv:
            continue
        shared = 3 - mu - mv
        if u[shared] == v[shared]:
            edges.append((a, b))
    return Graph.from_edges(len(verts), edges, labels=verts)


def three_product_pipeline(spec: ThreeProductSpec, claimed_lambda_gcay: float | None = None) -> PipelineResult:
    G, hats, triples = three_product_structure(spec)
    report = check_all(G, triples)
    if not report.passed:
        raise StructuralError("3-product structure failed its conditions", report=report)
    H = build_structure(G, triples)
    pipe = Pipeline.build(H)
    cert = certify_main_theorem(H, pipeline=pipe)

    factor_graphs = [cayley_graph(g, s) for g, s in zip(spec.groups, spec.generators)]
    A = [fg.adjacency_matrix(np.float64) / spec.d for fg in factor_graphs]
    I = np.eye(spec.groups[0].order)
    tensor = (np.kron(np.kron(A[0], A[1]), I) + np.kron(np.kron(I, A[1]), A[2])
              + np.kron(np.kron(A[0], I), A[2])) / 3
    direct = pipe.gcay.adjacency_matrix(np.float64) / pipe.gcay.degrees()[0]
    tensor_err = float(np.abs(tensor - direct).max())

    factor_lams = [second_eigenvalue(fg).lam for fg in factor_graphs]
    lam3 = max(factor_lams)
    formula = (1 + 2 * lam3) / 3
    lam_cay = cert.spectra["lambda_gcay"]
    lam_L = cert.spectra["lambda_L"]
    lam_walk = cert.spectra["lambda_gwalk"]

    # psi: coordinate tuple -> type of embedded generators
    Lp = tripartite_L_prime(spec)
    psi = []
    for v in Lp.labels:
        pair = sorted(hats[p][i] for p, i in enumerate(v) if i is not None)
        psi.append(H.type_set.index[tuple(pair)])
    psi = np.array(psi)
    bijective = bool(np.array_equal(np.sort(psi), np.arange(len(H.type_set))))
    mapped = np.sort(psi[np.repeat(np.arange(Lp.vertex_count), Lp.degrees())] * Lp.vertex_count
                     + psi[Lp.indices])
    iso = bijective and bool(np.array_equal(mapped, pipe.L.half_edge_keys()))
    lam_Lp = second_eigenvalue(Lp).lam

    rate = math.sqrt(0.5 + 0.5 * zigzag_function(clip_unit(formula), 0.5))
    checks = [
        IdentityCheck("tensor identity", tensor_err <= 1e-12, {"max_abs_error": tensor_err}),
        BoundCheck.leq("lambda_gcay <= (1+2 lambda_3)/3", lam_cay, formula, 1e-9),
        IdentityCheck("lambda(L) = 1/2", abs(lam_L - 0.5) <= 1e-9, {"lambda_L": lam_L, "lambda_L_prime": lam_Lp}),
        IdentityCheck("L isomorphic to L' via psi", iso),
        BoundCheck.leq("three_product_rate", lam_walk, rate),
    ]
    extras = {
        "d": spec.d, "factor_lambdas": factor_lams, "lambda_3": lam3,
        "lambda_gcay_formula": formula, "lambda_gcay": lam_cay,
        "lambda_gcay_matches_formula": abs(lam_cay - formula) <= 1e-9,
        "lambda_L": lam_L, "lambda_L_prime": lam_Lp, "rate_bound": rate,
    }
    if claimed_lambda_gcay is not None:
        extras["claimed_lambda_gcay"] = claimed_lambda_gcay
        extras["lambda_gcay_matches_claim"] = abs(lam_cay - claimed_lambda_gcay) <= 1e-9
    return PipelineResult(cert, extras, checks, pipe)


def three_product_spectrum_check(spec: ThreeProductSpec, tol: float = 1e-8) -> bool:
    """Spectrum of normalised G_cay equals {(mu nu + nu xi + mu xi)/3} over factor spectra."""
    G, _, triples = three_product_structure(spec)
    H = build_structure(G, triples)
    gc = build_gcay(G, H.type_set)
    w, _, _ = jacobi_eigh(gc.adjacency_matrix(np.float64) / gc.degrees()[0])
    spectra = [jacobi_eigh(cayley_graph(g, s).adjacency_matrix(np.float64) / spec.d)[0]
               for g, s in zip(spec.groups, spec.generators)]
    predicted = np.sort([(a * b + b * c + a * c) / 3 for a, b, c in itertools.product(*spectra)])
    return bool(np.allclose(predicted, w, atol=tol, rtol=0))
