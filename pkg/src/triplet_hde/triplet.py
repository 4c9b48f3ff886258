"""Triplet structures H = St(G, S): types, conditions 0-E, skeleton and centers.

Vocabulary used throughout:

* a *triple set* ``S`` is a family of 3-subsets of group elements;
* a *type* is a 2-subset of some triple of ``S`` (stored sorted);
* an *ordered type* is either ordering of a type;
* ``e(g, tau) = {tau_1 g, tau_2 g}`` is the skeleton edge of type ``tau`` at
  center ``g``;
* ``tau . g = tau_1 tau_2 g`` and ``tau^{-1} = {tau_1^{-1}, tau_2^{-1}}``.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .errors import ConfigurationError, DomainError, StructuralError
from .graphs import Graph, bfs_reach, cayley_graph
from .groups import FiniteGroup

CONDITIONS = ("0", "A", "B", "C", "D", "E")


# -- triple and type sets --------------------------------------------------------------

@dataclass(frozen=True)
class TripleSet:
    triples: tuple

    @classmethod
    def from_iterable(cls, triples: Iterable, group: FiniteGroup | None = None) -> "TripleSet":
        out = set()
        for t in triples:
            t = tuple(sorted(int(x) for x in t))
            if len(t) != 3 or len(set(t)) != 3:
                raise ConfigurationError(f"triple {t} must contain 3 distinct elements")
            if group is not None:
                group.check_elements(t)
            out.add(t)
        if not out:
            raise ConfigurationError("triple set is empty")
        return cls(tuple(sorted(out)))

    def __len__(self):
        return len(self.triples)

    def __iter__(self):
        return iter(self.triples)

    def elements(self) -> list[int]:
        return sorted({x for t in self.triples for x in t})

    def to_json(self) -> dict:
        return {"triples": [list(t) for t in self.triples]}


def load_triples(path, group: FiniteGroup | None = None) -> TripleSet:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: malformed JSON: {exc}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("triples"), list):
        raise ConfigurationError(f"{path}: expected an object with a 'triples' list")
    return TripleSet.from_iterable(doc["triples"], group)


class TypeSet:
    """The types of a triple set, with group-derived lookup tables.

    ``inverse[i]`` is the index of ``types[i]^{-1}`` or -1 when that pair is
    not a type; ``product[i]`` is ``tau_1 tau_2`` (meaningful under E).
    """

    def __init__(self, group: FiniteGroup, triple_set: TripleSet):
        pairs = sorted({p for t in triple_set for p in itertools.combinations(t, 2)})
        self.group = group
        self.types = np.array(pairs, dtype=np.int64).reshape(-1, 2)
        self.index = {p: i for i, p in enumerate(pairs)}
        inv = group.inv_array(self.types)
        self.inverse = np.array([self.index.get(tuple(sorted(map(int, p))), -1) for p in inv],
                                dtype=np.int64)
        self.product = np.asarray(group.mul_array(self.types[:, 0], self.types[:, 1]), dtype=np.int64)

    def __len__(self):
        return len(self.types)

    def ordered_types(self) -> list[tuple[int, int]]:
        return sorted([(a, b) for a, b in self.index] + [(b, a) for a, b in self.index])

    def lookup(self, tau) -> int:
        if isinstance(tau, (int, np.integer)):
            if not 0 <= tau < len(self.types):
                raise DomainError(f"type index {tau} out of range")
            return int(tau)
        key = tuple(sorted(int(x) for x in tau))
        if key not in self.index:
            raise DomainError(f"{key} is not a type")
        return self.index[key]


def derive_types(group: FiniteGroup, triple_set: TripleSet) -> TypeSet:
    return TypeSet(group, triple_set)


# -- the graph L -------------------------------------------------------------------------

def build_L(triple_set: TripleSet, types: TypeSet) -> Graph:
    """Types adjacent once per triple containing both; no self-loops."""
    src, dst = [], []
    for t in triple_set:
        idx = [types.index[p] for p in itertools.combinations(t, 2)]
        for i, j in itertools.permutations(idx, 2):
            src.append(i)
            dst.append(j)
    labels = [tuple(map(int, p)) for p in types.types]
    return Graph.from_half_edges(len(types), src, dst, labels)


def type_extensions(triple_set: TripleSet, types: TypeSet) -> np.ndarray:
    """Number of triples containing each type (the edge-regularity count)."""
    counts = np.zeros(len(types), dtype=np.int64)
    for t in triple_set:
        for p in itertools.combinations(t, 2):
            counts[types.index[p]] += 1
    return counts


# -- conditions ----------------------------------------------------------------------------

@dataclass
class ConditionResult:
    name: str
    passed: bool
    witness: Optional[dict] = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "witness": self.witness, "detail": self.detail}


@dataclass
class ConditionReport:
    results: dict
    d_tilde: Optional[int] = None

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results.values())

    @property
    def failures(self) -> list[str]:
        return [k for k in CONDITIONS if not self.results[k].passed]

    def __getitem__(self, name) -> ConditionResult:
        return self.results[name]

    def to_dict(self) -> dict:
        return {"passed": self.passed, "d_tilde": self.d_tilde,
                "conditions": {k: self.results[k].to_dict() for k in CONDITIONS}}


def check_0(group: FiniteGroup, types: TypeSet) -> ConditionResult:
    for a, b in types.types.tolist():
        if group.inv(a) == b:
            return ConditionResult("0", False, {"type": [a, b]}, f"type {{{a}, {b}}} is {{s, s^-1}}")
    return ConditionResult("0", True)


def check_A(group: FiniteGroup, types: TypeSet) -> ConditionResult:
    ordered = set(types.ordered_types())
    for a, b in sorted(ordered):
        inv = (group.inv(b), group.inv(a))
        if inv not in ordered:
            return ConditionResult("A", False, {"ordered_type": [a, b], "missing": list(inv)},
                                   f"({a}, {b}) in T_o but its inverse {inv} is not")
    return ConditionResult("A", True)


def _b_violation(group, t, u) -> bool:
    """True when ordered types t != u share t1 t2^-1 without u = t^-1."""
    if t == u:
        return False
    key_t = group.mul(t[0], group.inv(t[1]))
    key_u = group.mul(u[0], group.inv(u[1]))
    if key_t != key_u:
        return False
    return not (u[1] == group.inv(t[0]) and u[0] == group.inv(t[1]))


def check_B(group: FiniteGroup, types: TypeSet) -> ConditionResult:
    ordered = types.ordered_types()
    arr = np.array(ordered, dtype=np.int64)
    keys = group.mul_array(arr[:, 0], group.inv_array(arr[:, 1]))
    buckets = defaultdict(list)
    for key, t in zip(keys.tolist(), ordered):
        buckets[key].append(t)
    for key in sorted(buckets):
        bucket = buckets[key]
        if len(bucket) < 2:
            continue
        for t, u in itertools.permutations(bucket, 2):
            if _b_violation(group, t, u):
                return ConditionResult(
                    "B", False, {"t": list(t), "t_prime": list(u), "key": key},
                    f"t={t} and t'={u} share t1*t2^-1 = {key} but t' != t^-1")
    return ConditionResult("B", True)


def check_C(triple_set: TripleSet, types: TypeSet) -> tuple[ConditionResult, Optional[int]]:
    counts = type_extensions(triple_set, types)
    values = sorted(set(counts.tolist()))
    if len(values) == 1:
        return ConditionResult("C", True, detail=f"d_tilde = {values[0]}"), values[0]
    i = int(np.flatnonzero(counts == values[0])[0])
    j = int(np.flatnonzero(counts == values[-1])[0])
    witness = {"types": [types.types[i].tolist(), types.types[j].tolist()],
               "counts": [int(counts[i]), int(counts[j])]}
    return ConditionResult("C", False, witness, "types extend to different numbers of triples"), None


def check_D(triple_set: TripleSet, types: TypeSet) -> ConditionResult:
    L = build_L(triple_set, types)
    reached = bfs_reach(L, 0)
    if len(reached) == L.vertex_count:
        return ConditionResult("D", True)
    missing = min(set(range(L.vertex_count)) - reached)
    return ConditionResult("D", False, {"start": types.types[0].tolist(),
                                        "unreached_type": types.types[missing].tolist()},
                           "L is disconnected")


def check_E(group: FiniteGroup, types: TypeSet) -> ConditionResult:
    for a, b in types.types.tolist():
        if not group.commute(a, b):
            return ConditionResult("E", False, {"type": [a, b]}, f"{a} and {b} do not commute")
    return ConditionResult("E", True)


def check_all(group: FiniteGroup, triple_set: TripleSet) -> ConditionReport:
    """Evaluate all six conditions; none short-circuits the others."""
    for t in triple_set:
        group.check_elements(t)
    types = TypeSet(group, triple_set)
    c_result, d_tilde = check_C(triple_set, types)
    results = {
        "0": check_0(group, types),
        "A": check_A(group, types),
        "B": check_B(group, types),
        "C": c_result,
        "D": check_D(triple_set, types),
        "E": check_E(group, types),
    }
    return ConditionReport(results, d_tilde)


def replay_witness(group: FiniteGroup, triple_set: TripleSet, result: ConditionResult) -> bool:
    """Independently confirm that a failure witness really violates its condition."""
    if result.passed or result.witness is None:
        return False
    w = result.witness
    types = TypeSet(group, triple_set)
    pairs = {tuple(map(int, p)) for p in types.types.tolist()}
    ordered = pairs | {(b, a) for a, b in pairs}
    name = result.name
    if name == "0":
        a, b = w["type"]
        return tuple(sorted((a, b))) in pairs and group.mul(a, b) == group.identity
    if name == "A":
        a, b = w["ordered_type"]
        return (a, b) in ordered and (group.inv(b), group.inv(a)) not in ordered
    if name == "B":
        t, u = tuple(w["t"]), tuple(w["t_prime"])
        return t in ordered and u in ordered and _b_violation(group, t, u)
    if name == "C":
        recount = []
        for tau in w["types"]:
            tau = set(tau)
            recount.append(sum(1 for s in triple_set if tau <= set(s)))
        return recount[0] != recount[1]
    if name == "D":
        start, target = set(w["start"]), set(w["unreached_type"])
        seen, frontier = [start], [start]
        while frontier:
            nxt = []
            for tau in frontier:
                for s in triple_set:
                    if tau <= set(s):
                        for p in itertools.combinations(s, 2):
                            p = set(p)
                            if p not in seen:
                                seen.append(p)
                                nxt.append(p)
            frontier = nxt
        return target not in seen
    if name == "E":
        a, b = w["type"]
        return group.mul(a, b) != group.mul(b, a)
    raise ValueError(f"unknown condition {name!r}")


# -- the structure itself -------------------------------------------------------------------

class TripletStructure:
    """A commutative triplet structure with its skeleton bookkeeping.

    ``edge_index[g, tau]`` is the id (row of ``skeleton``) of ``e(g, tau)``;
    skeleton edges are sorted pairs in lexicographic order.
    """

    def __init__(self, group: FiniteGroup, triple_set: TripleSet, report: ConditionReport):
        self.group = group
        self.triple_set = triple_set
        self.report = report
        self.type_set = TypeSet(group, triple_set)
        self.d_tilde = report.d_tilde
        n = group.order
        triples = np.array(triple_set.triples, dtype=np.int64)
        g = group.elements()
        # St map: (g, s~) -> s~ g, enumerated g-major
        ht = np.asarray(group.mul_array(triples[None, :, :], g[:, None, None])).reshape(-1, 3)
        ht.sort(axis=1)
        uniq = np.unique(ht, axis=0)
        if len(uniq) != len(triples) * n:
            raise StructuralError(f"St is not injective: {len(uniq)} triples, expected {len(triples) * n}",
                                  report=report)
        self.hyper_triples = uniq
        tt = self.type_set.types
        ends = np.asarray(group.mul_array(tt[None, :, :], g[:, None, None]))
        ends.sort(axis=2)
        keys = ends[..., 0] * n + ends[..., 1]
        skel_keys = np.unique(keys)
        self._skeleton_keys = skel_keys
        self.skeleton = np.stack(np.divmod(skel_keys, n), axis=1)
        self.edge_index = np.searchsorted(skel_keys, keys)
        for arr in (self.hyper_triples, self.skeleton, self.edge_index):
            arr.setflags(write=False)

    @property
    def types(self) -> np.ndarray:
        return self.type_set.types

    def edge_id(self, edge) -> int:
        u, v = sorted(int(x) for x in edge)
        key = u * self.group.order + v
        i = int(np.searchsorted(self._skeleton_keys, key))
        if i >= len(self._skeleton_keys) or self._skeleton_keys[i] != key:
            raise DomainError(f"{(u, v)} is not a skeleton edge")
        return i

    def edge_ids(self, pairs: np.ndarray) -> np.ndarray:
        pairs = np.sort(np.asarray(pairs, dtype=np.int64), axis=-1)
        keys = pairs[..., 0] * self.group.order + pairs[..., 1]
        ids = np.searchsorted(self._skeleton_keys, keys)
        ok = (ids < len(self._skeleton_keys))
        ok[ok] = self._skeleton_keys[ids[ok]] == keys[ok]
        if not ok.all():
            raise DomainError("pair is not a skeleton edge")
        return ids

    def edge_of(self, g: int, tau) -> tuple[int, int]:
        self.group._check(g)
        i = self.type_set.lookup(tau)
        a, b = self.types[i]
        return tuple(sorted((self.group.mul(int(a), g), self.group.mul(int(b), g))))

    def act(self, tau, g: int) -> int:
        """``tau . g = tau_1 tau_2 g``."""
        i = self.type_set.lookup(tau)
        return self.group.mul(int(self.type_set.product[i]), g)

    def inverse_type(self, tau) -> int:
        i = self.type_set.lookup(tau)
        j = int(self.type_set.inverse[i])
        if j < 0:
            raise DomainError(f"inverse of type {self.types[i].tolist()} is not a type")
        return j

    @cached_property
    def _preimages(self) -> tuple[np.ndarray, np.ndarray]:
        flat = self.edge_index.ravel()
        order = np.argsort(flat, kind="stable")
        starts = np.searchsorted(flat[order], np.arange(len(self.skeleton) + 1))
        return order, starts

    def centers_of(self, edge) -> list[tuple[int, int]]:
        """All (center, type index) with e(center, type) = edge."""
        i = self.edge_id(edge)
        order, starts = self._preimages
        k = len(self.type_set)
        return [divmod(int(x), k) for x in order[starts[i]:starts[i + 1]]]

    def sizes(self) -> dict:
        return {"group_order": self.group.order, "triples": len(self.triple_set),
                "types": len(self.type_set), "d_tilde": self.d_tilde,
                "hyper_triples": len(self.hyper_triples), "skeleton_edges": len(self.skeleton)}


def build_structure(group: FiniteGroup, triple_set: TripleSet) -> TripletStructure:
    report = check_all(group, triple_set)
    if not report.passed:
        raise StructuralError(f"conditions failed: {', '.join(report.failures)}", report=report)
    H = TripletStructure(group, triple_set, report)
    if 2 * len(H.skeleton) != group.order * len(H.type_set):
        raise StructuralError("skeleton size differs from |G||T|/2", report=report)
    return H


@dataclass
class LemmaCheck:
    name: str
    passed: bool
    witness: Optional[dict] = None
    checked: int = 0

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "witness": self.witness, "checked": self.checked}


def verify_lemma_two_centers(H: TripletStructure) -> LemmaCheck:
    """Every skeleton edge has exactly two centers, (c, tau) and (tau.c, tau^-1)."""
    order, starts = H._preimages
    k = len(H.type_set)
    counts = np.diff(starts)
    bad = np.flatnonzero(counts != 2)
    if bad.size:
        i = int(bad[0])
        return LemmaCheck("two_centers", False, {"edge": H.skeleton[i].tolist(), "centers": int(counts[i])},
                          len(counts))
    pre = order.reshape(-1, 2)
    c, tau = np.divmod(pre[:, 0], k)
    c2, tau2 = np.divmod(pre[:, 1], k)
    g = H.group
    inv = H.type_set.inverse
    forward = (np.asarray(g.mul_array(H.type_set.product[tau], c)) == c2) & (inv[tau] == tau2)
    backward = (np.asarray(g.mul_array(H.type_set.product[tau2], c2)) == c) & (inv[tau2] == tau)
    ok = forward & backward
    if not ok.all():
        i = int(np.flatnonzero(~ok)[0])
        return LemmaCheck("two_centers", False, {
            "edge": H.skeleton[i].tolist(),
            "centers": [[int(c[i]), H.types[tau[i]].tolist()], [int(c2[i]), H.types[tau2[i]].tolist()]]},
            len(counts))
    return LemmaCheck("two_centers", True, None, len(counts))


def build_gcay(group: FiniteGroup, types: TypeSet) -> Graph:
    """Cay(G, T) with the action tau.g = tau_1 tau_2 g, kept as a multigraph."""
    for a, b in types.types.tolist():
        if not group.commute(a, b):
            raise StructuralError(f"type {{{a}, {b}}} does not commute (condition E)")
        if group.mul(a, b) == group.identity:
            raise StructuralError(f"type {{{a}, {b}}} is {{s, s^-1}} (condition 0)")
    return cayley_graph(group, types.product)
