"""Finite groups with elements encoded as dense integer indices.

Four kinds are supported:

* ``F2Group`` -- the boolean vector space F_2^t, elements are bit patterns and
  the law is XOR.
* ``CyclicGroup`` -- Z_n with addition mod n.
* ``ProductGroup`` -- a direct product, elements encoded in mixed radix with
  the *first* factor most significant (so Kronecker products of factor
  matrices line up with the element order).
* ``TableGroup`` -- an explicit multiplication table, validated on load.

Every kind exposes scalar ``mul``/``inv`` plus vectorised ``mul_array`` /
``inv_array`` working on numpy integer arrays.
"""

from __future__ import annotations

import itertools
import json
import math
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, InvalidElementError

# exhaustive associativity check up to this order, sampled above
_EXHAUSTIVE_ASSOC = 256
_ASSOC_SAMPLES = 200_000


class FiniteGroup:
    kind: str = ""
    order: int
    identity: int = 0

    def mul(self, a: int, b: int) -> int:
        self._check(a)
        self._check(b)
        return int(self.mul_array(np.int64(a), np.int64(b)))

    def inv(self, a: int) -> int:
        self._check(a)
        return int(self.inv_array(np.int64(a)))

    def mul_array(self, a, b) -> np.ndarray:
        raise NotImplementedError

    def inv_array(self, a) -> np.ndarray:
        raise NotImplementedError

    def elements(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.int64)

    def left_mul(self, s: int) -> np.ndarray:
        """The permutation ``g -> s*g`` as an array indexed by ``g``."""
        self._check(s)
        return np.asarray(self.mul_array(np.int64(s), self.elements()), dtype=np.int64)

    def commute(self, a: int, b: int) -> bool:
        return self.mul(a, b) == self.mul(b, a)

    def multiplication_table(self) -> np.ndarray:
        e = self.elements()
        return np.asarray(self.mul_array(e[:, None], e[None, :]), dtype=np.int64)

    def encode(self, value) -> int:
        """Canonical index of a structured element (identity for int kinds)."""
        return int(value)

    def decode(self, index: int):
        self._check(index)
        return int(index)

    def to_descriptor(self) -> dict:
        raise NotImplementedError

    def _check(self, a) -> None:
        if isinstance(a, (bool, np.bool_)) or not isinstance(a, (int, np.integer)):
            raise InvalidElementError(f"group element must be an integer index, got {a!r}")
        if not 0 <= int(a) < self.order:
            raise InvalidElementError(f"element {a} out of range for group of order {self.order}")

    def check_elements(self, arr) -> np.ndarray:
        arr = np.asarray(arr, dtype=np.int64)
        if arr.size and (arr.min() < 0 or arr.max() >= self.order):
            bad = arr[(arr < 0) | (arr >= self.order)].flat[0]
            raise InvalidElementError(f"element {bad} out of range for group of order {self.order}")
        return arr

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and self.to_descriptor() == other.to_descriptor()

    def __hash__(self):
        return hash(json.dumps(self.to_descriptor(), sort_keys=True))

    def __repr__(self):
        return f"{type(self).__name__}({self.to_descriptor()})"


class F2Group(FiniteGroup):
    kind = "f2t"

    def __init__(self, t: int):
        if not isinstance(t, int) or t < 1 or t > 40:
            raise ConfigurationError(f"F_2^t needs 1 <= t <= 40, got {t!r}")
        self.t = t
        self.order = 1 << t

    def mul_array(self, a, b):
        return np.bitwise_xor(a, b)

    def inv_array(self, a):
        return np.asarray(a)

    def encode(self, value) -> int:
        if isinstance(value, (int, np.integer)):
            return int(value)
        bits = list(value)
        if len(bits) != self.t or any(b not in (0, 1) for b in bits):
            raise InvalidElementError(f"expected {self.t} bits, got {value!r}")
        return sum(int(b) << i for i, b in enumerate(bits))

    def to_descriptor(self):
        return {"kind": "f2t", "t": self.t}


class CyclicGroup(FiniteGroup):
    kind = "cyclic"

    def __init__(self, n: int):
        if not isinstance(n, int) or n < 1:
            raise ConfigurationError(f"Z_n needs a positive integer n, got {n!r}")
        self.n = n
        self.order = n

    def mul_array(self, a, b):
        return np.mod(np.add(a, b), self.n)

    def inv_array(self, a):
        return np.mod(np.negative(a), self.n)

    def to_descriptor(self):
        return {"kind": "cyclic", "n": self.n}


class ProductGroup(FiniteGroup):
    kind = "product"

    def __init__(self, factors: Sequence[FiniteGroup]):
        factors = tuple(factors)
        if not factors:
            raise ConfigurationError("product of an empty list of groups")
        self.factors = factors
        self.radices = tuple(f.order for f in factors)
        self.order = math.prod(self.radices)
        # place value of each factor, first factor most significant
        self._place = tuple(math.prod(self.radices[i + 1:]) for i in range(len(factors)))
        self.identity = self.encode(tuple(f.identity for f in factors))

    def components(self, a) -> list[np.ndarray]:
        a = np.asarray(a, dtype=np.int64)
        return [(a // p) % r for p, r in zip(self._place, self.radices)]

    def combine(self, parts) -> np.ndarray:
        out = np.zeros(np.broadcast(*[np.asarray(p) for p in parts]).shape, dtype=np.int64)
        for p, x in zip(self._place, parts):
            out = out + np.asarray(x, dtype=np.int64) * p
        return out

    def mul_array(self, a, b):
        ca, cb = self.components(a), self.components(b)
        return self.combine([f.mul_array(x, y) for f, x, y in zip(self.factors, ca, cb)])

    def inv_array(self, a):
        return self.combine([f.inv_array(x) for f, x in zip(self.factors, self.components(a))])

    def encode(self, value) -> int:
        if isinstance(value, (int, np.integer)):
            return int(value)
        value = tuple(value)
        if len(value) != len(self.factors):
            raise InvalidElementError(f"expected {len(self.factors)} components, got {value!r}")
        for f, x in zip(self.factors, value):
            f._check(int(x))
        return int(self.combine([int(x) for x in value]))

    def decode(self, index: int) -> tuple:
        self._check(index)
        return tuple(int(c) for c in self.components(index))

    def embed(self, position: int, x: int) -> int:
        """Index of the element equal to ``x`` in one factor and identity elsewhere."""
        parts = [f.identity for f in self.factors]
        self.factors[position]._check(x)
        parts[position] = x
        return self.encode(parts)

    def to_descriptor(self):
        return {"kind": "product", "factors": [f.to_descriptor() for f in self.factors]}


class TableGroup(FiniteGroup):
    """A group given by its Cayley table; ``table[a][b]`` is ``a*b``."""

    kind = "table"

    def __init__(self, table):
        try:
            tab = np.asarray(table, dtype=np.int64)
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(f"multiplication table is not an integer matrix: {exc}") from None
        if tab.ndim != 2 or tab.shape[0] != tab.shape[1] or tab.shape[0] == 0:
            raise ConfigurationError(f"multiplication table must be square and non-empty, got shape {tab.shape}")
        n = tab.shape[0]
        if tab.min() < 0 or tab.max() >= n:
            raise ConfigurationError("multiplication table entries must be element indices in [0, n)")
        self.order = n
        self.table = tab
        self.table.setflags(write=False)
        self.identity = self._find_identity()
        self._inverse = self._find_inverses()
        self._check_associative()

    def _find_identity(self) -> int:
        e = np.arange(self.order)
        for cand in range(self.order):
            if np.array_equal(self.table[cand], e) and np.array_equal(self.table[:, cand], e):
                return cand
        raise ConfigurationError("multiplication table has no two-sided identity")

    def _find_inverses(self) -> np.ndarray:
        hits = self.table == self.identity
        if not (hits.sum(axis=1) == 1).all():
            bad = int(np.flatnonzero(hits.sum(axis=1) != 1)[0])
            raise ConfigurationError(f"element {bad} does not have a unique right inverse")
        inv = hits.argmax(axis=1)
        if not (self.table[inv, np.arange(self.order)] == self.identity).all():
            raise ConfigurationError("right inverses are not left inverses")
        inv.setflags(write=False)
        return inv

    def _check_associative(self) -> None:
        n, tab = self.order, self.table
        if n <= _EXHAUSTIVE_ASSOC:
            for a in range(n):
                left = tab[tab[a]]        # (a*b)*c indexed [b, c]
                right = tab[a][tab]       # a*(b*c) indexed [b, c]
                if not np.array_equal(left, right):
                    b, c = map(int, np.argwhere(left != right)[0])
                    raise ConfigurationError(f"table is not associative at ({a}, {b}, {c})")
        else:
            rng = np.random.default_rng(0)
            a, b, c = rng.integers(0, n, size=(3, _ASSOC_SAMPLES))
            bad = tab[tab[a, b], c] != tab[a, tab[b, c]]
            if bad.any():
                i = int(np.flatnonzero(bad)[0])
                raise ConfigurationError(f"table is not associative at ({a[i]}, {b[i]}, {c[i]})")

    def mul_array(self, a, b):
        return self.table[a, b]

    def inv_array(self, a):
        return self._inverse[a]

    def to_descriptor(self):
        return {"kind": "table", "mul": self.table.tolist()}


def product_group(factors: Sequence[FiniteGroup]) -> ProductGroup:
    return ProductGroup(factors)


def group_from_descriptor(desc) -> FiniteGroup:
    """Build a group from its JSON descriptor.

    >>> group_from_descriptor({"kind": "cyclic", "n": 5}).order
    5
    """
    if not isinstance(desc, dict) or "kind" not in desc:
        raise ConfigurationError(f"group descriptor must be an object with a 'kind' key, got {desc!r}")
    kind = desc["kind"]
    try:
        if kind == "f2t":
            return F2Group(desc["t"])
        if kind == "cyclic":
            return CyclicGroup(desc["n"])
        if kind == "product":
            return ProductGroup([group_from_descriptor(f) for f in desc["factors"]])
        if kind == "table":
            return TableGroup(desc["mul"])
    except KeyError as exc:
        raise ConfigurationError(f"group descriptor of kind {kind!r} is missing {exc}") from None
    raise ConfigurationError(f"unknown group kind {kind!r}")


def load_group(path) -> FiniteGroup:
    try:
        desc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: malformed JSON: {exc}") from None
    return group_from_descriptor(desc)


def group_axiom_violations(group: FiniteGroup, limit: int = 128):
    """Exhaustively check the group axioms for small groups.

    Returns a list of human readable violations (empty when the axioms hold).
    Used by tests and by the table loader's sanity path.
    """
    if group.order > limit:
        raise ConfigurationError(f"exhaustive axiom check limited to order {limit}")
    tab = group.multiplication_table()
    e = group.identity
    out = []
    idx = np.arange(group.order)
    if not (np.array_equal(tab[e], idx) and np.array_equal(tab[:, e], idx)):
        out.append("identity is not two-sided")
    inv = np.asarray(group.inv_array(idx))
    if not ((tab[idx, inv] == e).all() and (tab[inv, idx] == e).all()):
        out.append("inverse fails")
    for a, b in itertools.product(range(group.order), repeat=2):
        if not np.array_equal(tab[tab[a, b]], tab[a][tab[b]]):
            out.append(f"associativity fails for ({a}, {b}, .)")
            break
    return out
