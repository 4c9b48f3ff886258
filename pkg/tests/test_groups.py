import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triplet_hde.errors import ConfigurationError, InvalidElementError
from triplet_hde.groups import (CyclicGroup, F2Group, ProductGroup, TableGroup, group_axiom_violations,
                                group_from_descriptor, load_group)


def small_groups():
    return st.one_of(
        st.integers(1, 6).map(F2Group),
        st.integers(1, 30).map(CyclicGroup),
        st.lists(st.integers(1, 5).map(CyclicGroup), min_size=1, max_size=3).map(ProductGroup),
    )


@settings(max_examples=60, deadline=None)
@given(small_groups(), st.data())
def test_axioms(group, data):
    a, b, c = (data.draw(st.integers(0, group.order - 1)) for _ in range(3))
    assert group.mul(group.mul(a, b), c) == group.mul(a, group.mul(b, c))
    assert group.mul(a, group.identity) == a == group.mul(group.identity, a)
    assert group.mul(a, group.inv(a)) == group.identity
    assert group.commute(a, b)


@settings(max_examples=40, deadline=None)
@given(small_groups())
def test_descriptor_round_trip(group):
    again = group_from_descriptor(json.loads(json.dumps(group.to_descriptor())))
    assert again == group
    assert np.array_equal(again.multiplication_table(), group.multiplication_table())


def test_f2_is_xor():
    g = F2Group(4)
    assert g.order == 16
    assert g.mul(0b1010, 0b0110) == 0b1100
    assert all(g.inv(x) == x for x in range(16))
    assert g.encode([1, 0, 1, 1]) == g.encode((1, 0, 1, 1))


def test_cyclic():
    z = CyclicGroup(5)
    assert z.mul(3, 4) == 2
    assert z.inv(1) == 4


def test_product_first_factor_most_significant():
    G = ProductGroup([CyclicGroup(5), CyclicGroup(3)])
    assert G.order == 15
    assert G.encode((2, 1)) == 2 * 3 + 1
    assert G.decode(7) == (2, 1)
    assert G.embed(0, 1) == 3
    assert G.embed(1, 1) == 1
    assert G.mul(G.encode((4, 2)), G.encode((3, 2))) == G.encode((2, 1))


def test_table_group_matches_cyclic():
    table = CyclicGroup(6).multiplication_table()
    T = TableGroup(table.tolist())
    assert T.order == 6 and T.identity == 0
    assert [T.inv(x) for x in range(6)] == [0, 5, 4, 3, 2, 1]
    assert group_axiom_violations(T) == []


@pytest.mark.parametrize("table, match", [
    ([[0, 1], [1, 1]], "inverse"),
    ([[1, 1], [1, 1]], "identity"),
    ([[0, 1, 2], [1, 0, 0], [2, 0, 0]], "inverse"),
    ([[0, 3]], "square"),
])
def test_table_group_rejects(table, match):
    with pytest.raises(ConfigurationError, match=match):
        TableGroup(table)


def test_table_group_rejects_non_associative():
    # a Latin square with identity 0 that is not a group (the smallest loop of order 5)
    table = [[0, 1, 2, 3, 4],
             [1, 0, 3, 4, 2],
             [2, 4, 0, 1, 3],
             [3, 2, 4, 0, 1],
             [4, 3, 1, 2, 0]]
    with pytest.raises(ConfigurationError, match="associative"):
        TableGroup(table)


def test_invalid_elements():
    g = CyclicGroup(5)
    with pytest.raises(InvalidElementError):
        g.mul(5, 0)
    with pytest.raises(InvalidElementError):
        g.inv(-1)
    with pytest.raises(IndexError):
        g.check_elements([0, 7])


@pytest.mark.parametrize("desc", [{}, {"kind": "nope"}, {"kind": "f2t"}, {"kind": "f2t", "t": 0},
                                  {"kind": "cyclic", "n": -3}, [1, 2]])
def test_bad_descriptors(desc):
    with pytest.raises(ConfigurationError):
        group_from_descriptor(desc)


def test_load_group(fixtures_dir):
    assert load_group(fixtures_dir / "f2_4.json") == F2Group(4)
    with pytest.raises(ConfigurationError, match="malformed"):
        load_group(fixtures_dir / "malformed.json")
