import itertools
import json

import networkx as nx
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from triplet_hde.constructions import three_product_structure
from triplet_hde.errors import ConfigurationError, DomainError, StructuralError
from triplet_hde.graphs import cayley_graph, johnson_graph
from triplet_hde.groups import CyclicGroup, F2Group
from triplet_hde.triplet import (CONDITIONS, TripleSet, TypeSet, build_gcay, build_L, build_structure, check_all,
                                 load_triples, replay_witness, verify_lemma_two_centers)
from triplet_hde.walk import build_gwalk


def test_types_of_single_triple():
    G = F2Group(3)
    triples = TripleSet.from_iterable([[1, 2, 4]])
    ts = TypeSet(G, triples)
    assert ts.types.tolist() == [[1, 2], [1, 4], [2, 4]]
    L = build_L(triples, ts)
    assert L.edge_list() == [(0, 1), (0, 2), (1, 2)]


def test_single_triple_structure(fixtures_dir):
    G = F2Group(3)
    H = build_structure(G, load_triples(fixtures_dir / "single_triple.json", G))
    assert H.sizes()["hyper_triples"] == 8 and H.d_tilde == 1
    gcay = build_gcay(G, H.type_set)
    assert gcay.same_edges(cayley_graph(G, [1 ^ 2, 1 ^ 4, 2 ^ 4]))


def test_conlon_counts(conlon_structure):
    H = conlon_structure
    assert len(H.type_set) == 10
    assert H.sizes()["hyper_triples"] == 160
    assert len(H.skeleton) == 80
    assert H.d_tilde == 3


def test_conlon_L_is_johnson(conlon_structure):
    H = conlon_structure
    L = build_L(H.triple_set, H.type_set)
    ref = nx.Graph(johnson_graph(5, 2).edge_list())
    assert nx.is_isomorphic(nx.Graph(L.edge_list()), ref)


def test_conlon_gcay_is_sum_set(conlon_structure):
    S = [1, 2, 4, 8, 15]
    sums = [a ^ b for a, b in itertools.combinations(S, 2)]
    G = conlon_structure.group
    assert build_gcay(G, conlon_structure.type_set).same_edges(cayley_graph(G, sums))


def test_edge_map_and_action(conlon_structure):
    H = conlon_structure
    assert H.edge_of(0, (1, 2)) == (1, 2)
    assert H.edge_of(5, (1, 2)) == (1 ^ 5, 2 ^ 5)
    for tau in H.types.tolist():
        for g in range(16):
            assert H.edge_of(H.act(tau, g), H.types[H.inverse_type(tau)]) == H.edge_of(g, tau)


def test_second_center_in_characteristic_two(conlon_structure):
    H = conlon_structure
    for c, (a, b) in itertools.product(range(16), H.types.tolist()):
        centers = H.centers_of(H.edge_of(c, (a, b)))
        assert len(centers) == 2
        assert sorted(x for x, _ in centers) == sorted({c, a ^ b ^ c})


def test_three_product_centers(three_spec):
    G, hats, triples = three_product_structure(three_spec)
    H = build_structure(G, triples)
    assert len(H.type_set) == 12 and H.d_tilde == 2
    assert H.sizes()["hyper_triples"] == 1000
    e1, e2 = G.encode((1, 0, 0)), G.encode((0, 1, 0))
    for g in range(G.order):
        edge = (G.mul(e1, g), G.mul(e2, g))
        centers = sorted(c for c, _ in H.centers_of(edge))
        assert centers == sorted([g, G.mul(G.encode((1, 1, 0)), g)])


def test_lemma_two_centers_examples(conlon_structure, three_result):
    assert verify_lemma_two_centers(conlon_structure).passed
    assert verify_lemma_two_centers(three_result.pipeline.structure).passed


def test_non_sidon_fails_B_with_replayable_witness(fixtures_dir):
    G = F2Group(4)
    bad = load_triples(fixtures_dir / "non_sidon_triples.json", G)
    report = check_all(G, bad)
    assert report.failures == ["B"]
    w = report["B"].witness
    a, b = w["t"]
    c, d = w["t_prime"]
    assert a ^ b == c ^ d == w["key"]
    assert replay_witness(G, bad, report["B"])
    with pytest.raises(StructuralError) as info:
        build_structure(G, bad)
    assert info.value.report is report or info.value.report.failures == ["B"]


def test_disconnected_L_fails_D():
    G = F2Group(6)
    triples = TripleSet.from_iterable([[1, 2, 4], [8, 16, 32]])
    report = check_all(G, triples)
    assert not report["D"].passed
    assert replay_witness(G, triples, report["D"])


def test_condition_zero_rejects_inverse_pair():
    G = CyclicGroup(7)
    triples = TripleSet.from_iterable([[1, 6, 2]])
    report = check_all(G, triples)
    assert not report["0"].passed
    assert replay_witness(G, triples, report["0"])


def test_non_edge_lookup(conlon_structure):
    with pytest.raises(DomainError):
        conlon_structure.edge_id((0, 1))


def test_triple_set_validation():
    with pytest.raises(ConfigurationError):
        TripleSet.from_iterable([[1, 2]])
    with pytest.raises(ConfigurationError):
        TripleSet.from_iterable([[1, 1, 2]])
    with pytest.raises(ConfigurationError):
        TripleSet.from_iterable([[1, 2, 99]], F2Group(3))


def test_triples_json_round_trip(tmp_path):
    ts = TripleSet.from_iterable([[4, 1, 2], [1, 2, 8]])
    path = tmp_path / "t.json"
    path.write_text(json.dumps(ts.to_json()))
    assert load_triples(path) == ts


@st.composite
def random_structures(draw):
    if draw(st.booleans()):
        G = F2Group(draw(st.integers(3, 5)))
    else:
        G = CyclicGroup(draw(st.integers(7, 40)))
    elems = draw(st.lists(st.integers(1, G.order - 1), min_size=3, max_size=6, unique=True))
    combos = list(itertools.combinations(sorted(elems), 3))
    chosen = draw(st.lists(st.sampled_from(combos), min_size=1, max_size=min(6, len(combos)), unique=True))
    return G, TripleSet.from_iterable(chosen)


@settings(max_examples=120, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(random_structures())
def test_witnesses_replay_and_lemmas_hold(data):
    G, triples = data
    report = check_all(G, triples)
    assert set(report.to_dict()["conditions"]) == set(CONDITIONS)
    for name in report.failures:
        assert replay_witness(G, triples, report[name])
    if report.passed:
        H = build_structure(G, triples)
        assert verify_lemma_two_centers(H).passed
        gw = build_gwalk(H)
        assert gw.degree == 4 * H.d_tilde
        assert 2 * len(H.skeleton) == G.order * len(H.type_set)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 31), min_size=4, max_size=6, unique=True))
def test_sidon_iff_condition_B(S):
    G = F2Group(5)
    sums = [a ^ b for a, b in itertools.combinations(S, 2)]
    sidon = len(set(sums)) == len(sums)
    report = check_all(G, TripleSet.from_iterable(itertools.combinations(sorted(S), 3)))
    assert report["B"].passed == sidon
    if sidon:
        assert report.passed and report.d_tilde == len(S) - 2
