import functools
import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CONLON_S
from triplet_hde.errors import ConfigurationError, StructuralError
from triplet_hde.groups import F2Group
from triplet_hde.products import (T_squared_norm, blue_matching, build_rep, format_rep_header, red_graph,
                                  replacement_graph, verify_T_norm_bound, zigzag_lambda, zigzag_operator)
from triplet_hde.spectra import operator_norm_on_complement
from triplet_hde.triplet import TripleSet, build_structure


@pytest.fixture(scope="module")
def conlon_rep(conlon_structure):
    return build_rep(conlon_structure)


@pytest.fixture(scope="module")
def single_structure():
    return build_structure(F2Group(3), TripleSet.from_iterable([[1, 2, 4]]))


@functools.lru_cache(maxsize=1)
def _conlon_rep():
    triples = TripleSet.from_iterable(itertools.combinations(CONLON_S, 3))
    return build_rep(build_structure(F2Group(4), triples))


def dense(apply, n):
    return np.column_stack([apply(e) for e in np.eye(n)])


def test_counts(conlon_rep, three_result, single_structure):
    assert conlon_rep.n == 160
    assert three_result.pipeline.rep.n == 1500
    rep = build_rep(single_structure)
    assert rep.n == 24
    pairs = {tuple(sorted((v, int(rep.blue[v])))) for v in range(rep.n)}
    assert len(pairs) == 12


def test_blue_pairs_in_characteristic_two(conlon_structure, conlon_rep):
    ts = conlon_structure.type_set
    for v in range(conlon_rep.n):
        g, tau = conlon_rep.vertex(v)
        a, b = ts.types[tau]
        assert conlon_rep.vertex(conlon_rep.blue[v]) == (a ^ b ^ g, tau)


def test_blue_is_an_involution(conlon_rep, three_result):
    for rep in (conlon_rep, three_result.pipeline.rep):
        P = np.eye(rep.n)[rep.blue]
        assert np.array_equal(P @ P, np.eye(rep.n))
        assert (rep.blue != np.arange(rep.n)).all()


def test_operators_are_stochastic(conlon_rep):
    n = conlon_rep.n
    R = dense(conlon_rep.apply_red, n)
    B = dense(conlon_rep.apply_blue, n)
    T = dense(conlon_rep.apply_T, n)
    assert np.allclose(R, R.T) and np.allclose(B, B.T)
    assert np.allclose(T, 0.5 * R + 0.5 * R @ B, atol=1e-15)
    assert np.allclose(T.sum(axis=0), 1) and np.allclose(T.sum(axis=1), 1)
    assert np.allclose(dense(conlon_rep.apply_T_transpose, n), T.T)
    Z = dense(conlon_rep.apply_zigzag, n)
    assert np.allclose(Z, R @ B @ R)
    assert np.allclose(Z, Z.T)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_T_preserves_uniform_and_complement(seed):
    rep = _conlon_rep()
    pi = rep.uniform
    assert np.abs(rep.apply_T(pi) - pi).max() <= 1e-14
    x = np.random.default_rng(seed).standard_normal(rep.n)
    x -= x.mean()
    assert abs(pi @ rep.apply_T(x)) <= 1e-12


def test_T_on_indicator_sums_to_one(conlon_rep):
    e = np.zeros(conlon_rep.n)
    e[17] = 1
    assert conlon_rep.apply_T(e).sum() == pytest.approx(1.0, abs=1e-15)


def test_T_neighbors_match_dense_matrix(conlon_rep):
    T = dense(conlon_rep.apply_T, conlon_rep.n)
    d = conlon_rep.red_degree
    for v in range(conlon_rep.n):
        counts = np.bincount(conlon_rep.T_neighbors(v), minlength=conlon_rep.n)
        assert np.allclose(T[:, v], counts / (2 * d))


def test_zigzag_graph(conlon_rep):
    zz = zigzag_operator(conlon_rep)
    assert zz.vertex_count == 160
    assert (zz.degrees() == 36).all()
    assert zz.is_symmetric()
    assert np.allclose(zz.adjacency_matrix(np.float64) / 36, dense(conlon_rep.apply_zigzag, 160))


def test_norm_bound_on_conlon(conlon_rep):
    lhs, rhs, ok = verify_T_norm_bound(conlon_rep)
    assert ok and lhs <= rhs


def test_norm_bound_on_single_triple(single_structure):
    rep = build_rep(single_structure)
    # G_cay = Cay(F_2^3, {3, 5, 6}) is disconnected, so the bound is the trivial 1 <= 1
    lhs, rhs, ok = verify_T_norm_bound(rep)
    assert ok and rhs == 1.0 and lhs == pytest.approx(1.0, abs=1e-8)


def test_zigzag_lambda_matrix_free_path(conlon_rep, monkeypatch):
    import triplet_hde.products as products
    dense_path = zigzag_lambda(conlon_rep)
    monkeypatch.setattr(products, "ZIGZAG_MATERIALIZE_LIMIT", 0)
    free = zigzag_lambda(conlon_rep)
    assert free.method == "power-deflate"
    assert abs(free.lam - dense_path.lam) <= 1e-8


def test_operator_norm_trivial_cases():
    u = np.ones(6)
    assert operator_norm_on_complement(np.eye(6), u) == pytest.approx(1.0)
    assert operator_norm_on_complement(np.full((6, 6), 1 / 6), u) == pytest.approx(0.0, abs=1e-12)


def test_T_squared_norm_matches_svd(conlon_rep):
    T = dense(conlon_rep.apply_T, conlon_rep.n)
    P = np.eye(conlon_rep.n) - 1 / conlon_rep.n
    assert T_squared_norm(conlon_rep) == pytest.approx(np.linalg.norm(P @ T @ T @ P, 2), abs=1e-8)


def test_bad_blue_maps(conlon_rep):
    with pytest.raises(ConfigurationError):
        conlon_rep.with_blue(np.arange(5))
    with pytest.raises(StructuralError, match="fixed point"):
        conlon_rep.with_blue(np.arange(conlon_rep.n))
    with pytest.raises(StructuralError, match="involution"):
        conlon_rep.with_blue(np.roll(np.arange(conlon_rep.n), 1))
    with pytest.raises(StructuralError, match="permutation"):
        conlon_rep.with_blue(np.zeros(conlon_rep.n, dtype=int))


def test_export_graphs(conlon_rep):
    assert format_rep_header(conlon_rep) == "layout g-major |T|=10"
    red = red_graph(conlon_rep)
    assert (red.degrees() == 6).all()
    full = replacement_graph(conlon_rep)
    assert (full.degrees() == 7).all()
    assert full.edge_count == red.edge_count + conlon_rep.n // 2


def test_blue_matching_layout(conlon_structure):
    blue = blue_matching(conlon_structure)
    assert blue.shape == (160,)
    assert np.array_equal(blue[blue], np.arange(160))
