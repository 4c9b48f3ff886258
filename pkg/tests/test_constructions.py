import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triplet_hde.constructions import (SidonSet, ThreeProductSpec, conlon_pipeline, conlon_spectrum_check,
                                       conlon_triples, is_sidon, sample_sidon, sidon_violation,
                                       three_product_spectrum_check, three_product_structure,
                                       tripartite_L_prime)
from triplet_hde.errors import ConfigurationError, SamplingError
from triplet_hde.groups import CyclicGroup
from triplet_hde.spectra import second_eigenvalue


def test_documented_sidon_set():
    S = [0b0001, 0b0010, 0b0100, 0b1000, 0b1111]
    assert is_sidon(S)
    assert sidon_violation(S) is None


def test_sidon_violation_witness():
    w = sidon_violation([1, 2, 5, 6])
    assert w is not None
    a, b, c, d = w
    assert a ^ b == c ^ d and {a, b} != {c, d}


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**63 - 1))
def test_sampled_sets_are_sidon(seed):
    s = sample_sidon(5, 6, seed)
    assert len(s.elements) == 6 and is_sidon(s.elements)
    sums = [a ^ b for a, b in itertools.combinations(s.elements, 2)]
    assert len(set(sums)) == math.comb(6, 2)
    assert s.seed == seed and s.attempts >= 1


def test_sampling_is_deterministic():
    assert sample_sidon(6, 7, 123) == sample_sidon(6, 7, 123)


def test_pigeonhole_failure():
    with pytest.raises(SamplingError):
        sample_sidon(2, 4, 0)


def test_conlon_pipeline_values(conlon_result):
    ex = conlon_result.extras
    assert conlon_result.passed
    assert ex["d"] == 5
    assert ex["beta"] == pytest.approx(1 / 3, abs=1e-9)
    assert ex["alpha"] == pytest.approx(0.2, abs=1e-9)
    assert ex["lambda_base"] == pytest.approx(0.6, abs=1e-9)
    assert "closed_form_rate" in ex
    names = {c.name for c in conlon_result.checks}
    assert {"A_cay = (A^2 - dI)/2", "L isomorphic to J(S,2)", "conlon_preasymptotic"} <= names


def test_conlon_rejects_non_sidon():
    with pytest.raises(ConfigurationError):
        conlon_pipeline(SidonSet(4, (1, 2, 5, 6)))


def test_conlon_spectrum_identity():
    assert conlon_spectrum_check([1, 2, 4, 8, 15], 4)


def test_conlon_triples_are_all_3_subsets():
    assert len(conlon_triples([1, 2, 4, 8, 15])) == 10


def test_three_product_shape(three_spec):
    G, hats, triples = three_product_structure(three_spec)
    assert G.order == 125
    assert len(triples) == 8
    assert hats[0] == [G.encode((1, 0, 0)), G.encode((4, 0, 0))]


def test_three_product_checks(three_result):
    by_name = {c.name: c.passed for c in three_result.checks}
    assert by_name == {"tensor identity": True, "lambda_gcay <= (1+2 lambda_3)/3": True,
                       "lambda(L) = 1/2": True, "L isomorphic to L' via psi": True, "three_product_rate": True}
    assert three_result.certificate.passed


def test_three_product_gcay_lambda_value(three_result):
    # eigenvalues are (mu nu + nu xi + mu xi) / 3 over factor eigenvalues; the
    # maximum modulus comes from mu = nu = xi = -cos(pi/5)
    mu = -math.cos(math.pi / 5)
    assert three_result.certificate.spectra["lambda_gcay"] == pytest.approx(mu * mu, abs=1e-9)
    assert three_result.extras["lambda_gcay_matches_formula"] is False


def test_three_product_spectrum_by_characters(three_spec):
    assert three_product_spectrum_check(three_spec)


def test_tripartite_graph(three_spec):
    Lp = tripartite_L_prime(three_spec)
    assert Lp.vertex_count == 12
    assert second_eigenvalue(Lp).lam == pytest.approx(0.5, abs=1e-9)


@pytest.mark.parametrize("doc", [
    {},
    {"factors": []},
    {"factors": [{"group": {"kind": "cyclic", "n": 5}, "generators": [1, 4]}] * 2},
    {"factors": [{"group": {"kind": "cyclic", "n": 5}, "generators": [1, 2]}] * 3},
    {"factors": [{"group": {"kind": "cyclic", "n": 5}, "generators": [0]}] * 3},
    {"factors": [{"group": {"kind": "cyclic", "n": 5}, "generators": [1, 4]},
                 {"group": {"kind": "cyclic", "n": 7}, "generators": [1, 6]},
                 {"group": {"kind": "cyclic", "n": 5}, "generators": [1, 4]}]},
])
def test_bad_three_product_specs(doc):
    with pytest.raises(ConfigurationError):
        ThreeProductSpec.from_dict(doc)


def test_spec_round_trip(three_spec):
    again = ThreeProductSpec.from_dict(three_spec.to_dict())
    assert again.to_dict() == three_spec.to_dict()
    assert again.groups[0] == CyclicGroup(5)
    assert np.array_equal(three_spec.generators, [[1, 4]] * 3)
