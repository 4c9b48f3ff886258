from pathlib import Path

import pytest

from triplet_hde.constructions import (SidonSet, conlon_pipeline, load_three_product_spec,
                                       three_product_pipeline)
from triplet_hde.groups import F2Group
from triplet_hde.triplet import build_structure, load_triples

FIXTURES = Path(__file__).parent / "fixtures"
CONLON_S = (1, 2, 4, 8, 15)

# (criterion, passed, detail) rows collected by test_acceptance
ACCEPTANCE_ROWS = []


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def conlon_structure():
    G = F2Group(4)
    return build_structure(G, load_triples(FIXTURES / "conlon_triples.json", G))


@pytest.fixture(scope="session")
def conlon_result():
    return conlon_pipeline(SidonSet(4, CONLON_S))


@pytest.fixture(scope="session")
def three_spec():
    return load_three_product_spec(FIXTURES / "three_product.json")


@pytest.fixture(scope="session")
def three_result(three_spec):
    return three_product_pipeline(three_spec)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_ROWS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_ROWS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
