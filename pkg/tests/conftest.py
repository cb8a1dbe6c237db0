from pathlib import Path

import pytest
from hypothesis import strategies as st

from compositionality import CONDITIONS, CombinationTable, ConditionBlock, JointDistribution
from compositionality.ingest import parse_table

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"


def load_fixture(name):
    return parse_table((FIXTURES / name).read_text())


@pytest.fixture
def toastgag():
    return load_fixture("toastgag.json")


@pytest.fixture
def applechip():
    return load_fixture("applechip.json")


@pytest.fixture
def violation():
    return load_fixture("violation.json")


def _simplex(k):
    return st.lists(st.floats(0.0, 1.0), min_size=k, max_size=k).filter(
        lambda w: sum(w) > 1e-3
    ).map(lambda w: [x / sum(w) for x in w])


def cells4():
    return _simplex(4)


@st.composite
def blocks(draw, condition=CONDITIONS[0]):
    p = draw(cells4())
    total = sum(p)
    return ConditionBlock(*(x / total for x in p), condition=condition)


@st.composite
def tables(draw):
    return CombinationTable({c: draw(blocks(c)) for c in CONDITIONS})


@st.composite
def joints(draw):
    return JointDistribution(tuple(draw(_simplex(16))))


def uniform_block(cond=CONDITIONS[0], n=None):
    return ConditionBlock(0.25, 0.25, 0.25, 0.25, condition=cond, n=n)


def product_table(a1, a2, b1, b2, n=None):
    a, b = {1: a1, 2: a2}, {1: b1, 2: b2}
    out = {}
    for c in CONDITIONS:
        x, y = a[c.a_index], b[c.b_index]
        out[c] = ConditionBlock(x * y, x * (1 - y), (1 - x) * y, (1 - x) * (1 - y),
                                condition=c, n=n)
    return CombinationTable(out, name="product")


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
