import pytest
from hypothesis import given
from hypothesis import strategies as st

from compositionality import (
    CONDITIONS,
    CombinationTable,
    ConditionBlock,
    PrimingCondition,
    bell_ch,
    chsh,
    independence_residual,
    marginalize,
)
from compositionality.inequalities import (
    chsh_variants,
    parse_policy,
    policy_name,
    single_marginals,
)
from compositionality.jdc import project_to_ms

from .conftest import joints, product_table, tables

# Under exact selectivity, 4 * expr_k + 2 equals the CHSH variant at this index.
EXPR_TO_VARIANT = (2, 3, 0, 1)


def test_toast_gag_chsh(toastgag):
    report = chsh(toastgag)
    assert report.variant_values == pytest.approx((-0.73, 0.11, 1.23, -0.39), abs=1e-12)
    assert report.max_abs == pytest.approx(1.23, abs=0.02)
    assert not report.violated
    assert report.worst_variant == 3


def test_violation_chsh(violation):
    report = chsh(violation)
    assert report.variant_values == pytest.approx((-1.94, 2.06, 1.74, -1.74), abs=1e-12)
    assert report.violated
    assert report.borderline
    assert report.worst_variant == 2


def test_variant_one_has_minus_on_a2b2():
    assert chsh_variants((0.1, 0.2, 0.3, 0.4)) == pytest.approx(
        (0.1 + 0.2 + 0.3 - 0.4, 0.1 - 0.2 + 0.3 + 0.4, 0.1 + 0.2 - 0.3 + 0.4,
         -0.1 + 0.2 + 0.3 + 0.4))


def test_deterministic_extreme_saturates_bound():
    # E = (1, 1, 1, -1): perfect agreement except A2 with B2
    agree = (0.5, 0.0, 0.0, 0.5)
    disagree = (0.0, 0.5, 0.5, 0.0)
    cells = {c: agree for c in CONDITIONS[:3]}
    cells[CONDITIONS[3]] = disagree
    t = CombinationTable({c: ConditionBlock(*v, condition=c) for c, v in cells.items()})
    r = chsh(t)
    assert r.variant_values[0] == pytest.approx(4.0)
    assert r.violated


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_product_tables_never_violate(a1, a2, b1, b2):
    t = product_table(a1, a2, b1, b2)
    assert not chsh(t).violated
    assert bell_ch(t).satisfied
    assert independence_residual(t) <= 1e-12


@given(tables())
def test_chsh_identities(table):
    r = chsh(table)
    s = r.variant_values
    e = tuple(r.e_values[c] for c in CONDITIONS)
    assert all(-1 - 1e-12 <= x <= 1 + 1e-12 for x in e)
    assert s[0] + s[3] == pytest.approx(2 * (e[1] + e[2]), abs=1e-12)
    assert s[0] + s[1] == pytest.approx(2 * (e[0] + e[2]), abs=1e-12)
    assert r.max_abs <= 4 + 1e-12


@given(joints())
def test_bell_ch_matches_chsh_under_selectivity(joint):
    table = marginalize(joint)
    s = chsh(table).variant_values
    exprs = bell_ch(table).expressions
    for k, x in enumerate(exprs):
        assert 4 * x + 2 == pytest.approx(s[EXPR_TO_VARIANT[k]], abs=1e-9)
    # any joint satisfies both systems
    assert bell_ch(table).satisfied
    assert not chsh(table).violated


@given(joints(), st.sampled_from(CONDITIONS))
def test_policy_irrelevant_under_selectivity(joint, cond):
    table = marginalize(joint)
    avg = bell_ch(table, "average").expressions
    fixed = bell_ch(table, cond).expressions
    assert fixed == pytest.approx(avg, abs=1e-12)


def test_toast_gag_bell_ch(toastgag):
    r = bell_ch(toastgag)
    assert r.expressions[0] == pytest.approx(-0.195, abs=1e-9)
    assert r.satisfied
    assert r.policy == "average"


def test_violation_bell_ch_raw_and_projected(violation):
    raw = bell_ch(violation)
    assert raw.expressions == pytest.approx((-0.065, -0.92, -0.985, 0.0), abs=1e-9)
    assert raw.satisfied
    projected = bell_ch(project_to_ms(violation).table)
    assert not projected.satisfied


def test_marginal_policy_condition(toastgag):
    m = single_marginals(toastgag, PrimingCondition(1, 1))
    # A marginals from column B1, B marginals from row A1
    assert m["A1"] == pytest.approx(1.0)
    assert m["A2"] == pytest.approx(0.28)
    assert m["B1"] == pytest.approx(0.625)
    assert m["B2"] == pytest.approx(0.5625)
    assert bell_ch(toastgag, PrimingCondition(1, 1)).policy == "condition:1,1"


def test_marginal_spread_reported(applechip):
    assert bell_ch(applechip).marginal_spread["A1"] == pytest.approx(0.25)


@pytest.mark.parametrize("text, expected", [
    ("average", "average"),
    ("condition:1,2", PrimingCondition(1, 2)),
    ("Condition(2,1)", PrimingCondition(2, 1)),
])
def test_parse_policy(text, expected):
    assert parse_policy(text) == expected


def test_parse_policy_rejects_unknown():
    with pytest.raises(ValueError):
        parse_policy("median")
    assert policy_name(PrimingCondition(2, 2)) == "condition:2,2"


def test_independence_residual_examples(applechip):
    c = CONDITIONS[0]
    perfect = ConditionBlock(0.5, 0.0, 0.0, 0.5, condition=c)
    t = CombinationTable({k: ConditionBlock(*perfect.cells, condition=k) for k in CONDITIONS})
    assert independence_residual(t) == pytest.approx(0.25)
    assert independence_residual(applechip) >= 0.2


def test_tolerance_controls_violation_flag():
    agree = (0.5, 0.0, 0.0, 0.5)
    blocks = {c: ConditionBlock(*agree, condition=c) for c in CONDITIONS[:3]}
    blocks[CONDITIONS[3]] = ConditionBlock(0.25, 0.25, 0.25, 0.25, condition=CONDITIONS[3])
    t = CombinationTable(blocks)
    assert chsh(t).max_abs == pytest.approx(3.0)
    assert chsh(t).violated
    assert not chsh(t, tolerance=1.5).violated
