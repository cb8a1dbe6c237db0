import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from compositionality import (
    CONDITIONS,
    GroundTruth,
    JointDistribution,
    aggregate,
    bell_ch,
    jdc,
    marginal_diffs,
    marginalize,
    random_joint,
    sample_trials,
    selectivity_test,
)
from compositionality.ingest import dump_table
from compositionality.model import JOINT_CELLS
from compositionality.synth import dump_truth, load_truth

from .conftest import joints, load_fixture

RECOVERY_SEED = 20240917


def _point_mass(signs):
    q = [0.0] * 16
    q[JOINT_CELLS.index(signs)] = 1.0
    return JointDistribution(tuple(q))


def test_marginalize_uniform():
    table = marginalize(JointDistribution((1 / 16,) * 16))
    for block in table:
        assert block.cells == pytest.approx((0.25,) * 4)


def test_marginalize_point_mass():
    for block in marginalize(_point_mass((1, 1, 1, 1))):
        assert block.cells == (1.0, 0.0, 0.0, 0.0)


def test_marginalize_perfect_correlation():
    q = [0.0] * 16
    q[JOINT_CELLS.index((1, 1, 1, 1))] = 0.5
    q[JOINT_CELLS.index((-1, -1, -1, -1))] = 0.5
    for block in marginalize(JointDistribution(tuple(q))):
        assert block.cells == (0.5, 0.0, 0.0, 0.5)


@given(joints())
def test_marginalize_is_selectivity_exact(joint):
    assert max(marginal_diffs(marginalize(joint)).values()) <= 1e-15


def test_sample_point_mass():
    recs = sample_trials(GroundTruth(_point_mass((1, 1, 1, 1))), 1, seed=3)
    assert len(recs) == 4
    assert [r.condition for r in recs] == list(CONDITIONS)
    assert all(int(r.a_outcome) == 1 and int(r.b_outcome) == 1 for r in recs)


def test_sample_deterministic(violation):
    truth = GroundTruth(violation, seed=7)
    assert sample_trials(truth, 50) == sample_trials(truth, 50)
    assert sample_trials(truth, 50) != sample_trials(truth, 50, seed=8)


def test_sample_rejects_zero():
    with pytest.raises(ValueError):
        sample_trials(GroundTruth(_point_mass((1, 1, 1, 1))), 0)


def test_recovery_within_three_standard_errors(violation):
    recs = sample_trials(GroundTruth(violation, name="hypothetical"), 100, RECOVERY_SEED)
    got = aggregate(recs)["hypothetical"]
    for truth_block, block in zip(violation, got):
        assert block.n == 100
        for p, phat in zip(truth_block.cells, block.cells):
            assert abs(phat - p) <= 3 * math.sqrt(p * (1 - p) / 100) + 1e-12


def test_aggregate_of_400_trials_close_to_truth(violation):
    recs = sample_trials(GroundTruth(violation, name="v"), 100, RECOVERY_SEED)
    got = aggregate(recs)["v"]
    worst = max(abs(x - y) for b0, b1 in zip(violation, got)
                for x, y in zip(b0.cells, b1.cells))
    assert worst <= 0.08


def test_convergence_at_ten_thousand():
    q = random_joint(11)
    n = 10_000
    got = aggregate(sample_trials(GroundTruth(q, name="q"), n, seed=12))["q"]
    worst = max(abs(x - y) for b0, b1 in zip(marginalize(q), got)
                for x, y in zip(b0.cells, b1.cells))
    assert worst <= 5 / math.sqrt(n)


def test_random_joint_properties():
    a, b = random_joint(1), random_joint(2)
    assert math.fsum(a.q) == pytest.approx(1.0, abs=1e-12)
    assert a.q != b.q
    assert random_joint(1) == a


def test_thousand_marginalized_joints_pass_everything():
    for seed in range(1000):
        table = marginalize(random_joint(seed))
        assert selectivity_test(table, mode="strict").holds, seed
        assert bell_ch(table).satisfied, seed
        assert jdc(table).feasible, seed


@given(st.integers(0, 2**32 - 1))
def test_seed_sequence_and_int_agree(seed):
    assert random_joint(seed) == random_joint(np.random.SeedSequence(seed))


def test_truth_round_trip(violation):
    for truth in (GroundTruth(random_joint(4), name="j"), GroundTruth(violation, name="hypothetical")):
        again = load_truth(dump_truth(truth))
        assert again.kind == truth.kind
        assert dump_table(again.table()) == dump_table(truth.table())


def test_load_truth_shapes():
    flat = load_truth("[" + ",".join(["0.0625"] * 16) + "]")
    assert flat.kind == "joint"
    table = load_fixture("violation.json")
    assert load_truth(dump_table(table)).kind == "per_condition"
