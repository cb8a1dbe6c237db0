"""Probabilistic compositionality analysis for two-concept combinations.

Typical use::

    from compositionality import parse_table, classify, AnalysisConfig
    table = parse_table(open("fixtures/applechip.json").read())
    print(classify(table).verdict)
"""

from .classify import AnalysisConfig, BatchError, Classification, Verdict, classify, classify_batch
from .errors import (
    CompositionalityError,
    IncompleteTable,
    InvalidSampleSize,
    IterationLimit,
    MissingSampleSizes,
    ParseError,
    ValidationError,
    ZeroTrials,
)
from .inequalities import BellChReport, ChshReport, bell_ch, chsh, independence_residual
from .ingest import (
    AssociationNorm,
    TrialRecord,
    aggregate,
    parse_norms,
    parse_table,
    parse_trials,
    sense_probability,
)
from .jdc import JdcResult, JdcStatus, LpSystem, build_system, jdc, project_to_ms, solve, verify
from .model import (
    CONDITIONS,
    CombinationTable,
    ConditionBlock,
    CountBlock,
    JointDistribution,
    PrimingCondition,
    SenseOutcome,
    block_from_stats,
    expectation,
    marginal_a,
    marginal_b,
    normalize,
)
from .selectivity import (
    MarginalSelectivityReport,
    SelectivityConfig,
    chi_square_two_proportions,
    marginal_diffs,
    selectivity_test,
)
from .synth import GroundTruth, marginalize, random_joint, sample_trials

__version__ = "0.1.0"
