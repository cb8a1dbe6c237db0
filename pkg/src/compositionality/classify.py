"""The three-step compositionality decision.

1. Test marginal selectivity; on failure the combination is non-compositional
   and nothing else is computed.
2. Otherwise evaluate the CHSH and Bell/CH systems on the observed table; any
   violation makes the combination non-compositional.
3. Otherwise it is compositional.

Alongside the inequalities, the joint distribution criterion is solved on the
selectivity-exact projection of the table.  ``agreement`` compares it with the
inequalities evaluated on that same projection.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional

from .inequalities import (
    BellChReport,
    ChshReport,
    MarginalPolicy,
    bell_ch,
    chsh,
)
from .jdc import DEFAULT_PIVOT_BUDGET, DEFAULT_TOLERANCE, JdcResult, MsProjection, jdc, project_to_ms
from .model import CombinationTable
from .selectivity import MarginalSelectivityReport, SelectivityConfig, selectivity_test


class Verdict(enum.Enum):
    MS_FAILURE = "non-compositional (marginal selectivity)"
    VIOLATION = "non-compositional"
    COMPOSITIONAL = "compositional"

    def __str__(self):
        return self.value

    @property
    def compositional(self) -> bool:
        return self is Verdict.COMPOSITIONAL


@dataclass(frozen=True)
class AnalysisConfig:
    alpha: float = 0.1
    critical_value: float = 2.71
    yates: bool = False
    ms_mode: str = "statistical"  # or "strict"
    strict_tolerance: float = 1e-9
    marginal_policy: MarginalPolicy = "average"
    chsh_tolerance: float = 1e-9
    bellch_tolerance: float = 1e-9
    lp_tolerance: float = DEFAULT_TOLERANCE
    pivot_budget: int = DEFAULT_PIVOT_BUDGET
    projection: str = "least_squares"
    overrides: frozenset = field(default_factory=frozenset)

    @property
    def selectivity(self) -> SelectivityConfig:
        return SelectivityConfig(self.alpha, self.critical_value, self.yates,
                                 self.strict_tolerance)

    def with_overrides(self, names) -> "AnalysisConfig":
        return replace(self, overrides=frozenset(self.overrides) | frozenset(names))


@dataclass(frozen=True)
class Classification:
    name: str
    verdict: Verdict
    ms_report: MarginalSelectivityReport
    chsh_report: Optional[ChshReport] = None
    bellch_report: Optional[BellChReport] = None
    projection: Optional[MsProjection] = None
    projected_chsh: Optional[ChshReport] = None
    projected_bellch: Optional[BellChReport] = None
    jdc_result: Optional[JdcResult] = None
    agreement: Optional[bool] = None
    notes: tuple = ()

    @property
    def borderline(self) -> bool:
        return self.chsh_report is not None and self.chsh_report.borderline

    @property
    def max_abs_chsh(self) -> Optional[float]:
        return None if self.chsh_report is None else self.chsh_report.max_abs


def classify(table: CombinationTable, config: AnalysisConfig = AnalysisConfig()) -> Classification:
    overridden = bool(table.name) and table.name in config.overrides
    mode = config.ms_mode
    if overridden and mode == "statistical" and not table.has_sample_sizes:
        mode = "strict"
    ms = selectivity_test(table, config.selectivity, mode=mode)
    notes = []
    if overridden:
        ms = replace(ms, holds=True, overridden=True)
        notes.append("marginal selectivity assumed (override)")
    if not ms.holds:
        return Classification(table.name, Verdict.MS_FAILURE, ms, notes=tuple(notes))

    raw_chsh = chsh(table, config.chsh_tolerance)
    raw_bellch = bell_ch(table, config.marginal_policy, config.bellch_tolerance)
    projection = project_to_ms(table, config.projection)
    proj_chsh = chsh(projection.table, config.chsh_tolerance)
    proj_bellch = bell_ch(projection.table, config.marginal_policy, config.bellch_tolerance)
    lp = jdc(projection.table, config.lp_tolerance, config.pivot_budget)

    violated = raw_chsh.violated or not raw_bellch.satisfied
    verdict = Verdict.VIOLATION if violated else Verdict.COMPOSITIONAL
    # both sides judged on the same selectivity-exact table
    proj_violated = proj_chsh.violated or not proj_bellch.satisfied
    agreement = proj_violated == (not lp.feasible)

    notes.extend(str(c) for c in projection.clamps)
    if raw_chsh.borderline:
        notes.append(f"borderline: |CHSH| = {raw_chsh.max_abs:.4g} is just above 2")
    if raw_chsh.violated == raw_bellch.satisfied:
        notes.append("CHSH and Bell/CH disagree on the observed table")
    if proj_violated != violated:
        notes.append("inequality verdict changes under selectivity projection")
    if not agreement:
        notes.append("inequalities and joint distribution criterion disagree")
    return Classification(
        name=table.name, verdict=verdict, ms_report=ms,
        chsh_report=raw_chsh, bellch_report=raw_bellch,
        projection=projection, projected_chsh=proj_chsh, projected_bellch=proj_bellch,
        jdc_result=lp, agreement=agreement, notes=tuple(notes),
    )


@dataclass(frozen=True)
class BatchError:
    name: str
    error: Exception

    def __str__(self):
        return f"{self.name}: {type(self.error).__name__}: {self.error}"


def classify_batch(tables: Mapping, config: AnalysisConfig = AnalysisConfig(),
                   overrides=()) -> dict:
    """Classify every table; failures become BatchError entries instead of raising.

    Values may be CombinationTables or exceptions raised while loading them.
    """
    config = config.with_overrides(overrides)
    out = {}
    for name, table in tables.items():
        if isinstance(table, Exception):
            out[name] = BatchError(name, table)
            continue
        try:
            if table.name != name:
                table = replace(table, name=name)
            out[name] = classify(table, config)
        except Exception as exc:  # noqa: BLE001 - isolate one bad entry from the batch
            out[name] = BatchError(name, exc)
    return out
