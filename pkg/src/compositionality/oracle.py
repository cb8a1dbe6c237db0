"""Randomized cross-checks between the inequality systems and the LP criterion.

Every instance is generated with a known answer structure:

* ``fine``: selectivity-exact tables (marginalized random joints, and the same
  tables with correlations pushed towards a CHSH bound).  Bell/CH satisfaction,
  CHSH satisfaction and LP feasibility must all coincide.
* ``chsh_implies_bellch``: on the same tables, CHSH satisfied implies Bell/CH
  satisfied.
* ``ms_necessity``: four independent random blocks whose marginals differ;
  the exact LP must be infeasible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .inequalities import bell_ch, chsh
from .jdc import DEFAULT_TOLERANCE, jdc
from .model import CombinationTable
from .selectivity import marginal_diffs
from .synth import marginalize, perturb_correlations, random_joint, random_per_condition_table

# Instances whose |CHSH| lies this close to 2 are decided by floating-point
# noise on either side; they are counted but not judged.
BOUNDARY_BAND = 1e-6

SUITES = ("fine", "chsh_implies_bellch", "ms_necessity")


@dataclass
class Counterexample:
    suite: str
    table: CombinationTable
    detail: str


@dataclass
class OracleSummary:
    trials: int
    seed: int
    checked: dict = field(default_factory=lambda: dict.fromkeys(SUITES, 0))
    boundary: int = 0
    counterexamples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def lines(self):
        for s in SUITES:
            bad = sum(c.suite == s for c in self.counterexamples)
            yield f"{s}: {self.checked[s]} instances, {bad} counterexamples"
        if self.boundary:
            yield f"boundary instances (|CHSH| within {BOUNDARY_BAND:g} of 2): {self.boundary}"
        yield f"{len(self.counterexamples)} counterexamples"


def _check_exact_ms(table, summary, solver, tolerance):
    report = chsh(table)
    if abs(report.max_abs - 2.0) < BOUNDARY_BAND:
        summary.boundary += 1
        return
    bc = bell_ch(table)
    lp = solver(table)
    summary.checked["fine"] += 1
    chsh_ok = not report.violated
    if not (bc.satisfied == lp.feasible == chsh_ok):
        summary.counterexamples.append(Counterexample(
            "fine", table,
            f"bell_ch satisfied={bc.satisfied}, chsh ok={chsh_ok} "
            f"(max |S|={report.max_abs:.9g}), lp={lp.status} (residual {lp.residual:.3g})",
        ))
    summary.checked["chsh_implies_bellch"] += 1
    if chsh_ok and not bc.satisfied:
        summary.counterexamples.append(Counterexample(
            "chsh_implies_bellch", table,
            f"max |S|={report.max_abs:.9g} but Bell/CH expressions {bc.expressions}",
        ))


def run_oracle(trials: int, seed: int = 0,
               solver: Callable = None, tolerance: float = DEFAULT_TOLERANCE,
               ms_margin: float = 0.05) -> OracleSummary:
    """Run all suites over ``trials`` random instances each."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    if solver is None:
        def solver(table):
            return jdc(table, tolerance)
    summary = OracleSummary(trials, seed)
    streams = np.random.SeedSequence(seed).spawn(trials)
    for k, ss in enumerate(streams):
        joint_seed, perturb_seed, table_seed = ss.spawn(3)
        table = marginalize(random_joint(joint_seed), name=f"joint-{seed}-{k}")
        _check_exact_ms(table, summary, solver, tolerance)
        rng = np.random.Generator(np.random.PCG64(perturb_seed))
        pushed = perturb_correlations(table, rng)
        pushed = CombinationTable(pushed.blocks, name=f"pushed-{seed}-{k}")
        _check_exact_ms(pushed, summary, solver, tolerance)

        loose = random_per_condition_table(table_seed, name=f"per-condition-{seed}-{k}")
        if max(marginal_diffs(loose).values()) > ms_margin:
            summary.checked["ms_necessity"] += 1
            lp = solver(loose)
            if lp.feasible:
                summary.counterexamples.append(Counterexample(
                    "ms_necessity", loose,
                    f"marginal diffs {marginal_diffs(loose)} but lp feasible",
                ))
    return summary
