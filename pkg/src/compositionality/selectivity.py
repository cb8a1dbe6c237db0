"""Marginal selectivity: is each concept's marginal unaffected by the other prime?"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import InvalidSampleSize, MissingSampleSizes
from .model import CombinationTable, marginal_a, marginal_b

VARIABLES = ("A1", "A2", "B1", "B2")


@dataclass(frozen=True)
class SelectivityConfig:
    alpha: float = 0.1
    critical_value: float = 2.71
    yates: bool = False
    strict_tolerance: float = 1e-9


@dataclass(frozen=True)
class MarginalSelectivityReport:
    diffs: dict
    chi_squares: Optional[dict]  # None in strict mode
    per_variable_fail: dict
    holds: bool
    alpha: float
    critical_value: float
    mode: str = "statistical"
    overridden: bool = False

    @property
    def failing(self) -> tuple:
        return tuple(v for v in VARIABLES if self.per_variable_fail[v])


def _paired_marginals(table: CombinationTable) -> dict:
    """For each variable, the two (marginal, block) pairs being compared."""
    b = table.block
    return {
        "A1": ((marginal_a(b(1, 1)), b(1, 1)), (marginal_a(b(1, 2)), b(1, 2))),
        "A2": ((marginal_a(b(2, 1)), b(2, 1)), (marginal_a(b(2, 2)), b(2, 2))),
        "B1": ((marginal_b(b(1, 1)), b(1, 1)), (marginal_b(b(2, 1)), b(2, 1))),
        "B2": ((marginal_b(b(1, 2)), b(1, 2)), (marginal_b(b(2, 2)), b(2, 2))),
    }


def marginal_diffs(table: CombinationTable) -> dict:
    """Absolute change of each variable's marginal across the other concept's primes."""
    return {v: abs(x[0] - y[0]) for v, (x, y) in _paired_marginals(table).items()}


def chi_square_two_proportions(p1: float, n1: int, p2: float, n2: int,
                               yates: bool = False) -> float:
    """Pooled two-sample chi-square statistic (1 df) for a difference in proportions."""
    if not n1 or not n2 or n1 < 0 or n2 < 0:
        raise InvalidSampleSize(f"sample sizes must be positive, got n1={n1}, n2={n2}")
    pooled = (p1 * n1 + p2 * n2) / (n1 + n2)
    if pooled <= 0.0 or pooled >= 1.0:
        return 0.0
    inv = 1.0 / n1 + 1.0 / n2
    d = abs(p1 - p2)
    if yates:
        d = max(0.0, d - inv / 2.0)
    denom = pooled * (1.0 - pooled) * inv
    # a pooled proportion within underflow of 0 or 1 carries no evidence
    return d * d / denom if denom > 0.0 else 0.0


def selectivity_test(table: CombinationTable, config: SelectivityConfig = SelectivityConfig(),
                     mode: str = "statistical") -> MarginalSelectivityReport:
    """Test marginal selectivity per variable.

    ``mode="statistical"`` compares chi-square statistics against
    ``config.critical_value`` and needs every block's sample size.
    ``mode="strict"`` compares the raw differences to ``config.strict_tolerance``.
    """
    diffs = marginal_diffs(table)
    if mode == "strict":
        fails = {v: diffs[v] > config.strict_tolerance for v in VARIABLES}
        return MarginalSelectivityReport(
            diffs=diffs, chi_squares=None, per_variable_fail=fails,
            holds=not any(fails.values()), alpha=config.alpha,
            critical_value=config.strict_tolerance, mode="strict",
        )
    if mode != "statistical":
        raise ValueError(f"unknown marginal selectivity mode {mode!r}")
    if not table.has_sample_sizes:
        raise MissingSampleSizes(
            f"{table.name or 'table'}: statistical marginal selectivity needs n for every block"
        )
    chis = {}
    for v, ((p1, b1), (p2, b2)) in _paired_marginals(table).items():
        chis[v] = chi_square_two_proportions(p1, b1.n, p2, b2.n, yates=config.yates)
    fails = {v: chis[v] > config.critical_value for v in VARIABLES}
    return MarginalSelectivityReport(
        diffs=diffs, chi_squares=chis, per_variable_fail=fails,
        holds=not any(fails.values()), alpha=config.alpha,
        critical_value=config.critical_value,
    )
