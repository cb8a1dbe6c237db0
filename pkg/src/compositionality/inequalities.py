"""CHSH and Bell/CH inequality systems, plus the naive independence check."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .model import (
    CONDITIONS,
    CombinationTable,
    PrimingCondition,
    expectation,
    marginal_a,
    marginal_b,
)

CHSH_BOUND = 2.0
BORDERLINE_WIDTH = 0.1

# Index into the E tuple (A1B1, A1B2, A2B1, A2B2) that carries the minus sign.
# S1 is the textbook arrangement; S2..S4 move the minus around.
VARIANT_MINUS = (3, 1, 2, 0)


@dataclass(frozen=True)
class ChshReport:
    e_values: dict
    variant_values: tuple
    max_abs: float
    violated: bool
    tolerance: float

    @property
    def borderline(self) -> bool:
        return CHSH_BOUND < self.max_abs <= CHSH_BOUND + BORDERLINE_WIDTH

    @property
    def worst_variant(self) -> int:
        """1-based index of the variant with the largest |S|."""
        mags = [abs(s) for s in self.variant_values]
        return mags.index(max(mags)) + 1


def chsh_variants(e: tuple) -> tuple:
    total = sum(e)
    return tuple(total - 2.0 * e[k] for k in VARIANT_MINUS)


def chsh(table: CombinationTable, tolerance: float = 1e-9) -> ChshReport:
    e = tuple(expectation(b) for b in table)
    variants = chsh_variants(e)
    max_abs = max(abs(s) for s in variants)
    return ChshReport(
        e_values=dict(zip(CONDITIONS, e)),
        variant_values=variants,
        max_abs=max_abs,
        violated=max_abs > CHSH_BOUND + tolerance,
        tolerance=tolerance,
    )


MarginalPolicy = Union[str, PrimingCondition]


def parse_policy(text: str) -> MarginalPolicy:
    """``average`` or ``condition:i,j`` (e.g. ``condition:1,2``)."""
    t = text.strip().lower()
    if t == "average":
        return "average"
    if t.startswith("condition"):
        rest = t[len("condition"):].strip(":() ")
        i, j = (int(x) for x in rest.split(","))
        return PrimingCondition(i, j)
    raise ValueError(f"unknown marginal policy {text!r}")


def policy_name(policy: MarginalPolicy) -> str:
    if isinstance(policy, PrimingCondition):
        return f"condition:{policy.a_index},{policy.b_index}"
    return policy


def single_marginals(table: CombinationTable, policy: MarginalPolicy = "average") -> dict:
    """Pr(A1=+1), Pr(A2=+1), Pr(B1=+1), Pr(B2=+1) under a marginal policy.

    ``average`` takes the mean of the two condition-specific marginals.  A
    PrimingCondition ``(i0, j0)`` reads Pr(Ai) from block ``(i, j0)`` and
    Pr(Bj) from block ``(i0, j)``.
    """
    b = table.block
    if policy == "average":
        return {
            "A1": (marginal_a(b(1, 1)) + marginal_a(b(1, 2))) / 2,
            "A2": (marginal_a(b(2, 1)) + marginal_a(b(2, 2))) / 2,
            "B1": (marginal_b(b(1, 1)) + marginal_b(b(2, 1))) / 2,
            "B2": (marginal_b(b(1, 2)) + marginal_b(b(2, 2))) / 2,
        }
    if isinstance(policy, PrimingCondition):
        i0, j0 = policy.a_index, policy.b_index
        return {
            "A1": marginal_a(b(1, j0)),
            "A2": marginal_a(b(2, j0)),
            "B1": marginal_b(b(i0, 1)),
            "B2": marginal_b(b(i0, 2)),
        }
    raise ValueError(f"unknown marginal policy {policy!r}")


@dataclass(frozen=True)
class BellChReport:
    expressions: tuple
    satisfied: bool
    marginals_used: dict
    marginal_spread: dict
    policy: str
    tolerance: float

    @property
    def violated_indices(self) -> tuple:
        lo, hi = -1.0 - self.tolerance, self.tolerance
        return tuple(k + 1 for k, x in enumerate(self.expressions) if not lo <= x <= hi)


def bell_ch(table: CombinationTable, marginal_policy: MarginalPolicy = "average",
            tolerance: float = 1e-9) -> BellChReport:
    """Evaluate the four Bell/CH double inequalities ``-1 <= expr <= 0``.

    Joint terms Pr(Ai, Bj) are the (+1, +1) cells.
    """
    p = {(c.a_index, c.b_index): table.blocks[c].p_pp for c in CONDITIONS}
    m = single_marginals(table, marginal_policy)
    exprs = (
        p[1, 1] + p[1, 2] + p[2, 2] - p[2, 1] - m["A1"] - m["B2"],
        p[2, 1] + p[2, 2] + p[1, 2] - p[1, 1] - m["A2"] - m["B2"],
        p[1, 2] + p[1, 1] + p[2, 1] - p[2, 2] - m["A1"] - m["B1"],
        p[2, 2] + p[2, 1] + p[1, 1] - p[1, 2] - m["A2"] - m["B1"],
    )
    b = table.block
    spread = {
        "A1": abs(marginal_a(b(1, 1)) - marginal_a(b(1, 2))),
        "A2": abs(marginal_a(b(2, 1)) - marginal_a(b(2, 2))),
        "B1": abs(marginal_b(b(1, 1)) - marginal_b(b(2, 1))),
        "B2": abs(marginal_b(b(1, 2)) - marginal_b(b(2, 2))),
    }
    ok = all(-1.0 - tolerance <= x <= tolerance for x in exprs)
    return BellChReport(
        expressions=exprs, satisfied=ok, marginals_used=m, marginal_spread=spread,
        policy=policy_name(marginal_policy), tolerance=tolerance,
    )


def independence_residual(table: CombinationTable) -> float:
    """Largest gap between a cell and the product of its block's own marginals.

    Zero means every block factorises as Pr(Ai)Pr(Bj).
    """
    worst = 0.0
    for block in table:
        a, b = marginal_a(block), marginal_b(block)
        products = (a * b, a * (1 - b), (1 - a) * b, (1 - a) * (1 - b))
        worst = max(worst, *(abs(c - q) for c, q in zip(block.cells, products)))
    return worst
