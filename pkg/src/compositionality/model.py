"""Core value types: priming conditions, 2x2 outcome blocks, the 4-block table.

Cell order is fixed everywhere as (A outcome, B outcome) =
``(+,+), (+,-), (-,+), (-,-)``.  A table holds one block per priming
condition ``(Ai, Bj)`` with ``i, j`` in ``{1, 2}`` (1 = dominant-sense prime,
2 = subordinate-sense prime).
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Optional

from .errors import ValidationError, ZeroTrials

SUM_TOLERANCE = 1e-9
# snapping slack used when rebuilding blocks from summary statistics
_SNAP = 1e-12


class SenseOutcome(enum.IntEnum):
    """+1: interpreted in the primed sense; -1: not interpreted in it."""

    PLUS = 1
    MINUS = -1

    @classmethod
    def parse(cls, text: str) -> "SenseOutcome":
        t = text.strip()
        if t in ("+1", "1"):
            return cls.PLUS
        if t == "-1":
            return cls.MINUS
        raise ValueError(f"outcome must be +1, 1 or -1, got {text!r}")

    def __str__(self) -> str:
        return "+1" if self is SenseOutcome.PLUS else "-1"


CELL_SIGNS = ((1, 1), (1, -1), (-1, 1), (-1, -1))
CELL_NAMES = ("++", "+-", "-+", "--")


@dataclass(frozen=True, order=True)
class PrimingCondition:
    a_index: int
    b_index: int

    def __post_init__(self):
        for name in ("a_index", "b_index"):
            v = getattr(self, name)
            if v not in (1, 2) or isinstance(v, bool):
                raise ValidationError(f"{name} must be 1 or 2, got {v!r}")

    @property
    def key(self) -> str:
        """Block key used in JSON files, e.g. ``a1b2``."""
        return f"a{self.a_index}b{self.b_index}"

    @property
    def label(self) -> str:
        return f"A{self.a_index}B{self.b_index}"

    @classmethod
    def from_key(cls, key: str) -> "PrimingCondition":
        k = key.strip().lower()
        if len(k) != 4 or k[0] != "a" or k[2] != "b" or not (k[1] + k[3]).isdigit():
            raise ValidationError(f"bad block key {key!r}")
        return cls(int(k[1]), int(k[3]))

    def __str__(self) -> str:
        return self.label


CONDITIONS = tuple(PrimingCondition(i, j) for i in (1, 2) for j in (1, 2))


@dataclass(frozen=True)
class CountBlock:
    n_pp: int
    n_pm: int
    n_mp: int
    n_mm: int
    condition: PrimingCondition

    def __post_init__(self):
        for c in self.counts:
            if not isinstance(c, int) or c < 0:
                raise ValidationError(f"counts must be nonnegative integers, got {c!r}")

    @property
    def counts(self) -> tuple:
        return (self.n_pp, self.n_pm, self.n_mp, self.n_mm)

    @property
    def n(self) -> int:
        return sum(self.counts)


@dataclass(frozen=True)
class ConditionBlock:
    p_pp: float
    p_pm: float
    p_mp: float
    p_mm: float
    condition: PrimingCondition
    n: Optional[int] = None

    def __post_init__(self):
        # plain floats keep numpy scalars out of reports and equality checks
        for attr in ("p_pp", "p_pm", "p_mp", "p_mm"):
            object.__setattr__(self, attr, float(getattr(self, attr)))
        cells = self.cells
        for name, p in zip(CELL_NAMES, cells):
            if not math.isfinite(p) or p < 0.0 or p > 1.0 + SUM_TOLERANCE:
                raise ValidationError(
                    f"{self.condition.label} cell {name}: probability {p!r} outside [0, 1]"
                )
        total = math.fsum(cells)
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise ValidationError(f"{self.condition.label}: cells sum to {total!r}, not 1")
        if self.n is not None and (not isinstance(self.n, int) or self.n <= 0):
            raise ValidationError(f"{self.condition.label}: sample size must be a positive int")

    @property
    def cells(self) -> tuple:
        return (self.p_pp, self.p_pm, self.p_mp, self.p_mm)

    @classmethod
    def from_cells(cls, cells, condition, n=None) -> "ConditionBlock":
        p = [float(c) for c in cells]
        if len(p) != 4:
            raise ValidationError(f"a block needs 4 cells, got {len(p)}")
        return cls(*p, condition=condition, n=n)

    def with_n(self, n: Optional[int]) -> "ConditionBlock":
        return ConditionBlock(*self.cells, condition=self.condition, n=n)


@dataclass(frozen=True)
class CombinationTable:
    blocks: Mapping[PrimingCondition, ConditionBlock]
    name: str = ""
    primes: Optional[tuple] = None

    def __post_init__(self):
        blocks = dict(self.blocks)
        missing = [c for c in CONDITIONS if c not in blocks]
        if missing or len(blocks) != 4:
            raise ValidationError(
                f"table {self.name!r} needs exactly the four blocks, missing "
                + ", ".join(c.label for c in missing)
            )
        for cond, block in blocks.items():
            if not isinstance(block, ConditionBlock):
                raise ValidationError(f"{cond.label}: not a ConditionBlock")
            if block.condition != cond:
                raise ValidationError(f"block keyed {cond.label} says {block.condition.label}")
        if self.primes is not None:
            primes = tuple(self.primes)
            if len(primes) != 4:
                raise ValidationError("primes must list four words (A1, A2, B1, B2)")
            object.__setattr__(self, "primes", primes)
        # canonical order, and immune to later mutation of the caller's dict
        object.__setattr__(self, "blocks", {c: blocks[c] for c in CONDITIONS})

    def block(self, i: int, j: int) -> ConditionBlock:
        return self.blocks[PrimingCondition(i, j)]

    def __iter__(self) -> Iterator[ConditionBlock]:
        return iter(self.blocks.values())

    @property
    def has_sample_sizes(self) -> bool:
        return all(b.n is not None for b in self)

    def as_matrix(self):
        """4x4 nested list: rows are blocks in A1B1, A1B2, A2B1, A2B2 order."""
        return [list(b.cells) for b in self]

    @classmethod
    def from_cells(cls, cells: Mapping, name="", n=None, primes=None) -> "CombinationTable":
        """Build from ``{"a1b1": [..4..], ...}`` or ``{PrimingCondition: [...]}``.

        ``n`` may be a single int for every block or a mapping keyed like ``cells``.
        """
        blocks = {}
        for key, values in cells.items():
            cond = key if isinstance(key, PrimingCondition) else PrimingCondition.from_key(key)
            size = n.get(key) if isinstance(n, Mapping) else n
            blocks[cond] = ConditionBlock.from_cells(values, cond, size)
        return cls(blocks, name=name, primes=primes)


JOINT_CELLS = tuple(itertools.product((1, -1), repeat=4))
"""Sign assignments ``(a1, a2, b1, b2)`` in the index order used by JointDistribution."""


@dataclass(frozen=True)
class JointDistribution:
    q: tuple = field()

    def __post_init__(self):
        q = tuple(float(x) for x in self.q)
        if len(q) != 16:
            raise ValidationError(f"joint distribution needs 16 cells, got {len(q)}")
        if any(not math.isfinite(x) or x < 0 for x in q):
            raise ValidationError("joint probabilities must be finite and nonnegative")
        if abs(math.fsum(q) - 1.0) > SUM_TOLERANCE:
            raise ValidationError(f"joint probabilities sum to {math.fsum(q)!r}, not 1")
        object.__setattr__(self, "q", q)

    def __getitem__(self, signs) -> float:
        return self.q[JOINT_CELLS.index(tuple(signs))]

    def items(self):
        return zip(JOINT_CELLS, self.q)


def normalize(counts: CountBlock) -> ConditionBlock:
    n = counts.n
    if n == 0:
        raise ZeroTrials(f"{counts.condition.label}: no trials to normalize")
    return ConditionBlock(*(c / n for c in counts.counts), condition=counts.condition, n=n)


def exact_probabilities(counts: CountBlock) -> tuple:
    """Cell probabilities as exact fractions (for checking count ratios)."""
    n = counts.n
    if n == 0:
        raise ZeroTrials(f"{counts.condition.label}: no trials to normalize")
    return tuple(Fraction(c, n) for c in counts.counts)


def marginal_a(block: ConditionBlock) -> float:
    """Pr(Ai = +1) within this block's priming condition."""
    return block.p_pp + block.p_pm


def marginal_b(block: ConditionBlock) -> float:
    """Pr(Bj = +1) within this block's priming condition."""
    return block.p_pp + block.p_mp


def expectation(block: ConditionBlock) -> float:
    """Correlation of the two outcomes, ``p++ + p-- - p+- - p-+``."""
    return (block.p_pp + block.p_mm) - (block.p_pm + block.p_mp)


@dataclass(frozen=True)
class Clamp:
    """A correlation that had to be moved to stay inside the feasible range."""

    condition: PrimingCondition
    requested: float
    applied: float

    def __str__(self):
        return (f"{self.condition.label}: E clamped {self.requested:+.6g} -> "
                f"{self.applied:+.6g}")


def expectation_bounds(a: float, b: float) -> tuple:
    """Feasible range of E for a block with marginals ``a`` and ``b``."""
    lo_pp, hi_pp = max(0.0, a + b - 1.0), min(a, b)
    return 4 * lo_pp + 1 - 2 * a - 2 * b, 4 * hi_pp + 1 - 2 * a - 2 * b


def block_from_stats(a: float, b: float, e: float,
                     condition: PrimingCondition = CONDITIONS[0],
                     n: Optional[int] = None):
    """Rebuild a block from its two marginals and its correlation.

    Returns ``(block, clamp)`` where ``clamp`` is None unless ``e`` lay outside
    the range allowed by ``a`` and ``b``; in that case ``e`` is moved to the
    nearest feasible value.
    """
    if not (0.0 <= a <= 1.0 and 0.0 <= b <= 1.0):
        raise ValidationError(f"marginals must lie in [0, 1], got a={a!r}, b={b!r}")
    lo, hi = max(0.0, a + b - 1.0), min(a, b)
    p_pp = (e - 1.0 + 2.0 * a + 2.0 * b) / 4.0
    clamp = None
    if p_pp < lo - _SNAP or p_pp > hi + _SNAP:
        p_pp = min(max(p_pp, lo), hi)
        clamp = Clamp(condition, e, 4 * p_pp + 1 - 2 * a - 2 * b)
    else:
        p_pp = min(max(p_pp, lo), hi)
    cells = [p_pp, a - p_pp, b - p_pp, 1.0 - a - b + p_pp]
    cells = [max(c, 0.0) for c in cells]
    total = math.fsum(cells)
    block = ConditionBlock(*(c / total for c in cells), condition=condition, n=n)
    return block, clamp
