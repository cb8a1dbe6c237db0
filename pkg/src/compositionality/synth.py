"""Synthetic experiments drawn from known ground truth.

Randomness comes from numpy's PCG64 bit generator, seeded through
``SeedSequence``; per-condition streams are ``SeedSequence(seed).spawn(4)`` in
A1B1, A1B2, A2B1, A2B2 order.  Results are reproducible bit-for-bit across
platforms for a given numpy major version.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ValidationError
from .inequalities import VARIANT_MINUS, chsh_variants
from .ingest import TrialRecord, table_from_json, table_to_json
from .model import (
    CELL_SIGNS,
    CONDITIONS,
    JOINT_CELLS,
    CombinationTable,
    ConditionBlock,
    JointDistribution,
    SenseOutcome,
    block_from_stats,
    expectation,
    marginal_a,
    marginal_b,
)

GENERATOR = "numpy.random.PCG64"


def rng_for(seed) -> np.random.Generator:
    """PCG64 generator from an int seed or an existing SeedSequence."""
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.PCG64(seed))


def marginalize(q: JointDistribution, name: str = "", n=None) -> CombinationTable:
    """Block (i, j), cell (s, t) = total joint mass with ai = s and bj = t."""
    blocks = {}
    for cond in CONDITIONS:
        ia, ib = cond.a_index - 1, cond.b_index + 1
        cells = []
        for s, t in CELL_SIGNS:
            cells.append(math.fsum(p for x, p in q.items() if x[ia] == s and x[ib] == t))
        blocks[cond] = ConditionBlock(*cells, condition=cond, n=n)
    return CombinationTable(blocks, name=name)


def random_joint(seed) -> JointDistribution:
    """Uniform draw from the 16-cell probability simplex."""
    w = rng_for(seed).standard_exponential(len(JOINT_CELLS))
    return JointDistribution(tuple(w / w.sum()))


def random_block_cells(rng: np.random.Generator) -> np.ndarray:
    w = rng.standard_exponential(4)
    return w / w.sum()


def random_per_condition_table(seed, name: str = "") -> CombinationTable:
    """Four independent uniformly random blocks; selectivity generally fails."""
    rng = rng_for(seed)
    return CombinationTable(
        {c: ConditionBlock(*random_block_cells(rng), condition=c) for c in CONDITIONS},
        name=name,
    )


def perturb_correlations(table: CombinationTable, rng: np.random.Generator,
                         max_step: float = 0.6) -> CombinationTable:
    """Push a selectivity-exact table towards (and often past) a CHSH bound.

    Each block's correlation moves by a random amount in the direction that
    grows the currently largest CHSH variant; marginals are untouched, so
    selectivity stays exact.  Moves are clamped to the feasible range.
    """
    e = [expectation(b) for b in table]
    s = chsh_variants(tuple(e))
    k = max(range(4), key=lambda i: abs(s[i]))
    direction = [1.0] * 4
    direction[VARIANT_MINUS[k]] = -1.0
    if s[k] < 0:
        direction = [-d for d in direction]
    blocks = {}
    for cond, d, blk in zip(CONDITIONS, direction, table):
        step = rng.uniform(0.0, max_step)
        blocks[cond], _ = block_from_stats(marginal_a(blk), marginal_b(blk),
                                           expectation(blk) + d * step, cond, blk.n)
    return CombinationTable(blocks, name=table.name)


@dataclass(frozen=True)
class GroundTruth:
    """Either a joint distribution or four per-condition blocks."""

    model: Union[JointDistribution, CombinationTable]
    seed: int = 0
    name: str = "synthetic"

    @property
    def kind(self) -> str:
        return "joint" if isinstance(self.model, JointDistribution) else "per_condition"

    def table(self) -> CombinationTable:
        if isinstance(self.model, JointDistribution):
            return marginalize(self.model, name=self.name)
        return self.model


def load_truth(text: str, seed: int = 0) -> GroundTruth:
    """Read ground truth JSON.

    Accepted shapes: a bare 16-element list, ``{"joint": [...16...]}``, or a
    table object with blocks ``a1b1 .. a2b2`` (four 4-arrays).
    """
    obj = json.loads(text)
    if isinstance(obj, list):
        return GroundTruth(JointDistribution(tuple(obj)), seed)
    if not isinstance(obj, dict):
        raise ValidationError("ground truth must be a JSON list or object")
    name = str(obj.get("name", "synthetic"))
    if "joint" in obj:
        return GroundTruth(JointDistribution(tuple(obj["joint"])), seed, name)
    table = table_from_json(obj, default_name=name)
    return GroundTruth(table, seed, table.name or name)


def dump_truth(truth: GroundTruth) -> str:
    if truth.kind == "joint":
        obj = {"name": truth.name, "joint": list(truth.model.q)}
    else:
        obj = table_to_json(truth.model)
    return json.dumps(obj, indent=2)


def sample_trials(truth: GroundTruth, n_per_condition: int, seed=None) -> list:
    """``n_per_condition`` i.i.d. trials for every priming condition."""
    if n_per_condition <= 0:
        raise ValueError("n_per_condition must be positive")
    seed = truth.seed if seed is None else seed
    table = truth.table()
    streams = np.random.SeedSequence(seed).spawn(len(CONDITIONS))
    records = []
    for cond, ss in zip(CONDITIONS, streams):
        rng = np.random.Generator(np.random.PCG64(ss))
        cells = np.asarray(table.blocks[cond].cells, dtype=float)
        draws = rng.choice(4, size=n_per_condition, p=cells / cells.sum())
        for k in draws:
            sa, sb = CELL_SIGNS[k]
            records.append(TrialRecord(truth.name, cond, SenseOutcome(sa), SenseOutcome(sb)))
    return records
