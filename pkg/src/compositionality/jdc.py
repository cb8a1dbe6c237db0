"""Joint distribution criterion: does some Pr(A1, A2, B1, B2) marginalize to the table?

The question is the feasibility of ``M q = p, q >= 0`` where ``q`` holds the 16
joint cells and ``p`` the 16 observed block cells plus a normalization row.
Feasibility is decided with a dense phase-one simplex using Bland's rule.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .errors import IterationLimit
from .model import (
    CELL_SIGNS,
    CONDITIONS,
    JOINT_CELLS,
    CombinationTable,
    JointDistribution,
    block_from_stats,
    marginal_a,
    marginal_b,
    expectation,
)
from .selectivity import marginal_diffs

DEFAULT_TOLERANCE = 1e-7
DEFAULT_PIVOT_BUDGET = 10_000

_PIVOT_EPS = 1e-12
_COST_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class LpSystem:
    matrix: np.ndarray  # 17 x 16, zero/one
    rhs: np.ndarray  # 17
    row_labels: tuple = field(default=())


def _observation_rows():
    rows, labels = [], []
    for cond in CONDITIONS:
        i, j = cond.a_index - 1, cond.b_index + 1  # positions of ai and bj in (a1, a2, b1, b2)
        for s, t in CELL_SIGNS:
            rows.append([1.0 if (x[i] == s and x[j] == t) else 0.0 for x in JOINT_CELLS])
            labels.append((cond, (s, t)))
    rows.append([1.0] * len(JOINT_CELLS))
    labels.append("total")
    matrix = np.array(rows)
    matrix.setflags(write=False)
    return matrix, tuple(labels)


_MATRIX, _ROW_LABELS = _observation_rows()


def build_system(table: CombinationTable) -> LpSystem:
    """Row (block, cell) selects the joint cells whose signs match that cell."""
    rhs = np.array([p for block in table for p in block.cells] + [1.0])
    rhs.setflags(write=False)
    return LpSystem(_MATRIX, rhs, _ROW_LABELS)


def phase_one(A: np.ndarray, b: np.ndarray, max_pivots: int = DEFAULT_PIVOT_BUDGET):
    """Minimize the sum of artificials for ``A x + s = b, x, s >= 0``.

    Returns ``(x, objective, pivots)``.  Entering and leaving variables follow
    Bland's rule, so the method terminates on degenerate problems.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    sign = np.where(b < 0, -1.0, 1.0)
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A * sign[:, None]
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b * sign
    T[m, :n] = -T[:m, :n].sum(axis=0)
    T[m, -1] = -T[:m, -1].sum()
    basis = list(range(n, n + m))

    pivots = 0
    while True:
        costs = T[m, :-1]
        candidates = np.flatnonzero(costs < -_COST_EPS)
        if candidates.size == 0:
            break
        if pivots >= max_pivots:
            raise IterationLimit(pivots, float(-T[m, -1]))
        col = int(candidates[0])
        column = T[:m, col]
        rows = np.flatnonzero(column > _PIVOT_EPS)
        # a phase-one objective is bounded below by 0, so some row qualifies
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        tied = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
        row = int(min(tied, key=lambda r: basis[r]))

        T[row] /= T[row, col]
        factors = T[:, col].copy()
        factors[row] = 0.0
        T -= np.outer(factors, T[row])
        basis[row] = col
        pivots += 1

    x = np.zeros(n + m)
    x[basis] = T[:m, -1]
    objective = max(0.0, float(x[n:].sum()))
    return x[:n], objective, pivots


class JdcStatus(enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class JdcResult:
    status: JdcStatus
    witness: Optional[JointDistribution]
    residual: float  # phase-one optimum: L1 norm of the constraint violation
    tolerance: float
    pivots: int = 0

    @property
    def feasible(self) -> bool:
        return self.status is JdcStatus.FEASIBLE


def solve(system: LpSystem, tolerance: float = DEFAULT_TOLERANCE,
          pivot_budget: int = DEFAULT_PIVOT_BUDGET) -> JdcResult:
    q, objective, pivots = phase_one(system.matrix, system.rhs, pivot_budget)
    if objective > tolerance:
        return JdcResult(JdcStatus.INFEASIBLE, None, objective, tolerance, pivots)
    q = np.clip(q, 0.0, None)
    q = q / q.sum()
    return JdcResult(JdcStatus.FEASIBLE, JointDistribution(tuple(q)), objective,
                     tolerance, pivots)


def jdc(table: CombinationTable, tolerance: float = DEFAULT_TOLERANCE,
        pivot_budget: int = DEFAULT_PIVOT_BUDGET) -> JdcResult:
    return solve(build_system(table), tolerance, pivot_budget)


def verify(witness: JointDistribution, table: CombinationTable, tol: float = 1e-6) -> bool:
    """True iff the witness marginalizes to every block cell within ``tol``."""
    system = build_system(table)
    predicted = system.matrix @ np.asarray(witness.q)
    return bool(np.max(np.abs(predicted - system.rhs)) <= tol)


@dataclass(frozen=True)
class MsProjection:
    table: CombinationTable
    clamps: tuple
    max_shift: float  # largest absolute cell change
    method: str


# Cells of block (i, j) as an affine function of
# theta = (a1, a2, b1, b2, t11, t12, t21, t22) with t the (+,+) cell:
# (t, a_i - t, b_j - t, 1 - a_i - b_j + t).
def _affine_cells():
    C = np.zeros((16, 8))
    d = np.zeros(16)
    for k, cond in enumerate(CONDITIONS):
        ia, ib, it = cond.a_index - 1, 1 + cond.b_index, 4 + k
        r = 4 * k
        C[r, it] = 1
        C[r + 1, ia], C[r + 1, it] = 1, -1
        C[r + 2, ib], C[r + 2, it] = 1, -1
        C[r + 3, ia], C[r + 3, ib], C[r + 3, it] = -1, -1, 1
        d[r + 3] = 1
    return C, d


_C, _D = _affine_cells()


def _average_stats(table: CombinationTable):
    b = table.block
    a = ((marginal_a(b(1, 1)) + marginal_a(b(1, 2))) / 2,
         (marginal_a(b(2, 1)) + marginal_a(b(2, 2))) / 2)
    bb = ((marginal_b(b(1, 1)) + marginal_b(b(2, 1))) / 2,
          (marginal_b(b(1, 2)) + marginal_b(b(2, 2))) / 2)
    return a, bb


def _rebuild(table, a, bb, e_values):
    blocks, clamps = {}, []
    for cond, e in zip(CONDITIONS, e_values):
        ai = min(max(a[cond.a_index - 1], 0.0), 1.0)
        bj = min(max(bb[cond.b_index - 1], 0.0), 1.0)
        block, clamp = block_from_stats(ai, bj, e, cond, table.blocks[cond].n)
        blocks[cond] = block
        if clamp is not None:
            clamps.append(clamp)
    return CombinationTable(blocks, name=table.name, primes=table.primes), tuple(clamps)


def project_to_ms(table: CombinationTable, method: str = "least_squares",
                  tolerance: float = 1e-12) -> MsProjection:
    """Nearest table satisfying marginal selectivity exactly.

    ``least_squares`` (default) minimizes the Euclidean distance over all 16
    cells subject to exact selectivity and nonnegativity.  ``average`` keeps
    each block's correlation and replaces its marginals by the mean of the two
    condition-specific values, clamping correlations that become infeasible.
    A table that already satisfies selectivity within ``tolerance`` is
    returned unchanged.
    """
    if max(marginal_diffs(table).values()) <= tolerance:
        return MsProjection(table, (), 0.0, method)
    a, bb = _average_stats(table)
    e_avg = [expectation(blk) for blk in table]
    if method == "average":
        projected, clamps = _rebuild(table, a, bb, e_avg)
    elif method == "least_squares":
        start, _ = _rebuild(table, a, bb, e_avg)
        theta0 = np.array([*a, *bb, *(blk.p_pp for blk in start)])
        target = np.array([c for blk in table for c in blk.cells])

        def objective(theta):
            r = _C @ theta + _D - target
            return float(r @ r), 2.0 * (_C.T @ r)

        res = minimize(
            objective, theta0, jac=True, method="SLSQP",
            constraints=[{"type": "ineq", "fun": lambda th: _C @ th + _D,
                          "jac": lambda th: _C}],
            bounds=[(0.0, 1.0)] * 8,
            options={"ftol": 1e-15, "maxiter": 200},
        )
        theta = res.x if res.success or res.fun <= objective(theta0)[0] else theta0
        a, bb = theta[:2], theta[2:4]
        e_vals = [4 * t + 1 - 2 * a[c.a_index - 1] - 2 * bb[c.b_index - 1]
                  for t, c in zip(theta[4:], CONDITIONS)]
        projected, clamps = _rebuild(table, a, bb, e_vals)
        # solver slack below the clamp threshold is not worth reporting
        clamps = tuple(c for c in clamps if abs(c.requested - c.applied) > 1e-7)
    else:
        raise ValueError(f"unknown projection method {method!r}")
    shift = max(abs(x - y) for b0, b1 in zip(table, projected)
                for x, y in zip(b0.cells, b1.cells))
    return MsProjection(projected, clamps, shift, method)
