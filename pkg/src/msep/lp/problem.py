"""LP contract shared by the monolithic oracle and the decomposition engine.

Problems are minimizations in equality standard form

    min c.T x   s.t.   A x = b,   l <= x <= u

with possibly infinite bounds. Inequalities are expected to arrive already
slacked (the formulation emits one +-1 slack column per inequality row).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.sparse as sp


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"
    NUMERICAL = "numerical"


@dataclass(frozen=True)
class SolverTolerances:
    feasibility: float = 1e-7
    optimality: float = 1e-7
    zero_pivot: float = 1e-10


@dataclass
class LpProblem:
    cost: np.ndarray
    a_eq: sp.csr_matrix
    b_eq: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    name: str = ""

    @property
    def n_vars(self) -> int:
        return len(self.cost)

    @property
    def n_rows(self) -> int:
        return self.a_eq.shape[0]

    def validate(self) -> None:
        """Raise on structurally broken problems (shape/NaN/empty-row issues)."""
        m, n = self.a_eq.shape
        if not (len(self.cost) == len(self.lower) == len(self.upper) == n):
            raise ValueError(
                f"{self.name or 'LP'}: inconsistent dimensions "
                f"(cost {len(self.cost)}, bounds {len(self.lower)}/{len(self.upper)}, A cols {n})"
            )
        if len(self.b_eq) != m:
            raise ValueError(f"{self.name or 'LP'}: RHS length {len(self.b_eq)} != rows {m}")
        if not np.all(np.isfinite(self.a_eq.data)):
            raise ValueError(f"{self.name or 'LP'}: non-finite matrix coefficient")
        if not np.all(np.isfinite(self.cost)):
            raise ValueError(f"{self.name or 'LP'}: non-finite cost coefficient")
        if not np.all(np.isfinite(self.b_eq)):
            raise ValueError(f"{self.name or 'LP'}: non-finite RHS entry")
        if np.any(np.isnan(self.lower)) or np.any(np.isnan(self.upper)):
            raise ValueError(f"{self.name or 'LP'}: NaN bound")
        if np.any(self.lower > self.upper):
            bad = int(np.argmax(self.lower > self.upper))
            raise ValueError(
                f"{self.name or 'LP'}: empty bound interval on column {bad} "
                f"[{self.lower[bad]}, {self.upper[bad]}]"
            )
        if m:
            counts = np.diff(self.a_eq.indptr)
            if np.any(counts == 0):
                raise ValueError(
                    f"{self.name or 'LP'}: row {int(np.argmax(counts == 0))} has no nonzeros"
                )


@dataclass
class LpSolution:
    status: LpStatus
    objective: float
    x: np.ndarray | None = None
    duals: np.ndarray | None = None           # one multiplier per equality row
    reduced_costs: np.ndarray | None = None
    iterations: int = 0
    infeasible_rows: tuple[int, ...] | None = None
    basis: object | None = None                # backend-specific warm-start handle


def extract_duals(solution: LpSolution, rows: slice | np.ndarray) -> np.ndarray:
    """Dual sub-vector for a contiguous (or indexed) row range of an optimal solve."""
    if solution.status is not LpStatus.OPTIMAL:
        raise ValueError(f"duals require an optimal solution, status is {solution.status.value}")
    if solution.duals is None:
        raise ValueError("solution carries no duals")
    return solution.duals[rows]


def dual_objective(problem: LpProblem, solution: LpSolution, tol: float = 1e-9) -> float:
    """Bound-aware dual objective y.T b + sum of reduced costs at their binding bounds.

    Reduced costs below `tol` (relative to the cost scale) are treated as zero
    so infinite bounds never multiply a tolerance-level residual.
    """
    if solution.duals is None or solution.reduced_costs is None:
        raise ValueError("solution carries no duals")
    scale = tol * (1.0 + float(np.max(np.abs(problem.cost), initial=0.0)))
    rc = np.where(np.abs(solution.reduced_costs) <= scale, 0.0, solution.reduced_costs)
    value = float(solution.duals @ problem.b_eq)
    pos = rc > 0
    neg = rc < 0
    value += float(np.sum(rc[pos] * problem.lower[pos]))
    value += float(np.sum(rc[neg] * problem.upper[neg]))
    return value


def primal_residual(problem: LpProblem, x: np.ndarray) -> float:
    """Infinity norm of A x - b."""
    if problem.n_rows == 0:
        return 0.0
    return float(np.max(np.abs(problem.a_eq @ x - problem.b_eq)))
