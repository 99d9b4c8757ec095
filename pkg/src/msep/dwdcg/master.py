"""Restricted master problem over the pooled extreme points.

Each block contributes convex weights over its pooled vertices; linking rows
couple the weighted columns, convexity rows pin each block's weights to sum
to one. A +/- artificial pair per linking row (big-M cost) keeps every
restricted master feasible no matter how thin the pools are; genuine columns
price the artificials out as generation proceeds.

The upper bound is only refreshed from masters whose artificials are all
zero, so it always reflects a genuinely feasible plan (the initial,
possibly artificial-supported objective seeds it as a finite starting
value).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from msep.dwdcg.pool import ExtremePointPool
from msep.lp import LpProblem, LpStatus, SolverTolerances, extract_duals, solve


class MasterSolveError(RuntimeError):
    """The restricted master failed, which the artificial columns rule out."""


@dataclass
class MasterState:
    """Mutable bookkeeping of the column-generation master."""

    big_m: float
    h0: np.ndarray
    stage_count: int
    objective: float = np.inf            # f of the latest master (with penalties)
    alpha: np.ndarray = field(default_factory=lambda: np.zeros(0))
    beta: np.ndarray = field(default_factory=lambda: np.zeros(0))
    lambdas: list[np.ndarray] = field(default_factory=list)
    artificial_activity: float = 0.0
    ub: float = np.inf                   # best feasible objective so far
    best_lb: float = -np.inf             # best Lagrangian bound so far
    iteration: int = 0
    incumbent_lambdas: list[np.ndarray] | None = None
    incumbent_objective: float = np.inf

    @property
    def artificial_tol(self) -> float:
        return 1e-7 * (1.0 + float(np.max(np.abs(self.h0), initial=0.0)))


def build_master_lp(pool: ExtremePointPool, state: MasterState) -> LpProblem:
    """Assemble the current restricted master as a dense-small LP."""
    n_link = len(state.h0)
    s_count = state.stage_count
    n_cols = pool.total_columns + 2 * n_link
    a = np.zeros((n_link + s_count, n_cols))
    cost = np.zeros(n_cols)

    j = 0
    for i in range(s_count):
        for col in pool.columns[i]:
            if n_link:
                a[:n_link, j] = col.link
            a[n_link + i, j] = 1.0
            cost[j] = col.cost
            j += 1
    for r in range(n_link):
        a[r, j] = 1.0
        a[r, j + n_link] = -1.0
        cost[j] = state.big_m
        cost[j + n_link] = state.big_m
        j += 1

    return LpProblem(
        a_eq=sp.csr_matrix(a),
        b_eq=np.concatenate([state.h0, np.ones(s_count)]),
        cost=cost,
        lower=np.zeros(n_cols),
        upper=np.full(n_cols, np.inf),
    )


def solve_master(
    state: MasterState,
    pool: ExtremePointPool,
    backend: str = "highs",
    tolerances: SolverTolerances | None = None,
) -> MasterState:
    """Re-solve the restricted master; refresh duals, weights and the UB."""
    if any(pool.size(i + 1) == 0 for i in range(state.stage_count)):
        raise MasterSolveError("every block needs at least one pooled column")
    problem = build_master_lp(pool, state)
    result = solve(problem, backend=backend, tolerances=tolerances)
    if result.status is not LpStatus.OPTIMAL:
        raise MasterSolveError(
            f"restricted master ended {result.status.name}; artificial columns "
            "should make it solvable"
        )

    n_link = len(state.h0)
    state.objective = result.objective
    state.beta = extract_duals(result, slice(0, n_link))
    state.alpha = extract_duals(result, slice(n_link, n_link + state.stage_count))

    offsets = np.concatenate([[0], np.cumsum([pool.size(i + 1)
                                              for i in range(state.stage_count)])])
    state.lambdas = [result.x[offsets[i]:offsets[i + 1]].copy()
                     for i in range(state.stage_count)]
    state.artificial_activity = float(np.sum(result.x[offsets[-1]:]))

    if state.artificial_activity <= state.artificial_tol and result.objective <= state.ub:
        state.ub = result.objective
        state.incumbent_lambdas = [lam.copy() for lam in state.lambdas]
        state.incumbent_objective = result.objective
    return state
