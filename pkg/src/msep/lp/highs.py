"""Adapter for scipy's HiGHS dual-simplex backend.

Dual simplex returns basic (vertex) optimal solutions, which the column
generation engine requires. Duals follow the dObj/dRHS convention, so the
dual objective is y.T b plus bound terms; reduced costs are recomputed as
c - A.T y to keep one convention across backends.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linprog

from msep.lp.problem import LpProblem, LpSolution, LpStatus, SolverTolerances

_STATUS_MAP = {
    0: LpStatus.OPTIMAL,
    1: LpStatus.ITERATION_LIMIT,
    2: LpStatus.INFEASIBLE,
    3: LpStatus.UNBOUNDED,
    4: LpStatus.NUMERICAL,
}


def solve_highs(problem: LpProblem, tolerances: SolverTolerances | None = None) -> LpSolution:
    tolerances = tolerances or SolverTolerances()
    problem.validate()
    bounds = np.column_stack([problem.lower, problem.upper])
    has_rows = problem.n_rows > 0
    res = linprog(
        problem.cost,
        A_eq=problem.a_eq if has_rows else None,
        b_eq=problem.b_eq if has_rows else None,
        bounds=bounds,
        method="highs-ds",
        options={
            "primal_feasibility_tolerance": tolerances.feasibility,
            "dual_feasibility_tolerance": tolerances.optimality,
        },
    )
    status = _STATUS_MAP.get(res.status, LpStatus.NUMERICAL)
    if status is not LpStatus.OPTIMAL:
        return LpSolution(status=status, objective=float("nan"),
                          iterations=int(getattr(res, "nit", 0) or 0))
    x = np.asarray(res.x, dtype=float)
    duals = np.asarray(res.eqlin.marginals, dtype=float) if has_rows else np.zeros(0)
    reduced = problem.cost - (problem.a_eq.T @ duals if has_rows else 0.0)
    return LpSolution(
        status=LpStatus.OPTIMAL,
        objective=float(problem.cost @ x),
        x=x,
        duals=duals,
        reduced_costs=np.asarray(reduced, dtype=float),
        iterations=int(getattr(res, "nit", 0) or 0),
    )
