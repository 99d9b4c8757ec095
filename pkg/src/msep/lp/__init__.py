"""LP solving layer: shared problem/solution types and two backends.

`solve` is the uniform entry point. Backend "highs" adapts the external
dual simplex shipped with scipy; "reference" is the self-contained revised
simplex in this package. Both return vertex solutions with equality-row
duals, so callers never branch on the backend.
"""

from __future__ import annotations

from msep.lp.diagnose import infeasibility_certificate
from msep.lp.highs import solve_highs
from msep.lp.mps import mps_string, write_mps
from msep.lp.problem import (
    LpProblem,
    LpSolution,
    LpStatus,
    SolverTolerances,
    dual_objective,
    extract_duals,
    primal_residual,
)
from msep.lp.simplex import SimplexBasis, solve_simplex

BACKENDS = ("highs", "reference")


def solve(
    problem: LpProblem,
    warm_start=None,
    backend: str = "highs",
    tolerances: SolverTolerances | None = None,
) -> LpSolution:
    """Solve `problem` with the named backend.

    A Numerical outcome from the external backend is retried once on the
    reference solver, whose equilibration scaling usually absorbs the issue.
    """
    if backend == "highs":
        result = solve_highs(problem, tolerances=tolerances)
        if result.status is LpStatus.NUMERICAL:
            result = solve_simplex(problem, tolerances=tolerances, warm_start=warm_start)
        return result
    if backend == "reference":
        return solve_simplex(problem, tolerances=tolerances, warm_start=warm_start)
    raise ValueError(f"unknown LP backend {backend!r}; expected one of {BACKENDS}")


__all__ = [
    "BACKENDS",
    "LpProblem",
    "LpSolution",
    "LpStatus",
    "SimplexBasis",
    "SolverTolerances",
    "dual_objective",
    "extract_duals",
    "infeasibility_certificate",
    "mps_string",
    "primal_residual",
    "solve",
    "solve_highs",
    "solve_simplex",
    "write_mps",
]
