"""Backend-agnostic infeasibility certificates via an elastic relaxation.

The reference solver reports violated rows from its own phase 1; the external
backend does not expose an equivalent, so this relaxes every equality with a
pair of penalty columns and reads the rows whose penalties stay active.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from msep.lp.problem import LpProblem, LpStatus


def infeasibility_certificate(problem: LpProblem, solve_fn) -> tuple[int, ...]:
    """Rows that cannot be met simultaneously, per an elastic re-solve.

    `solve_fn(problem) -> LpSolution` supplies the backend. Returns row
    indices with positive elastic activity; empty if the elastic solve finds
    no violation, meaning the original infeasibility was marginal.
    """
    m, n = problem.a_eq.shape
    if m == 0:
        return ()
    eye = sp.eye(m, format="csc")
    elastic = LpProblem(
        a_eq=sp.hstack([problem.a_eq.tocsc(), eye, -eye], format="csc"),
        b_eq=problem.b_eq.copy(),
        cost=np.concatenate([np.zeros(n), np.ones(2 * m)]),
        lower=np.concatenate([problem.lower, np.zeros(2 * m)]),
        upper=np.concatenate([problem.upper, np.full(2 * m, np.inf)]),
    )
    result = solve_fn(elastic)
    if result.status is not LpStatus.OPTIMAL or result.x is None:
        return ()
    slack = result.x[n:n + m] + result.x[n + m:]
    tol = 1e-7 * (1.0 + float(np.max(np.abs(problem.b_eq), initial=0.0)))
    return tuple(int(i) for i in np.flatnonzero(slack > tol))
