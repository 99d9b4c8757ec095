"""Dantzig-Wolfe decomposition with column generation over stage blocks."""

from __future__ import annotations

from msep.dwdcg.engine import (
    ConvergenceRecord,
    DecompositionError,
    IterationLimitError,
    LinkingInfeasibleError,
    StageInfeasibleError,
    compute_bounds,
    convergence_csv,
    initialize_pool,
    price_subproblem,
    run_dwd_cg,
)
from msep.dwdcg.master import MasterSolveError, MasterState, build_master_lp, solve_master
from msep.dwdcg.pool import Column, ColumnInfeasibleError, ExtremePointPool

__all__ = [
    "Column",
    "ColumnInfeasibleError",
    "ConvergenceRecord",
    "DecompositionError",
    "ExtremePointPool",
    "IterationLimitError",
    "LinkingInfeasibleError",
    "MasterSolveError",
    "MasterState",
    "StageInfeasibleError",
    "build_master_lp",
    "compute_bounds",
    "convergence_csv",
    "initialize_pool",
    "price_subproblem",
    "run_dwd_cg",
    "solve_master",
]
