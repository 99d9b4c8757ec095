"""Column-generation driver for the stage-decomposed planning problem.

The loop alternates a restricted master over pooled stage vertices with one
pricing LP per stage. Pricing charges each stage its own cost minus the
master's price on the linking rows; a stage whose priced objective undercuts
its convexity dual offers an improving vertex. Stages price independently,
so they run on a thread pool; results are gathered in stage order to keep
every run bit-reproducible regardless of the thread budget.

Bounds: the master objective is an upper bound whenever its artificial
columns are inactive, and for any master prices beta the quantity
beta' h0 + sum_i (priced stage optima) lower-bounds the full problem, so the
best such value over all iterations tracks convergence from below.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from time import perf_counter
from typing import Sequence

import numpy as np

from msep.dwdcg.master import MasterState, solve_master
from msep.dwdcg.pool import ExtremePointPool
from msep.domain import PlanningInputs
from msep.formulation.linking import LinkingConstraints
from msep.formulation.stage_block import StageBlock
from msep.formulation.extract import plan_from_block_solutions
from msep.lp import (
    LpProblem,
    LpStatus,
    SimplexBasis,
    SolverTolerances,
    infeasibility_certificate,
    solve,
)
from msep.solution import PlanSolution, SolveDiagnostics


@dataclass
class ConvergenceRecord:
    """One pricing round: bounds after the round and the columns it added."""

    iteration: int
    upper_bound: float
    lower_bound: float     # best bound so far, not the per-round value
    gap: float
    columns_added: int
    wall_ms: float


def convergence_csv(records: Sequence[ConvergenceRecord], include_wall: bool = False) -> str:
    """Render records as CSV: iter,ub,lb,gap,cols_added and optionally wall_ms.

    Timing is opt-in so that the default output is identical across runs.
    """
    header = ["iter", "ub", "lb", "gap", "cols_added"]
    if include_wall:
        header.append("wall_ms")
    lines = [",".join(header)]
    for rec in records:
        row = [
            str(rec.iteration),
            repr(rec.upper_bound),
            repr(rec.lower_bound),
            repr(rec.gap),
            str(rec.columns_added),
        ]
        if include_wall:
            row.append(repr(rec.wall_ms))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


class DecompositionError(RuntimeError):
    """Base for failures that leave column generation without a usable plan."""

    def __init__(self, message: str, records: Sequence[ConvergenceRecord] = ()):
        super().__init__(message)
        self.records = list(records)


class StageInfeasibleError(DecompositionError):
    """A single stage's operational constraints admit no solution."""

    def __init__(self, stage: int, rows: tuple[int, ...]):
        super().__init__(f"stage {stage} operational model infeasible")
        self.stage = stage
        self.rows = rows


class LinkingInfeasibleError(DecompositionError):
    """Stages are individually feasible but the capacity links are not."""


class IterationLimitError(DecompositionError):
    """The iteration budget ran out before any feasible master appeared."""


def price_subproblem(
    stage: int,
    block: StageBlock,
    link_matrix,
    beta: np.ndarray,
    alpha_i: float,
    backend: str = "highs",
    tolerances: SolverTolerances | None = None,
    warm_start: SimplexBasis | None = None,
) -> tuple[np.ndarray, float, float, object]:
    """Solve one stage under master prices.

    Returns the vertex, its priced objective, the reduced cost
    phi = priced objective - alpha_i, and the backend's warm-start handle.
    """
    priced = block.cost - link_matrix.T @ beta if beta.size else block.cost
    problem = LpProblem(
        a_eq=block.a,
        b_eq=block.rhs,
        cost=np.asarray(priced, dtype=float),
        lower=block.lower,
        upper=block.upper,
    )
    result = solve(problem, warm_start=warm_start, backend=backend, tolerances=tolerances)
    if result.status is LpStatus.INFEASIBLE:
        rows = result.infeasible_rows
        if rows is None:
            rows = infeasibility_certificate(
                problem, lambda p: solve(p, backend=backend, tolerances=tolerances)
            )
        raise StageInfeasibleError(stage, tuple(rows))
    if result.status is not LpStatus.OPTIMAL:
        raise DecompositionError(
            f"stage {stage} pricing ended {result.status.name}; block bounds "
            "are finite so only numerical failure can explain this"
        )
    return result.x, result.objective, result.objective - alpha_i, result.basis


def initialize_pool(
    blocks: Sequence[StageBlock],
    linking: LinkingConstraints,
    backend: str,
    tolerances: SolverTolerances | None,
    executor: ThreadPoolExecutor,
    warm: list,
) -> tuple[ExtremePointPool, MasterState]:
    """Seed one zero-price vertex per stage and solve the first master.

    The first master may need its artificial columns, so its objective can
    include penalty terms; it still seeds a finite upper bound for the gap.
    """
    beta0 = np.zeros(linking.n_rows)

    def task(i: int):
        return price_subproblem(
            i + 1, blocks[i], linking.matrices[i], beta0, 0.0,
            backend=backend, tolerances=tolerances,
        )

    pool = ExtremePointPool(blocks=list(blocks), linking=linking)
    for i, (x, _sp_obj, _phi, basis) in enumerate(executor.map(task, range(len(blocks)))):
        warm[i] = basis
        pool.add(pool.make_column(i + 1, x))
    # the penalty must beat any plausible linking-row price, which is bounded
    # by the largest per-unit cost coefficient; keeping it near that scale
    # (rather than the total plan cost) preserves master conditioning, and
    # the driver escalates it if artificials refuse to leave
    coeff_scale = max(float(np.max(np.abs(b.cost), initial=0.0)) for b in blocks)
    state = MasterState(
        big_m=1e3 * (1.0 + coeff_scale),
        h0=np.asarray(linking.rhs, dtype=float),
        stage_count=len(blocks),
    )
    solve_master(state, pool, backend, tolerances)
    if not np.isfinite(state.ub):
        state.ub = state.objective
    return pool, state


def compute_bounds(state: MasterState, sp_objs: Sequence[float]) -> tuple[float, float, float]:
    """Fold one pricing round into (upper bound, best lower bound, gap)."""
    round_lb = float(state.beta @ state.h0) + float(sum(sp_objs))
    state.best_lb = max(state.best_lb, round_lb)
    gap = abs(state.ub - state.best_lb) / max(abs(state.ub), 1e-12)
    return state.ub, state.best_lb, gap


def run_dwd_cg(
    inputs: PlanningInputs,
    blocks: Sequence[StageBlock],
    linking: LinkingConstraints,
    epsilon: float | None = None,
    max_iterations: int | None = None,
    thread_budget: int = 1,
    backend: str = "highs",
    tolerances: SolverTolerances | None = None,
) -> tuple[PlanSolution, list[ConvergenceRecord]]:
    """Run column generation to a relative gap of `epsilon`.

    Returns the recovered plan and the per-iteration convergence log. Raises
    StageInfeasibleError / LinkingInfeasibleError when no plan exists and
    IterationLimitError when the budget expires before any feasible master;
    if the budget expires after one, the best plan is returned with its
    diagnostics marked `iteration_limit`.
    """
    config = inputs.config
    epsilon = config.epsilon if epsilon is None else epsilon
    max_iterations = config.max_iterations if max_iterations is None else max_iterations
    t_start = perf_counter()
    records: list[ConvergenceRecord] = []
    warm: list = [None] * len(blocks)
    status = "iteration_limit"
    escalations = 0

    with ThreadPoolExecutor(max_workers=max(1, thread_budget)) as executor:
        pool, state = initialize_pool(blocks, linking, backend, tolerances, executor, warm)
        for k in range(1, max_iterations + 1):
            round_start = perf_counter()
            state.iteration = k
            beta = state.beta.copy()
            alpha = state.alpha.copy()

            def task(i: int):
                return price_subproblem(
                    i + 1, blocks[i], linking.matrices[i], beta, alpha[i],
                    backend=backend, tolerances=tolerances, warm_start=warm[i],
                )

            results = list(executor.map(task, range(len(blocks))))

            tol_rc = 1e-8 * (1.0 + abs(state.objective))
            sp_objs = []
            added = 0
            for i, (x, sp_obj, phi, basis) in enumerate(results):
                sp_objs.append(sp_obj)
                if basis is not None:
                    warm[i] = basis
                if phi < -tol_rc:
                    added += pool.add(pool.make_column(i + 1, x))

            ub, lb, gap = compute_bounds(state, sp_objs)
            records.append(ConvergenceRecord(
                iteration=k, upper_bound=ub, lower_bound=lb, gap=gap,
                columns_added=added, wall_ms=(perf_counter() - round_start) * 1e3,
            ))

            if gap < epsilon and state.incumbent_lambdas is not None:
                status = "optimal"
                break
            if added == 0:
                if state.incumbent_lambdas is None or \
                        state.artificial_activity > state.artificial_tol:
                    # stiffen the penalty before giving up: the starting value
                    # is sized to typical linking prices, not a proof
                    if escalations < 4:
                        escalations += 1
                        state.big_m *= 32.0
                        solve_master(state, pool, backend, tolerances)
                        continue
                    raise LinkingInfeasibleError(
                        "no stage offers an improving vertex while the linking "
                        "rows still need artificial support: the multi-stage "
                        "capacity links are unsatisfiable", records,
                    )
                status = "optimal"
                break
            solve_master(state, pool, backend, tolerances)

    if state.incumbent_lambdas is None:
        raise IterationLimitError(
            f"no artificial-free master within {max_iterations} iterations", records,
        )

    xs = []
    for i, block in enumerate(blocks):
        lam = state.incumbent_lambdas[i]
        x = np.zeros(block.dim)
        for weight, column in zip(lam, pool.columns[i]):
            if weight != 0.0:
                x += weight * column.x
        xs.append(x)

    diagnostics = SolveDiagnostics(
        mode="dwdcg",
        backend=backend,
        status=status,
        iterations=len(records),
        final_gap=records[-1].gap if records else None,
        wall_seconds=perf_counter() - t_start,
    )
    plan = plan_from_block_solutions(
        inputs, blocks, xs, state.incumbent_objective, diagnostics, linking,
    )
    return plan, records
