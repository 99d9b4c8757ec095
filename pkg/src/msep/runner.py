"""Batch orchestration: load inputs, solve, and write run artifacts.

One run produces `plan.json`, `dispatch_stage{s}.csv` per stage,
`metrics.json`, `convergence.csv` (decomposed mode only) and
`manifest.json` in the output directory. Carbon-target sweeps produce
`sweep.csv` instead of per-run plan files. Exit codes: 0 success, 2 input
error, 3 infeasible, 4 iteration limit, 5 numerical failure.

`plan.json` and `convergence.csv` contain no wall-clock data, so two runs
of the same manifest are byte-identical; timings live in `manifest.json`.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from msep import lp
from msep.domain import (
    ConfigError,
    PlanningInputs,
    load_config,
    load_series,
    validate_inputs,
)
from msep.dwdcg import (
    DecompositionError,
    IterationLimitError,
    LinkingInfeasibleError,
    MasterSolveError,
    StageInfeasibleError,
    convergence_csv,
    run_dwd_cg,
)
from msep.formulation import (
    assemble_monolithic,
    build_linking_constraints,
    build_stage_block,
    plan_from_block_solutions,
)
from msep.metrics import metrics_payload
from msep.solution import (
    FLOW_NAMES,
    POWER_NAMES,
    STATE_NAMES,
    PlanSolution,
    SolveDiagnostics,
)
from msep.units import UnitError

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_ITERATION_LIMIT = 4
EXIT_NUMERICAL = 5

SWEEP_COLUMNS = ("target", "lcoe", "lcos_b", "lcos_h", "lcos_a",
                 "r_curt", "r_reti", "status")


class RunError(Exception):
    """Run failure carrying the process exit code."""

    def __init__(self, exit_code: int, message: str):
        super().__init__(message)
        self.exit_code = exit_code


@dataclasses.dataclass
class RunSettings:
    """Effective command-line choices for one invocation."""

    mode: str = "dwdcg"                  # direct | dwdcg
    epsilon: float | None = None         # None: config value
    max_iterations: int | None = None
    threads: int = 1
    out_dir: Path = Path(".")
    paper_literal: bool = False
    seed: int | None = None              # synthetic-generation seed, if any


def tolerances_from_config(config) -> lp.SolverTolerances:
    defaults = lp.SolverTolerances()
    return lp.SolverTolerances(
        feasibility=config.solver_feasibility or defaults.feasibility,
        optimality=config.solver_optimality or defaults.optimality,
        zero_pivot=config.solver_zero_pivot or defaults.zero_pivot,
    )


def apply_paper_literal(inputs: PlanningInputs) -> PlanningInputs:
    """Swap the documented design choices for their published readings."""
    config = dataclasses.replace(
        inputs.config,
        as_transient_mode="absolute",
        discount_degradation=False,
        lcos_ammonia_revenue=False,
    )
    return dataclasses.replace(inputs, config=config)


def load_inputs(config_path: str | Path, series_path: str | Path) -> PlanningInputs:
    """Parse and validate both input files; RunError(2) on any defect."""
    try:
        config, catalog, prices = load_config(config_path)
        series = load_series(series_path, config.timestep_count)
    except (ConfigError, UnitError) as exc:
        raise RunError(EXIT_INPUT, str(exc))
    report = validate_inputs(config, catalog, prices, series)
    for line in report.warnings:
        print(f"warning: {line}", file=sys.stderr)
    if report.fatal:
        raise RunError(EXIT_INPUT, "\n".join(f"fatal: {m}" for m in report.fatal))
    return PlanningInputs(config=config, catalog=catalog, prices=prices, series=series)


def solve_direct(inputs: PlanningInputs, tolerances) -> PlanSolution:
    backend = inputs.config.backend
    stage_count = inputs.config.stage_count
    t0 = time.perf_counter()
    blocks = [build_stage_block(s, inputs) for s in range(1, stage_count + 1)]
    linking = build_linking_constraints(inputs, blocks)
    problem, layout = assemble_monolithic(blocks, linking)
    result = lp.solve(problem, backend=backend, tolerances=tolerances)
    if result.status is lp.LpStatus.INFEASIBLE:
        rows = result.infeasible_rows
        if rows is None:
            rows = lp.infeasibility_certificate(
                problem, lambda p: lp.solve(p, backend=backend, tolerances=tolerances))
        raise RunError(EXIT_INFEASIBLE,
                       f"planning model infeasible; {len(rows)} conflicting rows: "
                       f"{list(rows)[:20]}")
    if result.status is lp.LpStatus.ITERATION_LIMIT:
        raise RunError(EXIT_ITERATION_LIMIT, "solver hit its iteration limit")
    if result.status is not lp.LpStatus.OPTIMAL:
        raise RunError(EXIT_NUMERICAL, f"solver ended with status {result.status.value}")
    diagnostics = SolveDiagnostics(
        mode="direct", backend=backend, status="optimal",
        iterations=result.iterations, wall_seconds=time.perf_counter() - t0,
    )
    return plan_from_block_solutions(inputs, blocks, layout.split(result.x),
                                     result.objective, diagnostics, linking)


def solve_dwdcg(inputs: PlanningInputs, settings: RunSettings, tolerances):
    stage_count = inputs.config.stage_count
    blocks = [build_stage_block(s, inputs) for s in range(1, stage_count + 1)]
    linking = build_linking_constraints(inputs, blocks)
    try:
        plan, records = run_dwd_cg(
            inputs, blocks, linking,
            epsilon=settings.epsilon,
            max_iterations=settings.max_iterations,
            thread_budget=settings.threads,
            backend=inputs.config.backend,
            tolerances=tolerances,
        )
    except StageInfeasibleError as exc:
        raise RunError(EXIT_INFEASIBLE,
                       f"{exc}; conflicting rows: {list(exc.rows)[:20]}")
    except LinkingInfeasibleError as exc:
        raise RunError(EXIT_INFEASIBLE, str(exc))
    except IterationLimitError as exc:
        raise RunError(EXIT_ITERATION_LIMIT, str(exc))
    except MasterSolveError as exc:
        raise RunError(EXIT_NUMERICAL, str(exc))
    if plan.diagnostics.status == "iteration_limit":
        raise RunError(EXIT_ITERATION_LIMIT,
                       f"column generation stopped after {len(records)} iterations "
                       f"at gap {plan.diagnostics.final_gap:.3e}")
    return plan, records


def solve_plan(inputs: PlanningInputs, settings: RunSettings):
    """Solve in the requested mode; returns (plan, convergence records or None)."""
    if settings.paper_literal:
        inputs = apply_paper_literal(inputs)
    if settings.epsilon is None:
        settings.epsilon = inputs.config.epsilon
    if settings.max_iterations is None:
        settings.max_iterations = inputs.config.max_iterations
    tolerances = tolerances_from_config(inputs.config)
    if settings.mode == "direct":
        return solve_direct(inputs, tolerances), None
    if settings.mode == "dwdcg":
        return solve_dwdcg(inputs, settings, tolerances)
    raise RunError(EXIT_INPUT, f"unknown mode {settings.mode!r}; expected direct|dwdcg")


def dispatch_csv(stage_result) -> str:
    """Per-step operational trajectory, one column per variable."""
    columns = list(POWER_NAMES) + list(FLOW_NAMES) + list(STATE_NAMES)
    series = [stage_result.power[name] for name in POWER_NAMES]
    series += [stage_result.flow[name] for name in FLOW_NAMES]
    series += [stage_result.state[name] for name in STATE_NAMES]
    lines = ["t," + ",".join(columns)]
    n = len(series[0])
    for t in range(n):
        lines.append(f"{t}," + ",".join(repr(float(col[t])) for col in series))
    return "\n".join(lines) + "\n"


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def build_manifest(
    config_path: Path,
    series_path: Path,
    settings: RunSettings,
    backend: str,
    raw_config: dict,
    started: str,
    wall_seconds: float,
    extra: dict | None = None,
) -> dict:
    manifest = {
        "config_file": str(config_path),
        "config_sha256": _sha256(config_path),
        "series_file": str(series_path),
        "series_sha256": _sha256(series_path),
        "config": raw_config,
        "mode": settings.mode,
        "backend": backend,
        "epsilon": settings.epsilon,
        "max_iterations": settings.max_iterations,
        "threads": settings.threads,
        "paper_literal": settings.paper_literal,
        "seed": settings.seed,
        "started_utc": started,
        "finished_utc": datetime.now(timezone.utc).isoformat(),
        "wall_seconds": wall_seconds,
    }
    if extra:
        manifest.update(extra)
    return manifest


def _raw_config(config_path: Path) -> dict:
    import yaml

    return yaml.safe_load(config_path.read_text(encoding="utf-8"))


def run(config_path: str | Path, series_path: str | Path, settings: RunSettings) -> int:
    """Single solve; writes all artifacts into settings.out_dir."""
    config_path, series_path = Path(config_path), Path(series_path)
    started = datetime.now(timezone.utc).isoformat()
    t0 = time.perf_counter()
    inputs = load_inputs(config_path, series_path)
    plan, records = solve_plan(inputs, settings)
    if settings.paper_literal:
        inputs = apply_paper_literal(inputs)

    out = Path(settings.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "plan.json").write_text(_json_text(plan.to_payload()), encoding="utf-8")
    for stage_result in plan.stages:
        path = out / f"dispatch_stage{stage_result.stage}.csv"
        path.write_text(dispatch_csv(stage_result), encoding="utf-8")
    metrics = metrics_payload(inputs, plan,
                              include_degradation=not settings.paper_literal)
    (out / "metrics.json").write_text(_json_text(metrics), encoding="utf-8")
    if records is not None:
        (out / "convergence.csv").write_text(convergence_csv(records), encoding="utf-8")

    manifest = build_manifest(
        config_path, series_path, settings, inputs.config.backend,
        _raw_config(config_path), started, time.perf_counter() - t0,
        extra={"status": plan.diagnostics.status,
               "objective": plan.objective,
               "iterations": plan.diagnostics.iterations},
    )
    (out / "manifest.json").write_text(_json_text(manifest), encoding="utf-8")
    print(f"status={plan.diagnostics.status} objective={plan.objective:.6e} "
          f"npc={plan.costs.npc:.6e} artifacts={out}")
    return EXIT_OK


def interpolate_targets(final_target: float, stage_count: int) -> np.ndarray:
    """Linear per-stage schedule ending at the requested reduction."""
    if stage_count == 1:
        return np.array([final_target], dtype=float)
    return np.array(
        [final_target * s / (stage_count - 1) for s in range(stage_count)], dtype=float)


def sweep_cer(
    config_path: str | Path,
    series_path: str | Path,
    targets: list[float],
    settings: RunSettings,
) -> int:
    """Re-solve the plan for each final-stage carbon target; write sweep.csv."""
    config_path, series_path = Path(config_path), Path(series_path)
    started = datetime.now(timezone.utc).isoformat()
    t0 = time.perf_counter()
    base = load_inputs(config_path, series_path)

    rows = [",".join(SWEEP_COLUMNS)]
    statuses = []
    from msep.metrics import compute_metrics

    for target in targets:
        config = dataclasses.replace(
            base.config,
            carbon_reduction_targets=interpolate_targets(target, base.config.stage_count),
        )
        inputs = dataclasses.replace(base, config=config)
        per_run = dataclasses.replace(settings)
        try:
            plan, _ = solve_plan(inputs, per_run)
            if per_run.paper_literal:
                inputs = apply_paper_literal(inputs)
            _, report = compute_metrics(inputs, plan,
                                        include_degradation=not per_run.paper_literal)
            status = plan.diagnostics.status

            def cell(value: float | None) -> str:
                return "" if value is None else repr(float(value))

            rows.append(",".join([
                repr(float(target)), cell(report.lcoe), cell(report.lcos_b),
                cell(report.lcos_h), cell(report.lcos_a), cell(report.r_curt),
                cell(report.r_reti), status,
            ]))
        except RunError as exc:
            if exc.exit_code == EXIT_INPUT:
                raise
            status = {EXIT_INFEASIBLE: "infeasible",
                      EXIT_ITERATION_LIMIT: "iteration_limit"}.get(
                          exc.exit_code, "numerical")
            rows.append(",".join([repr(float(target))] + [""] * 6 + [status]))
            print(f"target {target}: {status}: {exc}", file=sys.stderr)
        statuses.append(status)

    out = Path(settings.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "sweep.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    manifest = build_manifest(
        config_path, series_path, settings, base.config.backend,
        _raw_config(config_path), started, time.perf_counter() - t0,
        extra={"sweep_targets": [float(t) for t in targets],
               "sweep_statuses": statuses},
    )
    (out / "manifest.json").write_text(_json_text(manifest), encoding="utf-8")
    print(f"sweep of {len(targets)} targets written to {out / 'sweep.csv'}")
    return EXIT_OK
