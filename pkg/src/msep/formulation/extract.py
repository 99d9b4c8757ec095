"""Turn raw LP vectors back into planning terms.

Extraction is the inverse of the index maps; cost evaluation re-derives the
objective from the extracted plan through the discounting formulas, which
cross-checks the builder's cost vector (round-trip identity), and the
residual report measures constraint satisfaction per family for any
candidate solution, monolithic or recovered from a decomposition.
"""

from __future__ import annotations

import numpy as np

from msep.discounting import (
    discount_delta1,
    discount_delta2,
    discount_delta3,
    salvage_fraction,
)
from msep.domain import FACILITIES, PlanningInputs
from msep.formulation.linking import LinkingConstraints
from msep.formulation.stage_block import StageBlock
from msep.solution import (
    FLOW_NAMES,
    POWER_NAMES,
    STATE_NAMES,
    CostBreakdown,
    PlanSolution,
    SolveDiagnostics,
    StageResult,
)


def stage_result_from_vector(
    inputs: PlanningInputs, block: StageBlock, x: np.ndarray
) -> StageResult:
    varmap = block.varmap
    power = {name: np.asarray(x[varmap.series(name)], dtype=float) for name in POWER_NAMES}
    flow = {name: np.asarray(x[varmap.series(name)], dtype=float) for name in FLOW_NAMES}
    state = {name: np.asarray(x[varmap.state_series(name)], dtype=float)
             for name in STATE_NAMES}
    setpoints = (
        np.asarray(x[varmap.setpoint(0) + np.arange(varmap.setpoint_count)], dtype=float)
        if varmap.setpoint_count else np.zeros(0)
    )
    return StageResult(
        stage=block.stage,
        capacity={fid: float(x[varmap.cap(fid)]) for fid in FACILITIES},
        addition={fid: float(x[varmap.add(fid)]) for fid in FACILITIES},
        retirement_cfpp=float(x[varmap.reti_cfpp]),
        power=power,
        flow=flow,
        state=state,
        setpoints=setpoints,
    )


def evaluate_costs(inputs: PlanningInputs, stages: list[StageResult]) -> CostBreakdown:
    """Present-value cost terms re-derived from the extracted plan."""
    cfg, conv, fac, prices = (
        inputs.config, inputs.conversion, inputs.facilities, inputs.prices,
    )
    s_count, dy, rate = cfg.stage_count, cfg.years_per_stage, cfg.interest_rate
    dt = cfg.timestep_hours

    zeros = lambda: np.zeros(s_count)  # noqa: E731 - terse local factory
    investment, fixed_om, retirement = zeros(), zeros(), zeros()
    coal, degradation = zeros(), zeros()
    h2_purch, nh3_purch, h2_sale, nh3_sale, salvage = (
        zeros(), zeros(), zeros(), zeros(), zeros(),
    )
    inv_by = {fid: zeros() for fid in FACILITIES}
    om_by = {fid: zeros() for fid in FACILITIES}
    salv_by = {fid: zeros() for fid in FACILITIES}

    for st in stages:
        s = st.stage
        i = s - 1
        first_year = (s - 1) * dy + 1
        d1_first = discount_delta1(first_year, rate)
        d1_end = discount_delta1(s_count * dy, rate)
        d2 = discount_delta2(s, s_count, dy, rate)
        d3 = discount_delta3(s, dy, rate)

        for fid in FACILITIES:
            unit = float(fac[fid].invest_cost[i])
            add = st.addition[fid]
            keep = salvage_fraction(s, s_count, dy, fac[fid].lifetime_years)
            inv_by[fid][i] = unit * add * d1_first
            om_by[fid][i] = unit * add * fac[fid].om_fraction * d2
            salv_by[fid][i] = unit * add * keep * d1_end
        investment[i] = sum(inv_by[fid][i] for fid in FACILITIES)
        fixed_om[i] = sum(om_by[fid][i] for fid in FACILITIES)
        salvage[i] = sum(salv_by[fid][i] for fid in FACILITIES)
        retirement[i] = float(prices.cfpp_retirement[i]) * st.retirement_cfpp * d1_first

        coal[i] = d3 * float(prices.coal[i]) * conv.gamma_p2c * dt * float(
            np.sum(st.power["p_coal"])
        )
        deg_factor = d3 if cfg.discount_degradation else 1.0
        degradation[i] = deg_factor * conv.battery_degradation_cost * dt * float(
            np.sum(st.power["p_discharge"])
        )
        h2_purch[i] = d3 * float(prices.hydrogen_purchase[i]) * dt * float(
            np.sum(st.flow["q_h2_buy"])
        )
        h2_sale[i] = d3 * float(prices.hydrogen_sell[i]) * dt * float(
            np.sum(st.flow["q_h2_sell"])
        )
        nh3_purch[i] = d3 * float(prices.ammonia_purchase[i]) * dt * float(
            np.sum(st.flow["q_nh3_buy"])
        )
        nh3_sale[i] = d3 * float(prices.ammonia_sell[i]) * dt * float(
            np.sum(st.flow["q_nh3_sell"])
        )

    return CostBreakdown(
        investment=investment, fixed_om=fixed_om, retirement=retirement,
        coal=coal, degradation=degradation,
        hydrogen_purchase=h2_purch, ammonia_purchase=nh3_purch,
        hydrogen_sale=h2_sale, ammonia_sale=nh3_sale, salvage=salvage,
        investment_by_facility=inv_by, fixed_om_by_facility=om_by,
        salvage_by_facility=salv_by,
    )


def residual_report(
    blocks: list[StageBlock],
    xs: list[np.ndarray],
    linking: LinkingConstraints | None = None,
) -> dict[str, float]:
    """Max relative residual per constraint family, across all stages.

    Each row's residual is normalized by 1 + the row's absolute activity
    (sum of |a_ij x_j|), so the figure is scale-free for large and tiny rows
    alike.
    """
    worst: dict[str, float] = {}
    for block, x in zip(blocks, xs):
        residual = np.abs(block.a @ x - block.rhs)
        activity = np.abs(block.a) @ np.abs(x)
        rel = residual / (1.0 + activity)
        for name, count, _ in block.rowmap.families:
            if count == 0:
                continue
            rows = block.rowmap.rows(name)
            value = float(np.max(rel[rows]))
            worst[name] = max(worst.get(name, 0.0), value)
    if linking is not None and linking.n_rows:
        residual = np.abs(linking.residual(xs))
        activity = np.zeros(linking.n_rows)
        for b_i, x_i in zip(linking.matrices, xs):
            activity += np.abs(b_i) @ np.abs(x_i)
        worst["linking"] = float(np.max(residual / (1.0 + activity)))
    return worst


def plan_from_block_solutions(
    inputs: PlanningInputs,
    blocks: list[StageBlock],
    xs: list[np.ndarray],
    objective: float,
    diagnostics: SolveDiagnostics,
    linking: LinkingConstraints | None = None,
) -> PlanSolution:
    stages = [stage_result_from_vector(inputs, block, x)
              for block, x in zip(blocks, xs)]
    costs = evaluate_costs(inputs, stages)
    residuals = residual_report(blocks, xs, linking)
    return PlanSolution(
        objective=float(objective),
        stages=stages,
        costs=costs,
        diagnostics=diagnostics,
        residuals=residuals,
    )
