"""Per-stage operational LP block.

One block holds everything a single planning stage decides on its own: the
capacity additions available that stage, a full representative-year dispatch,
and the stage's share of the discounted cost. Inter-stage capacity recursion
is NOT here (it lives in the linking constraints), except for stage 1 whose
recursion runs against the fixed initial capacities and therefore stays
block-local.

Constraint families are emitted in the order listed in `build_stage_block`'s
docstring; every inequality becomes an equality with a dedicated nonnegative
slack column so the block is a standard-form compact polytope. All variable
bounds are finite (derived from per-stage capacity caps), which guarantees
every block subproblem is bounded regardless of the pricing duals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from msep.discounting import (
    discount_delta1,
    discount_delta2,
    discount_delta3,
    salvage_fraction,
)
from msep.domain import FACILITIES, PlanningInputs, carbon_baseline_kg
from msep.formulation.indexmap import RowIndexMap, VariableIndexMap
from msep.lp.problem import LpProblem


@dataclass(frozen=True)
class StageBlock:
    """Standard-form LP of one stage: A x = h, lower <= x <= upper."""

    stage: int                 # 1-based
    a: sp.csr_matrix
    rhs: np.ndarray
    cost: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    varmap: VariableIndexMap
    rowmap: RowIndexMap

    @property
    def dim(self) -> int:
        return self.varmap.dim

    @property
    def n_rows(self) -> int:
        return self.rowmap.n_rows

    def to_lp(self) -> LpProblem:
        return LpProblem(a_eq=self.a, b_eq=self.rhs, cost=self.cost,
                         lower=self.lower, upper=self.upper)


def transient_weights(
    n_steps: int,
    timestep_hours: float,
    setpoint_hours: float,
    transient_hours: float,
    mode: str = "relative",
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Exponential decay weights tying each step to its bracketing setpoints.

    Returns (w, k, k_next) with one entry per step t: the hydrogen feed obeys
    q[t] = (1 + w[t]) * q_qss[k[t]] - w[t] * q_qss[k_next[t]] where
    w = exp(-tau / T). In "relative" mode tau restarts at each setpoint
    interval; in "absolute" mode tau runs from the horizon start, which makes
    the transient die out after the first interval or two (the literal
    formula reading). The year wraps, so the last interval brackets against
    the first.
    """
    if mode not in ("relative", "absolute"):
        raise ValueError(f"transient mode must be relative|absolute, got {mode!r}")
    steps_per_interval = setpoint_hours / timestep_hours
    if abs(steps_per_interval - round(steps_per_interval)) > 1e-9:
        raise ValueError("setpoint_hours must be an integer multiple of timestep_hours")
    steps_per_interval = int(round(steps_per_interval))
    k_count = n_steps // steps_per_interval
    if k_count * steps_per_interval != n_steps:
        raise ValueError("n_steps must be a whole number of setpoint intervals")
    t = np.arange(n_steps)
    k = t // steps_per_interval
    k_next = (k + 1) % k_count
    if mode == "relative":
        tau = (t - k * steps_per_interval) * timestep_hours
    else:
        tau = t * timestep_hours
    w = np.exp(-tau / transient_hours)
    return w, k, k_next


def build_as_transient_rows(
    stage: int,
    inputs: PlanningInputs,
    varmap: VariableIndexMap,
    row_start: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Triplets of the setpoint-coupling rows q[t] - (1+w) qss_k + w qss_k1 = 0.

    With a single interval the two setpoint references coincide and their
    coefficients merge to -1 on assembly (duplicate summation), leaving
    q[t] = qss[0]. RHS is zero for every row.
    """
    cfg, conv = inputs.config, inputs.conversion
    n = cfg.timestep_count
    w, k, k_next = transient_weights(
        n, cfg.timestep_hours, conv.as_setpoint_hours,
        conv.as_transient_hours, cfg.as_transient_mode,
    )
    t = np.arange(n)
    rows = np.concatenate([row_start + t] * 3)
    cols = np.concatenate([
        varmap.series("q_h2_nh3"),
        varmap.setpoint(0) + k,
        varmap.setpoint(0) + k_next,
    ])
    data = np.concatenate([np.ones(n), -(1.0 + w), w])
    return rows, cols, data


def setpoint_count(inputs: PlanningInputs) -> int:
    """Number of ammonia setpoint intervals in the representative year."""
    cfg, conv = inputs.config, inputs.conversion
    if cfg.as_transient_mode == "off":
        return 0
    steps = int(round(conv.as_setpoint_hours / cfg.timestep_hours))
    return cfg.timestep_count // steps


def build_stage_block(stage: int, inputs: PlanningInputs) -> StageBlock:
    """Assemble the stage-`stage` block (1-based stage index).

    Row families, in emission order: electrolyzer and fuel-cell conversion;
    hydrogen, ammonia, battery inventory recursions; the three periodicity
    rows; the operating-band inequalities (electrolyzer, fuel cell, synthesis
    feed, ammonia store, battery state, charge/discharge power, hydrogen
    store, coal-plant band); synthesis electric demand; feed ramp limits;
    ammonia stoichiometry; ammonia-to-power conversion; the four trading
    constancy chains; coal-plant fuel split; wind/solar availability; hourly
    power balance; the yearly carbon cap; the stage-1 capacity recursion
    (stage 1 only); and the setpoint transient coupling (when enabled).
    """
    cfg, conv, prices, series = (
        inputs.config, inputs.conversion, inputs.prices, inputs.series,
    )
    fac = inputs.facilities
    s, n, dt = stage, cfg.timestep_count, cfg.timestep_hours
    transient_on = cfg.as_transient_mode != "off"
    k_count = setpoint_count(inputs)

    rowmap = RowIndexMap.build(n, include_recursion=(s == 1), transient_on=transient_on)
    varmap = VariableIndexMap.build(n, k_count, rowmap.n_inequalities)

    t = np.arange(n)
    ones, zeros = np.ones(n), np.zeros(n)
    rr: list[np.ndarray] = []
    cc: list[np.ndarray] = []
    dd: list[np.ndarray] = []
    rhs = np.zeros(rowmap.n_rows)

    def put(rows, cols, data) -> None:
        rows = np.atleast_1d(np.asarray(rows))
        cols, data = np.asarray(cols), np.asarray(data)
        rows, cols, data = np.broadcast_arrays(rows, cols, data)
        rr.append(rows.astype(np.int64).ravel())
        cc.append(cols.astype(np.int64).ravel())
        dd.append(data.astype(float).ravel())

    # per-stage capacity caps (also the source of every finite bound below)
    cmax = {fid: float(fac[fid].capacity_max[s - 1]) for fid in FACILITIES}
    band = {fid: fac[fid].band for fid in FACILITIES}
    feed_coef = 1.0 / (conv.as_full_load_hours * conv.gamma_h2a)  # Nm3/h per t/yr
    feed_max = cmax["ASyn"] * feed_coef
    batt_power_max = cmax["B"] / conv.battery_power_hours

    # conversion equalities: P = kappa * q for electrolyzer and fuel cell
    r = rowmap.rows("conv_ae")
    put(r, varmap.series("p_electrolysis"), ones)
    put(r, varmap.series("q_h2_prod"), -conv.kappa_ae * ones)
    r = rowmap.rows("conv_fc")
    put(r, varmap.series("p_fuel_cell"), ones)
    put(r, varmap.series("q_h2_fc"), -conv.kappa_fc * ones)

    # inventory recursions, one row per step t: state[t+1] - state[t] = dt * net inflow
    v = varmap.state_series("v_h2_store")
    r = rowmap.rows("inv_h2")
    put(r, v[1:], ones)
    put(r, v[:-1], -ones)
    for name, sign in (("q_h2_prod", -1.0), ("q_h2_buy", -1.0), ("q_h2_fc", 1.0),
                       ("q_h2_sell", 1.0), ("q_h2_nh3", 1.0)):
        put(r, varmap.series(name), sign * dt * ones)

    m = varmap.state_series("m_nh3_store")
    r = rowmap.rows("inv_nh3")
    put(r, m[1:], ones)
    put(r, m[:-1], -ones)
    for name, sign in (("q_nh3_prod", -1.0), ("q_nh3_buy", -1.0),
                       ("q_nh3_gen", 1.0), ("q_nh3_sell", 1.0)):
        put(r, varmap.series(name), sign * dt * ones)

    e = varmap.state_series("e_battery")
    r = rowmap.rows("inv_batt")
    put(r, e[1:], ones)
    put(r, e[:-1], -(1.0 - conv.battery_self_discharge) * ones)
    put(r, varmap.series("p_charge"), -conv.battery_efficiency * dt * ones)
    put(r, varmap.series("p_discharge"), (dt / conv.battery_efficiency) * ones)

    # periodicity: the year closes on itself
    for fam, series_cols in (("per_h2", v), ("per_nh3", m), ("per_batt", e)):
        r = rowmap.rows(fam)
        put(r, series_cols[0], 1.0)
        put(r, series_cols[n], -1.0)

    # operating bands, written as expr <= 0 rows (slack added at the end)
    def band_rows(fam_lo, fam_up, cols, cap_col, lo_coef, up_coef):
        r_lo = rowmap.rows(fam_lo)
        put(r_lo, cap_col, lo_coef * ones)
        put(r_lo, cols, -ones)
        r_up = rowmap.rows(fam_up)
        put(r_up, cols, ones)
        put(r_up, cap_col, -up_coef * ones)

    band_rows("band_ae_lo", "band_ae_up", varmap.series("p_electrolysis"),
              varmap.cap("AE"), band["AE"][0], band["AE"][1])
    band_rows("band_fc_lo", "band_fc_up", varmap.series("p_fuel_cell"),
              varmap.cap("FC"), band["FC"][0], band["FC"][1])
    band_rows("band_feed_lo", "band_feed_up", varmap.series("q_h2_nh3"),
              varmap.cap("ASyn"), band["ASyn"][0] * feed_coef, band["ASyn"][1] * feed_coef)
    band_rows("band_asto_lo", "band_asto_up", m[:-1],
              varmap.cap("ASto"), band["ASto"][0], band["ASto"][1])
    band_rows("band_soc_lo", "band_soc_up", e[:-1],
              varmap.cap("B"), band["B"][0], band["B"][1])
    for fam, name in (("band_charge", "p_charge"), ("band_discharge", "p_discharge")):
        r = rowmap.rows(fam)
        put(r, varmap.series(name), ones)
        put(r, varmap.cap("B"), -(1.0 / conv.battery_power_hours) * ones)
    band_rows("band_h2s_lo", "band_h2s_up", v[:-1],
              varmap.cap("HS"), band["HS"][0], band["HS"][1])
    band_rows("band_cfpp_lo", "band_cfpp_up", varmap.series("p_cfpp"),
              varmap.cap("CFPP"), band["CFPP"][0], band["CFPP"][1])

    # synthesis electric demand: P_AS = kappa_as * q_feed
    r = rowmap.rows("as_power")
    put(r, varmap.series("p_nh3_synth"), ones)
    put(r, varmap.series("q_h2_nh3"), -conv.kappa_as * ones)

    # feed ramp limits between consecutive steps, fractions of rated feed
    feed = varmap.series("q_h2_nh3")
    r = rowmap.rows("ramp_up")
    put(r, feed[1:], np.ones(n - 1))
    put(r, feed[:-1], -np.ones(n - 1))
    put(r, varmap.cap("ASyn"), -conv.as_ramp_up * feed_coef * np.ones(n - 1))
    r = rowmap.rows("ramp_down")
    put(r, feed[:-1], np.ones(n - 1))
    put(r, feed[1:], -np.ones(n - 1))
    put(r, varmap.cap("ASyn"), conv.as_ramp_down * feed_coef * np.ones(n - 1))

    # ammonia stoichiometry and ammonia-fired generation
    r = rowmap.rows("stoich")
    put(r, varmap.series("q_nh3_prod"), ones)
    put(r, varmap.series("q_h2_nh3"), -conv.gamma_h2a * ones)
    r = rowmap.rows("a2p")
    put(r, varmap.series("p_nh3_fired"), ones)
    put(r, varmap.series("q_nh3_gen"), -conv.gamma_a2p * ones)

    # yearly trading contracts: buy/sell rates constant across the year
    for fam, name in (("trade_h2_buy", "q_h2_buy"), ("trade_h2_sell", "q_h2_sell"),
                      ("trade_nh3_buy", "q_nh3_buy"), ("trade_nh3_sell", "q_nh3_sell")):
        q = varmap.series(name)
        r = rowmap.rows(fam)
        put(r, q[1:], np.ones(n - 1))
        put(r, q[:-1], -np.ones(n - 1))

    # coal plant output split into coal-fired and ammonia-fired shares
    r = rowmap.rows("cfpp_split")
    put(r, varmap.series("p_cfpp"), ones)
    put(r, varmap.series("p_coal"), -ones)
    put(r, varmap.series("p_nh3_fired"), -ones)

    # renewable availability as equality against installed capacity
    r = rowmap.rows("avail_wind")
    put(r, varmap.series("p_wind"), ones)
    put(r, varmap.cap("W"), -series.wind_pu)
    r = rowmap.rows("avail_solar")
    put(r, varmap.series("p_solar"), ones)
    put(r, varmap.cap("S"), -series.solar_pu)

    # hourly power balance: sources minus sinks
    r = rowmap.rows("balance")
    for name in ("p_wind", "p_solar", "p_cfpp", "p_discharge", "p_fuel_cell"):
        put(r, varmap.series(name), ones)
    for name in ("p_uhvdc", "p_electrolysis", "p_nh3_synth", "p_charge", "p_curtail"):
        put(r, varmap.series(name), -ones)

    # yearly carbon cap on coal-fired energy
    ce0 = carbon_baseline_kg(cfg, series, conv.mu_cf)
    r_carbon = rowmap.start["carbon"]
    put(np.full(n, r_carbon), varmap.series("p_coal"), conv.mu_cf * dt * ones)
    rhs[r_carbon] = ce0 * (1.0 - float(cfg.carbon_reduction_targets[s - 1]))

    # stage-1 capacity recursion against the fixed initial fleet
    if s == 1:
        r = rowmap.rows("cap_recursion")
        for i, fid in enumerate(FACILITIES):
            put(r[i], varmap.cap(fid), 1.0)
            put(r[i], varmap.add(fid), -1.0)
            if fid == "CFPP":
                put(r[i], varmap.reti_cfpp, 1.0)
            rhs[r[i]] = fac[fid].initial_capacity

    if transient_on:
        tr, tc, td = build_as_transient_rows(s, inputs, varmap, rowmap.start["transient"])
        rr.append(tr)
        cc.append(tc)
        dd.append(td)

    # slack columns: one +1 entry per inequality row, in global row order
    ineq_rows = rowmap.inequality_rows()
    put(ineq_rows, varmap.slack(0) + np.arange(len(ineq_rows)), np.ones(len(ineq_rows)))

    a = sp.coo_matrix(
        (np.concatenate(dd), (np.concatenate(rr), np.concatenate(cc))),
        shape=(rowmap.n_rows, varmap.dim),
    ).tocsr()
    a.sum_duplicates()

    lower, upper = _variable_bounds(inputs, s, varmap, cmax, feed_max, batt_power_max)
    _slack_bounds(a, rhs, ineq_rows, varmap, lower, upper)
    cost = _cost_vector(inputs, s, varmap)
    return StageBlock(stage=s, a=a, rhs=rhs, cost=cost, lower=lower,
                      upper=upper, varmap=varmap, rowmap=rowmap)


def _variable_bounds(inputs, s, varmap, cmax, feed_max, batt_power_max):
    """Finite bounds for every structural variable (block compactness)."""
    cfg, conv, fac = inputs.config, inputs.conversion, inputs.facilities
    n = cfg.timestep_count
    lower = np.zeros(varmap.dim)
    upper = np.zeros(varmap.dim)

    for fid in FACILITIES:
        upper[varmap.cap(fid)] = cmax[fid]
        upper[varmap.add(fid)] = cmax[fid]
    upper[varmap.reti_cfpp] = fac["CFPP"].initial_capacity + 2.0 * max(
        float(np.max(fac["CFPP"].capacity_max)), 0.0
    )

    gen_cap = (cmax["W"] + cmax["S"] + cmax["CFPP"] + batt_power_max + cmax["FC"])
    power_ub = {
        "p_wind": cmax["W"],
        "p_solar": cmax["S"],
        "p_cfpp": cmax["CFPP"],
        "p_coal": cmax["CFPP"],
        "p_nh3_fired": cmax["CFPP"],
        "p_electrolysis": cmax["AE"],
        "p_nh3_synth": conv.kappa_as * feed_max,
        "p_fuel_cell": cmax["FC"],
        "p_discharge": batt_power_max,
        "p_charge": batt_power_max,
        "p_curtail": gen_cap,
    }
    for name, ub in power_ub.items():
        upper[varmap.series(name)] = ub

    # delivery obligation is a fixed profile: pin by bounds
    load = inputs.series.uhvdc_mw
    lower[varmap.series("p_uhvdc")] = load
    upper[varmap.series("p_uhvdc")] = load

    h2_conv = cmax["AE"] / conv.kappa_ae + cmax["FC"] / conv.kappa_fc + feed_max
    nh3_conv = feed_max * conv.gamma_h2a + cmax["CFPP"] / conv.gamma_a2p
    flow_ub = {
        "q_h2_prod": cmax["AE"] / conv.kappa_ae,
        "q_h2_buy": 2.0 * h2_conv + 1.0,
        "q_h2_fc": cmax["FC"] / conv.kappa_fc,
        "q_h2_sell": 2.0 * h2_conv + 1.0,
        "q_h2_nh3": feed_max,
        "q_nh3_prod": feed_max * conv.gamma_h2a,
        "q_nh3_buy": 2.0 * nh3_conv + 1.0,
        "q_nh3_gen": cmax["CFPP"] / conv.gamma_a2p,
        "q_nh3_sell": 2.0 * nh3_conv + 1.0,
    }
    for name, ub in flow_ub.items():
        upper[varmap.series(name)] = ub

    for name, fid in (("e_battery", "B"), ("v_h2_store", "HS"), ("m_nh3_store", "ASto")):
        upper[varmap.state_series(name)] = cmax[fid]

    if varmap.setpoint_count:
        qss = varmap.setpoint(0) + np.arange(varmap.setpoint_count)
        lower[qss] = -feed_max
        upper[qss] = 2.0 * feed_max
    return lower, upper


def _slack_bounds(a, rhs, ineq_rows, varmap, lower, upper) -> None:
    """Finite slack caps from row-wise worst cases, preserving compactness."""
    if len(ineq_rows) == 0:
        return
    worst = np.maximum(np.abs(lower), np.abs(upper))
    worst[varmap.slack(0):] = 0.0
    row_reach = np.abs(a) @ worst
    slack_cols = varmap.slack(0) + np.arange(len(ineq_rows))
    upper[slack_cols] = row_reach[ineq_rows] + np.abs(rhs[ineq_rows]) + 1.0


def _cost_vector(inputs, s, varmap) -> np.ndarray:
    """Stage-s slice of the discounted objective."""
    cfg, conv, fac, prices = (
        inputs.config, inputs.conversion, inputs.facilities, inputs.prices,
    )
    n, dt = cfg.timestep_count, cfg.timestep_hours
    s_count, dy, rate = cfg.stage_count, cfg.years_per_stage, cfg.interest_rate
    first_year = (s - 1) * dy + 1

    d1_first = discount_delta1(first_year, rate)
    d1_end = discount_delta1(s_count * dy, rate)
    d2 = discount_delta2(s, s_count, dy, rate)
    d3 = discount_delta3(s, dy, rate)

    cost = np.zeros(varmap.dim)
    for fid in FACILITIES:
        invest = float(fac[fid].invest_cost[s - 1])
        keep = salvage_fraction(s, s_count, dy, fac[fid].lifetime_years)
        cost[varmap.add(fid)] = invest * (
            d1_first + fac[fid].om_fraction * d2 - d1_end * keep
        )
    cost[varmap.reti_cfpp] = float(prices.cfpp_retirement[s - 1]) * d1_first

    cost[varmap.series("p_coal")] = d3 * float(prices.coal[s - 1]) * conv.gamma_p2c * dt
    deg_factor = d3 if cfg.discount_degradation else 1.0
    cost[varmap.series("p_discharge")] = deg_factor * conv.battery_degradation_cost * dt

    cost[varmap.series("q_h2_buy")] = d3 * float(prices.hydrogen_purchase[s - 1]) * dt
    cost[varmap.series("q_h2_sell")] = -d3 * float(prices.hydrogen_sell[s - 1]) * dt
    cost[varmap.series("q_nh3_buy")] = d3 * float(prices.ammonia_purchase[s - 1]) * dt
    cost[varmap.series("q_nh3_sell")] = -d3 * float(prices.ammonia_sell[s - 1]) * dt
    return cost
