"""Economic indices via virtual internal trading between system parts.

The plant is split into four virtual businesses: generation (wind, solar,
CFPP), the battery, the hydrogen chain (electrolyzer, store, fuel cell) and
the ammonia chain (synthesis, store). Each buys its input energy from the
others at an internal price and must break even over the horizon; writing
NPV = 0 for every part gives a small linear system whose unknowns are the
generation price, the three storage discharge prices, and the internal
hydrogen price. Present values of energy flows use the same per-stage
operating discount as the cost model, so the solved prices reconstruct the
system-level cost of energy exactly.

Parts that never discharge have no price to solve for; their equations are
dropped and the report carries None, mirroring how such cells are usually
tabulated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from msep.discounting import discount_delta3
from msep.domain import PlanningInputs
from msep.solution import PlanSolution

# facility -> virtual business part
PART_OF_FACILITY = {
    "W": "G", "S": "G", "CFPP": "G",
    "B": "B",
    "AE": "H", "HS": "H", "FC": "H",
    "ASyn": "A", "ASto": "A",
}
# ledger key -> per-step series name and its container on StageResult
_ENERGY_FLOWS = {
    "W": "p_wind", "S": "p_solar", "CF": "p_coal", "curt": "p_curtail",
    "B.ch": "p_charge", "B.disc": "p_discharge",
    "AE": "p_electrolysis", "AS": "p_nh3_synth",
    "FC": "p_fuel_cell", "AF": "p_nh3_fired",
    "UHVDC": "p_uhvdc",
}


@dataclass(frozen=True)
class PresentValueLedger:
    """Discounted energy flows and part-level cost components of a plan."""

    energy: dict[str, float]        # PVE by flow key, MWh except H.A in Nm3
    invest: dict[str, float]        # discounted investment by part
    fixed_om: dict[str, float]      # discounted fixed O&M by part
    salvage: dict[str, float]       # discounted end-of-horizon value by part
    retirement: float
    coal: float
    degradation: float
    hydrogen_purchase: float
    hydrogen_sale: float
    ammonia_purchase: float
    ammonia_sale: float
    kappa_fc: float                 # MWh of fuel-cell output per Nm3 hydrogen

    @property
    def balance_residual(self) -> float:
        """Relative slack of PVE(G.D) + B.disc + FC + AF = UHVDC."""
        e = self.energy
        lhs = e["G.D"] + e["B.disc"] + e["FC"] + e["AF"]
        return abs(lhs - e["UHVDC"]) / (1.0 + abs(e["UHVDC"]))

    def part_capex(self, part: str) -> float:
        return self.invest[part] + self.fixed_om[part] - self.salvage[part]


@dataclass(frozen=True)
class LcosReport:
    """Solved internal prices (reporting units) and the system indices.

    Electric prices are currency per kWh, the hydrogen price is currency per
    Nm3. None marks a part with nothing to price.
    """

    lcoe_g: float
    lcos_b: float | None
    lcos_h: float | None
    lcos_a: float | None
    lcoh: float | None
    lcoe: float                     # NPC over discounted delivered energy
    r_curt: float | None
    r_reti: float | None
    r_capex: dict[str, float | None]
    residuals: dict[str, float | None]   # NPV imbalance per retained equation


class MetricsError(ValueError):
    """The plan cannot be priced (no generation at all)."""


def build_pve_ledger(inputs: PlanningInputs, plan: PlanSolution) -> PresentValueLedger:
    """Discount every energy flow and cost stream of a solved plan."""
    config = inputs.config
    dt = config.timestep_hours
    d3 = np.array([discount_delta3(s, config.years_per_stage, config.interest_rate)
                   for s in range(1, config.stage_count + 1)])

    energy: dict[str, float] = {k: 0.0 for k in _ENERGY_FLOWS}
    energy["H.A"] = 0.0
    for stage in plan.stages:
        w = float(d3[stage.stage - 1]) * dt
        for key, series in _ENERGY_FLOWS.items():
            energy[key] += w * float(np.sum(stage.power[series]))
        energy["H.A"] += w * float(np.sum(stage.flow["q_h2_nh3"]))
    energy["G"] = energy["W"] + energy["S"] + energy["CF"] - energy["curt"]
    energy["G.D"] = energy["G"] - energy["B.ch"] - energy["AE"] - energy["AS"]

    costs = plan.costs
    invest = {p: 0.0 for p in "GBHA"}
    fixed_om = {p: 0.0 for p in "GBHA"}
    salvage = {p: 0.0 for p in "GBHA"}
    for fid, part in PART_OF_FACILITY.items():
        invest[part] += float(np.sum(costs.investment_by_facility.get(fid, 0.0)))
        fixed_om[part] += float(np.sum(costs.fixed_om_by_facility.get(fid, 0.0)))
        salvage[part] += float(np.sum(costs.salvage_by_facility.get(fid, 0.0)))

    return PresentValueLedger(
        energy=energy,
        invest=invest,
        fixed_om=fixed_om,
        salvage=salvage,
        retirement=float(np.sum(costs.retirement)),
        coal=float(np.sum(costs.coal)),
        degradation=float(np.sum(costs.degradation)),
        hydrogen_purchase=float(np.sum(costs.hydrogen_purchase)),
        hydrogen_sale=float(np.sum(costs.hydrogen_sale)),
        ammonia_purchase=float(np.sum(costs.ammonia_purchase)),
        ammonia_sale=float(np.sum(costs.ammonia_sale)),
        kappa_fc=inputs.conversion.kappa_fc,
    )


def solve_lcos_system(
    ledger: PresentValueLedger,
    include_degradation: bool = True,
    ammonia_revenue: bool = True,
) -> dict[str, float | None]:
    """Solve the break-even price system over the active parts.

    Returns canonical-unit prices keyed E/B/H/A/LCOH (None for inactive
    parts) plus the residual of each retained equation under key
    "res.<row>". `include_degradation` charges battery degradation to the
    battery part so the price sum reconstructs total cost; turned off, the
    battery equation matches the bare published form. `ammonia_revenue`
    credits the ammonia part its own sales; turned off, it credits hydrogen
    sales there instead (the published reading).
    """
    e = ledger.energy
    tol = 1e-9 * (1.0 + e["UHVDC"])
    if e["G"] <= tol:
        raise MetricsError("no generation to price")

    b_active = e["B.disc"] > tol
    fc_active = e["FC"] > tol
    ha_active = e["H.A"] > tol
    a_active = e["AF"] > tol

    k_g = ledger.part_capex("G") + ledger.retirement + ledger.coal
    k_b = ledger.part_capex("B") + (ledger.degradation if include_degradation else 0.0)
    k_h = ledger.part_capex("H") + ledger.hydrogen_purchase - ledger.hydrogen_sale
    k_a = ledger.part_capex("A") + ledger.ammonia_purchase - (
        ledger.ammonia_sale if ammonia_revenue else ledger.hydrogen_sale)

    # unknown order: generation, battery, hydrogen, ammonia, hydrogen price
    rows = {"G": ({"E": e["G"]}, k_g)}
    if b_active:
        rows["B"] = ({"E": -e["B.ch"], "B": e["B.disc"]}, k_b)
    if fc_active or ha_active:
        rows["H"] = ({"E": -e["AE"], "H": e["FC"], "LCOH": e["H.A"]}, k_h)
    if a_active:
        rows["A"] = ({"E": -e["AS"], "A": e["AF"], "LCOH": -e["H.A"]}, k_a)
    if fc_active:
        rows["tie"] = ({"H": -ledger.kappa_fc, "LCOH": 1.0}, 0.0)

    keep = ["E"]
    if b_active:
        keep.append("B")
    if fc_active:
        keep.append("H")
    if a_active:
        keep.append("A")
    if fc_active or ha_active:
        keep.append("LCOH")
    index = {name: i for i, name in enumerate(keep)}

    a = np.zeros((len(rows), len(keep)))
    rhs = np.zeros(len(rows))
    for r, (coeffs, k) in enumerate(rows.values()):
        rhs[r] = k
        for name, value in coeffs.items():
            if name in index:
                a[r, index[name]] = value
    solution = np.linalg.solve(a, rhs)

    out: dict[str, float | None] = {"E": None, "B": None, "H": None, "A": None, "LCOH": None}
    for name, i in index.items():
        out[name] = float(solution[i])
    residual = a @ solution - rhs
    for r, name in enumerate(rows):
        out[f"res.{name}"] = float(residual[r])
    return out


def compute_indices(
    plan: PlanSolution, ledger: PresentValueLedger
) -> tuple[float, float | None, float | None]:
    """System LCOE (canonical units) and the curtailment/retirement ratios."""
    lcoe = plan.costs.npc / ledger.energy["UHVDC"]

    renewable = ledger.energy["W"] + ledger.energy["S"]
    r_curt = ledger.energy["curt"] / renewable if renewable > 0.0 else None

    retired = sum(stage.retirement_cfpp for stage in plan.stages)
    added = sum(stage.addition["CFPP"] for stage in plan.stages)
    first = plan.stages[0]
    initial = first.capacity["CFPP"] - first.addition["CFPP"] + first.retirement_cfpp
    endowment = initial + added
    r_reti = retired / endowment if endowment > 0.0 else None
    return lcoe, r_curt, r_reti


def _capex_ratios(ledger: PresentValueLedger, prices: dict[str, float | None],
                  include_degradation: bool) -> dict[str, float | None]:
    """Share of capital outlay (investment plus O&M, net of salvage) per part."""
    e = ledger.energy
    lcoe_g = prices["E"] or 0.0
    lcoh = prices["LCOH"] or 0.0
    outlay = {
        "G": ledger.part_capex("G") + ledger.retirement + ledger.coal,
        "B": ledger.part_capex("B") + lcoe_g * e["B.ch"]
             + (ledger.degradation if include_degradation else 0.0),
        "H": ledger.part_capex("H") + ledger.hydrogen_purchase + lcoe_g * e["AE"],
        "A": ledger.part_capex("A") + ledger.ammonia_purchase
             + lcoe_g * e["AS"] + lcoh * e["H.A"],
    }
    ratios: dict[str, float | None] = {}
    for part, total in outlay.items():
        capex = ledger.part_capex(part)
        ratios[part] = capex / total if abs(total) > 1e-12 * (1.0 + abs(capex)) else None
    return ratios


def compute_metrics(
    inputs: PlanningInputs,
    plan: PlanSolution,
    include_degradation: bool = True,
) -> tuple[PresentValueLedger, LcosReport]:
    """Full economic assessment of a solved plan, in reporting units."""
    ledger = build_pve_ledger(inputs, plan)
    prices = solve_lcos_system(
        ledger,
        include_degradation=include_degradation,
        ammonia_revenue=inputs.config.lcos_ammonia_revenue,
    )
    lcoe, r_curt, r_reti = compute_indices(plan, ledger)

    def per_kwh(value: float | None) -> float | None:
        return None if value is None else value / 1000.0

    report = LcosReport(
        lcoe_g=per_kwh(prices["E"]),
        lcos_b=per_kwh(prices["B"]),
        lcos_h=per_kwh(prices["H"]),
        lcos_a=per_kwh(prices["A"]),
        lcoh=prices["LCOH"],
        lcoe=lcoe / 1000.0,
        r_curt=r_curt,
        r_reti=r_reti,
        r_capex=_capex_ratios(ledger, prices, include_degradation),
        residuals={k.split(".", 1)[1]: v for k, v in prices.items()
                   if k.startswith("res.")},
    )
    return ledger, report


def metrics_payload(
    inputs: PlanningInputs,
    plan: PlanSolution,
    include_degradation: bool = True,
) -> dict:
    """JSON-ready metrics report: cost breakdown, prices, ratios, residuals."""
    ledger, report = compute_metrics(inputs, plan, include_degradation)
    ccy = inputs.config.currency
    return {
        "npc": plan.costs.npc,
        "cost_breakdown": plan.costs.totals(),
        "present_value_energy": dict(sorted(ledger.energy.items())),
        "prices": {
            f"lcoe [{ccy}/kWh]": report.lcoe,
            f"lcoe_g [{ccy}/kWh]": report.lcoe_g,
            f"lcos_b [{ccy}/kWh]": report.lcos_b,
            f"lcos_h [{ccy}/kWh]": report.lcos_h,
            f"lcos_a [{ccy}/kWh]": report.lcos_a,
            f"lcoh [{ccy}/Nm3]": report.lcoh,
        },
        "ratios": {
            "r_curt": report.r_curt,
            "r_reti": report.r_reti,
            "r_capex": report.r_capex,
        },
        "residuals": {
            "npv_parts": report.residuals,
            "energy_balance": ledger.balance_residual,
        },
    }
