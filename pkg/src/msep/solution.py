"""Solution records: capacities, dispatch trajectories, cost breakdown."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# dispatch series names, fixed order (columns of the per-stage dispatch CSV)
POWER_NAMES: tuple[str, ...] = (
    "p_wind", "p_solar", "p_cfpp", "p_coal", "p_nh3_fired", "p_uhvdc",
    "p_electrolysis", "p_nh3_synth", "p_fuel_cell", "p_discharge", "p_charge",
    "p_curtail",
)
FLOW_NAMES: tuple[str, ...] = (
    "q_h2_prod", "q_h2_buy", "q_h2_fc", "q_h2_sell", "q_h2_nh3",
    "q_nh3_prod", "q_nh3_buy", "q_nh3_gen", "q_nh3_sell",
)
STATE_NAMES: tuple[str, ...] = ("e_battery", "v_h2_store", "m_nh3_store")


@dataclass
class StageResult:
    """One stage: end-of-stage capacities and the representative-year dispatch."""

    stage: int
    capacity: dict[str, float]
    addition: dict[str, float]
    retirement_cfpp: float
    power: dict[str, np.ndarray]   # MW, length N each, keys POWER_NAMES
    flow: dict[str, np.ndarray]    # Nm3/h or t/h, length N each, keys FLOW_NAMES
    state: dict[str, np.ndarray]   # MWh / Nm3 / t, length N each, keys STATE_NAMES
    setpoints: np.ndarray = field(default_factory=lambda: np.zeros(0))


@dataclass
class CostBreakdown:
    """Per-stage present-value cost terms; shapes (S,) unless noted."""

    investment: np.ndarray
    fixed_om: np.ndarray
    retirement: np.ndarray
    coal: np.ndarray
    degradation: np.ndarray
    hydrogen_purchase: np.ndarray
    ammonia_purchase: np.ndarray
    hydrogen_sale: np.ndarray      # revenue, enters NPC negatively
    ammonia_sale: np.ndarray       # revenue, enters NPC negatively
    salvage: np.ndarray            # recovered value, enters NPC negatively
    # per-facility splits of the capacity terms, for cost attribution
    investment_by_facility: dict[str, np.ndarray]
    fixed_om_by_facility: dict[str, np.ndarray]
    salvage_by_facility: dict[str, np.ndarray]

    @property
    def npc(self) -> float:
        return float(
            np.sum(self.investment) + np.sum(self.fixed_om) + np.sum(self.retirement)
            + np.sum(self.coal) + np.sum(self.degradation)
            + np.sum(self.hydrogen_purchase) + np.sum(self.ammonia_purchase)
            - np.sum(self.hydrogen_sale) - np.sum(self.ammonia_sale)
            - np.sum(self.salvage)
        )

    def totals(self) -> dict[str, float]:
        return {
            "investment": float(np.sum(self.investment)),
            "fixed_om": float(np.sum(self.fixed_om)),
            "retirement": float(np.sum(self.retirement)),
            "coal": float(np.sum(self.coal)),
            "degradation": float(np.sum(self.degradation)),
            "hydrogen_purchase": float(np.sum(self.hydrogen_purchase)),
            "ammonia_purchase": float(np.sum(self.ammonia_purchase)),
            "hydrogen_sale": float(np.sum(self.hydrogen_sale)),
            "ammonia_sale": float(np.sum(self.ammonia_sale)),
            "salvage": float(np.sum(self.salvage)),
            "npc": self.npc,
        }


@dataclass
class SolveDiagnostics:
    """How the plan was obtained. Wall time stays out of the plan.json payload."""

    mode: str                # direct | dwdcg
    backend: str             # highs | reference
    status: str
    iterations: int = 0
    final_gap: float | None = None
    wall_seconds: float = 0.0


@dataclass
class PlanSolution:
    """Full planning outcome: one StageResult per stage plus economics."""

    objective: float
    stages: list[StageResult]
    costs: CostBreakdown
    diagnostics: SolveDiagnostics
    residuals: dict[str, float] = field(default_factory=dict)

    def to_payload(self) -> dict:
        """Deterministic JSON-ready dict (no wall-clock fields)."""
        return {
            "objective": self.objective,
            "status": self.diagnostics.status,
            "mode": self.diagnostics.mode,
            "backend": self.diagnostics.backend,
            "iterations": self.diagnostics.iterations,
            "final_gap": self.diagnostics.final_gap,
            "costs": {
                "per_stage": {
                    "investment": self.costs.investment.tolist(),
                    "fixed_om": self.costs.fixed_om.tolist(),
                    "retirement": self.costs.retirement.tolist(),
                    "coal": self.costs.coal.tolist(),
                    "degradation": self.costs.degradation.tolist(),
                    "hydrogen_purchase": self.costs.hydrogen_purchase.tolist(),
                    "ammonia_purchase": self.costs.ammonia_purchase.tolist(),
                    "hydrogen_sale": self.costs.hydrogen_sale.tolist(),
                    "ammonia_sale": self.costs.ammonia_sale.tolist(),
                    "salvage": self.costs.salvage.tolist(),
                },
                "totals": self.costs.totals(),
            },
            "residuals": dict(sorted(self.residuals.items())),
            "stages": [
                {
                    "stage": st.stage,
                    "capacity": dict(sorted(st.capacity.items())),
                    "addition": dict(sorted(st.addition.items())),
                    "retirement_cfpp": st.retirement_cfpp,
                    "power": {k: st.power[k].tolist() for k in POWER_NAMES},
                    "flow": {k: st.flow[k].tolist() for k in FLOW_NAMES},
                    "state": {k: st.state[k].tolist() for k in STATE_NAMES},
                    "setpoints": st.setpoints.tolist(),
                }
                for st in self.stages
            ],
        }
