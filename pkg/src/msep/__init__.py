"""Multi-stage expansion planning for a thermal-supported renewable power system.

The package models a power system that delivers a fixed hourly HVDC load
profile from wind, solar and coal-fired generation supported by battery,
hydrogen and ammonia storage chains. It sizes capacities over several
planning stages and dispatches a representative year per stage, minimizing
net present cost under per-stage carbon caps.

The planning problem is a block-angular LP: one operational block per stage
plus capacity-recursion rows linking consecutive stages. It can be solved
monolithically or by Dantzig-Wolfe decomposition with column generation.
"""

__version__ = "0.1.0"

from msep.discounting import (
    discount_delta1,
    discount_delta2,
    discount_delta3,
    salvage_fraction,
)
from msep.domain import (
    FACILITIES,
    ConversionParams,
    FacilityParams,
    PlanningConfig,
    PlanningInputs,
    PriceSchedule,
    TechnologyCatalog,
    TimeSeriesBundle,
    ValidationReport,
    load_config,
    load_series,
    validate_inputs,
)
from msep.solution import CostBreakdown, PlanSolution, SolveDiagnostics, StageResult

__all__ = [
    "FACILITIES",
    "ConversionParams",
    "CostBreakdown",
    "FacilityParams",
    "PlanSolution",
    "PlanningConfig",
    "PlanningInputs",
    "PriceSchedule",
    "SolveDiagnostics",
    "StageResult",
    "TechnologyCatalog",
    "TimeSeriesBundle",
    "ValidationReport",
    "discount_delta1",
    "discount_delta2",
    "discount_delta3",
    "load_config",
    "load_series",
    "salvage_fraction",
    "validate_inputs",
    "__version__",
]
