"""LP formulation of the expansion-planning model.

Builds per-stage operational blocks, the inter-stage capacity linking rows,
and the assembled monolithic LP; recovers planning terms from solved
vectors.
"""

from __future__ import annotations

from msep.formulation.extract import (
    evaluate_costs,
    plan_from_block_solutions,
    residual_report,
    stage_result_from_vector,
)
from msep.formulation.indexmap import RowIndexMap, VariableIndexMap, census, row_families
from msep.formulation.linking import LinkingConstraints, build_linking_constraints
from msep.formulation.monolithic import MonolithicLayout, assemble_monolithic
from msep.formulation.stage_block import (
    StageBlock,
    build_as_transient_rows,
    build_stage_block,
    setpoint_count,
    transient_weights,
)

__all__ = [
    "LinkingConstraints",
    "MonolithicLayout",
    "RowIndexMap",
    "StageBlock",
    "VariableIndexMap",
    "assemble_monolithic",
    "build_as_transient_rows",
    "build_linking_constraints",
    "build_stage_block",
    "census",
    "evaluate_costs",
    "plan_from_block_solutions",
    "residual_report",
    "row_families",
    "setpoint_count",
    "stage_result_from_vector",
    "transient_weights",
]
