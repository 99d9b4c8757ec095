"""Extreme-point pools: per-stage vertex collections backing the master.

Each stored point is a vertex of its block's polytope. The pool caches the
two products the master needs (block cost and linking image), so master
assembly never touches the block matrices. Duplicate vertices are rejected
by a rounded-coefficient key at 1e-9 granularity; the pool is append-only
within a run.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from msep.formulation.linking import LinkingConstraints
from msep.formulation.stage_block import StageBlock


@dataclass(frozen=True)
class Column:
    """One extreme point of one block, with cached master coefficients."""

    stage: int                 # 1-based
    x: np.ndarray              # vertex in block coordinates
    cost: float                # c_i' v
    link: np.ndarray           # B_i v, length = number of linking rows


class ColumnInfeasibleError(ValueError):
    """A candidate column violates its own block constraints."""


def _key(x: np.ndarray) -> bytes:
    return np.round(x, 9).tobytes()


@dataclass
class ExtremePointPool:
    """Append-only vertex pools, one per stage (index 0 = stage 1)."""

    blocks: list[StageBlock]
    linking: LinkingConstraints
    columns: list[list[Column]] = field(default_factory=list)
    _seen: list[set[bytes]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.columns:
            self.columns = [[] for _ in self.blocks]
        if not self._seen:
            self._seen = [set() for _ in self.blocks]

    def size(self, stage: int) -> int:
        return len(self.columns[stage - 1])

    @property
    def total_columns(self) -> int:
        return sum(len(cols) for cols in self.columns)

    def make_column(self, stage: int, x: np.ndarray, feasibility_tol: float = 1e-7) -> Column:
        """Wrap a vertex, verifying block feasibility before it can enter."""
        block = self.blocks[stage - 1]
        x = np.asarray(x, dtype=float)
        scale = 1.0 + float(np.max(np.abs(block.rhs), initial=0.0))
        residual = float(np.max(np.abs(block.a @ x - block.rhs), initial=0.0))
        bound_slip = max(
            float(np.max(block.lower - x, initial=0.0)),
            float(np.max(x - block.upper, initial=0.0)),
        )
        bound_scale = 1.0 + float(np.max(np.abs(x), initial=0.0))
        if residual > feasibility_tol * scale or bound_slip > feasibility_tol * bound_scale:
            raise ColumnInfeasibleError(
                f"stage {stage} column violates its block: "
                f"row residual {residual:.3e}, bound slip {bound_slip:.3e}"
            )
        return Column(
            stage=stage,
            x=x,
            cost=float(block.cost @ x),
            link=np.asarray(self.linking.matrices[stage - 1] @ x, dtype=float),
        )

    def add(self, column: Column) -> bool:
        """Insert unless an identical vertex is already pooled."""
        key = _key(column.x)
        seen = self._seen[column.stage - 1]
        if key in seen:
            return False
        seen.add(key)
        self.columns[column.stage - 1].append(column)
        return True
