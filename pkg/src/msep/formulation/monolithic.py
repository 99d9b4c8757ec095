"""Monolithic assembly: linking rows stacked above the block diagonal.

The direct-solve oracle. Column order is block-major (all of stage 1, then
stage 2, ...), row order is linking rows first, then each block's rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from msep.formulation.linking import LinkingConstraints
from msep.formulation.stage_block import StageBlock
from msep.lp.problem import LpProblem


@dataclass(frozen=True)
class MonolithicLayout:
    """Where each stage's columns and rows land in the assembled LP."""

    n_linking: int
    col_offsets: tuple[int, ...]   # one per stage, plus final total
    row_offsets: tuple[int, ...]   # block rows only (linking excluded), plus total

    def stage_columns(self, stage: int) -> slice:
        return slice(self.col_offsets[stage - 1], self.col_offsets[stage])

    def stage_rows(self, stage: int) -> slice:
        """Rows of stage `stage` inside the assembled matrix."""
        return slice(self.n_linking + self.row_offsets[stage - 1],
                     self.n_linking + self.row_offsets[stage])

    def split(self, x: np.ndarray) -> list[np.ndarray]:
        return [x[self.stage_columns(s)] for s in range(1, len(self.col_offsets))]


def assemble_monolithic(
    blocks: list[StageBlock], linking: LinkingConstraints
) -> tuple[LpProblem, MonolithicLayout]:
    if any(linking.matrices[i].shape[1] != blocks[i].dim for i in range(len(blocks))):
        raise ValueError("linking matrices do not match block dimensions")

    diag = sp.block_diag([b.a for b in blocks], format="csr")
    if linking.n_rows:
        top = sp.hstack(list(linking.matrices), format="csr")
        a = sp.vstack([top, diag], format="csr")
        rhs = np.concatenate([linking.rhs] + [b.rhs for b in blocks])
    else:
        a = diag
        rhs = np.concatenate([b.rhs for b in blocks])

    problem = LpProblem(
        a_eq=a,
        b_eq=rhs,
        cost=np.concatenate([b.cost for b in blocks]),
        lower=np.concatenate([b.lower for b in blocks]),
        upper=np.concatenate([b.upper for b in blocks]),
    )
    col_offsets = np.concatenate([[0], np.cumsum([b.dim for b in blocks])])
    row_offsets = np.concatenate([[0], np.cumsum([b.n_rows for b in blocks])])
    layout = MonolithicLayout(
        n_linking=linking.n_rows,
        col_offsets=tuple(int(v) for v in col_offsets),
        row_offsets=tuple(int(v) for v in row_offsets),
    )
    return problem, layout
