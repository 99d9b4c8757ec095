"""Inter-stage capacity recursion as block-coupling rows.

Row (s, j) for s >= 2 reads C_s^j - C_{s-1}^j - dC_s^j = 0 (the coal plant
additionally carries +dC_reti). Written as sum_i B_i x_i = h_0 with h_0 = 0;
B_s holds the stage-s terms and B_{s-1} the -C_{s-1} term, so each B_i is
nonzero only for adjacent stages.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from msep.domain import FACILITIES, PlanningInputs
from msep.formulation.stage_block import StageBlock


@dataclass(frozen=True)
class LinkingConstraints:
    """Coupling matrices B_i (one per stage, shared row space) and RHS h_0."""

    matrices: tuple[sp.csr_matrix, ...]
    rhs: np.ndarray

    @property
    def n_rows(self) -> int:
        return len(self.rhs)

    def residual(self, xs: list[np.ndarray]) -> np.ndarray:
        if self.n_rows == 0:
            return np.zeros(0)
        total = np.zeros(self.n_rows)
        for b_i, x_i in zip(self.matrices, xs):
            total += b_i @ x_i
        return total - self.rhs


def build_linking_constraints(
    inputs: PlanningInputs, blocks: list[StageBlock]
) -> LinkingConstraints:
    s_count = inputs.config.stage_count
    n_fac = len(FACILITIES)
    n_rows = (s_count - 1) * n_fac
    if n_rows == 0:
        empty = tuple(sp.csr_matrix((0, b.dim)) for b in blocks)
        return LinkingConstraints(matrices=empty, rhs=np.zeros(0))

    triplets: list[tuple[list, list, list]] = [([], [], []) for _ in range(s_count)]

    def put(stage: int, row: int, col: int, val: float) -> None:
        rows, cols, data = triplets[stage - 1]
        rows.append(row)
        cols.append(col)
        data.append(val)

    for s in range(2, s_count + 1):
        varmap_s = blocks[s - 1].varmap
        varmap_prev = blocks[s - 2].varmap
        for i, fid in enumerate(FACILITIES):
            row = (s - 2) * n_fac + i
            put(s, row, varmap_s.cap(fid), 1.0)
            put(s, row, varmap_s.add(fid), -1.0)
            if fid == "CFPP":
                put(s, row, varmap_s.reti_cfpp, 1.0)
            put(s - 1, row, varmap_prev.cap(fid), -1.0)

    matrices = tuple(
        sp.coo_matrix((data, (rows, cols)), shape=(n_rows, blocks[i].dim)).tocsr()
        for i, (rows, cols, data) in enumerate(triplets)
    )
    return LinkingConstraints(matrices=matrices, rhs=np.zeros(n_rows))
