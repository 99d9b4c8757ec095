"""Debug dump of an LP in fixed MPS-style sections.

Lets any block or the assembled monolithic model be handed to a third-party
solver for cross-validation. Sections: NAME, ROWS, COLUMNS, RHS, BOUNDS,
ENDATA. All constraint rows are equalities; the objective row is N-typed.
"""

from __future__ import annotations

import io

import numpy as np

from msep.lp.problem import LpProblem


def write_mps(
    problem: LpProblem,
    target,
    name: str = "MSEP",
    row_names: list[str] | None = None,
    col_names: list[str] | None = None,
) -> None:
    """Write `problem` to `target` (a path or a text file object)."""
    if hasattr(target, "write"):
        _write(problem, target, name, row_names, col_names)
        return
    with open(target, "w", encoding="ascii") as handle:
        _write(problem, handle, name, row_names, col_names)


def mps_string(problem: LpProblem, name: str = "MSEP") -> str:
    buffer = io.StringIO()
    _write(problem, buffer, name, None, None)
    return buffer.getvalue()


def _write(problem, out, name, row_names, col_names) -> None:
    m, n = problem.a_eq.shape
    rows = row_names or [f"R{i}" for i in range(m)]
    cols = col_names or [f"X{j}" for j in range(n)]
    if len(rows) != m or len(cols) != n:
        raise ValueError("row/column name lists must match problem dimensions")

    out.write(f"NAME          {name}\n")
    out.write("ROWS\n N  COST\n")
    for r in rows:
        out.write(f" E  {r}\n")

    a = problem.a_eq.tocsc()
    out.write("COLUMNS\n")
    for j in range(n):
        if problem.cost[j] != 0.0:
            out.write(f"    {cols[j]}  COST  {_num(problem.cost[j])}\n")
        for k in range(a.indptr[j], a.indptr[j + 1]):
            out.write(f"    {cols[j]}  {rows[a.indices[k]]}  {_num(a.data[k])}\n")

    out.write("RHS\n")
    for i in range(m):
        if problem.b_eq[i] != 0.0:
            out.write(f"    RHS  {rows[i]}  {_num(problem.b_eq[i])}\n")

    out.write("BOUNDS\n")
    for j in range(n):
        lo, up = problem.lower[j], problem.upper[j]
        if lo == up:
            out.write(f" FX BND  {cols[j]}  {_num(lo)}\n")
            continue
        if np.isneginf(lo) and np.isposinf(up):
            out.write(f" FR BND  {cols[j]}\n")
            continue
        if np.isneginf(lo):
            out.write(f" MI BND  {cols[j]}\n")
        elif lo != 0.0:
            out.write(f" LO BND  {cols[j]}  {_num(lo)}\n")
        if np.isposinf(up):
            if lo == 0.0:
                out.write(f" PL BND  {cols[j]}\n")
        else:
            out.write(f" UP BND  {cols[j]}  {_num(up)}\n")
    out.write("ENDATA\n")


def _num(value: float) -> str:
    return format(float(value), ".17g")
