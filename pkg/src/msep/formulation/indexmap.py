"""Column and row layout of one stage block.

Both maps are pure layout: the same arithmetic the builder uses to place
coefficients, exposed so extraction, diagnostics and tests can locate any
symbol without string parsing. Every symbol owns one contiguous range and
the ranges cover [0, dim) exactly.

Column order: capacities C (one per facility), additions, the CFPP
retirement, then the per-step power, flow and state families, ammonia
setpoints, and finally one slack column per inequality row.

Row order is the constraint family order documented in `build_stage_block`;
inequality rows are interleaved exactly where their family sits, and their
slack columns follow global row order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from msep.domain import FACILITIES
from msep.solution import FLOW_NAMES, POWER_NAMES, STATE_NAMES

# row family table: (name, count as function of n, is_equality)
_EQ, _INEQ = True, False


def row_families(
    n_steps: int, include_recursion: bool, transient_on: bool
) -> list[tuple[str, int, bool]]:
    n = n_steps
    fams: list[tuple[str, int, bool]] = [
        ("conv_ae", n, _EQ),
        ("conv_fc", n, _EQ),
        ("inv_h2", n, _EQ),
        ("inv_nh3", n, _EQ),
        ("inv_batt", n, _EQ),
        ("per_h2", 1, _EQ),
        ("per_nh3", 1, _EQ),
        ("per_batt", 1, _EQ),
        ("band_ae_lo", n, _INEQ),
        ("band_ae_up", n, _INEQ),
        ("band_fc_lo", n, _INEQ),
        ("band_fc_up", n, _INEQ),
        ("band_feed_lo", n, _INEQ),
        ("band_feed_up", n, _INEQ),
        ("band_asto_lo", n, _INEQ),
        ("band_asto_up", n, _INEQ),
        ("band_soc_lo", n, _INEQ),
        ("band_soc_up", n, _INEQ),
        ("band_charge", n, _INEQ),
        ("band_discharge", n, _INEQ),
        ("band_h2s_lo", n, _INEQ),
        ("band_h2s_up", n, _INEQ),
        ("band_cfpp_lo", n, _INEQ),
        ("band_cfpp_up", n, _INEQ),
        ("as_power", n, _EQ),
        ("ramp_up", n - 1, _INEQ),
        ("ramp_down", n - 1, _INEQ),
        ("stoich", n, _EQ),
        ("a2p", n, _EQ),
        ("trade_h2_buy", n - 1, _EQ),
        ("trade_h2_sell", n - 1, _EQ),
        ("trade_nh3_buy", n - 1, _EQ),
        ("trade_nh3_sell", n - 1, _EQ),
        ("cfpp_split", n, _EQ),
        ("avail_wind", n, _EQ),
        ("avail_solar", n, _EQ),
        ("balance", n, _EQ),
        ("carbon", 1, _INEQ),
    ]
    if include_recursion:
        fams.append(("cap_recursion", len(FACILITIES), _EQ))
    if transient_on:
        fams.append(("transient", n, _EQ))
    return fams


@dataclass(frozen=True)
class RowIndexMap:
    """Row offsets per constraint family, in emission order."""

    families: tuple[tuple[str, int, bool], ...]
    start: dict[str, int]
    n_rows: int
    n_inequalities: int

    @classmethod
    def build(cls, n_steps: int, include_recursion: bool, transient_on: bool) -> "RowIndexMap":
        fams = row_families(n_steps, include_recursion, transient_on)
        start, offset, n_ineq = {}, 0, 0
        for name, count, is_eq in fams:
            start[name] = offset
            offset += count
            if not is_eq:
                n_ineq += count
        return cls(families=tuple(fams), start=dict(start),
                   n_rows=offset, n_inequalities=n_ineq)

    def rows(self, family: str) -> np.ndarray:
        count = self.count(family)
        return self.start[family] + np.arange(count)

    def count(self, family: str) -> int:
        for name, count, _ in self.families:
            if name == family:
                return count
        raise KeyError(f"unknown row family {family!r}")

    def is_equality(self, family: str) -> bool:
        for name, _, is_eq in self.families:
            if name == family:
                return is_eq
        raise KeyError(f"unknown row family {family!r}")

    def inequality_rows(self) -> np.ndarray:
        """Global indices of all inequality rows, ascending (= slack order)."""
        parts = [self.rows(name) for name, _, is_eq in self.families if not is_eq]
        return np.concatenate(parts) if parts else np.zeros(0, dtype=int)

    def describe(self, row: int) -> str:
        for name, count, _ in self.families:
            if self.start[name] <= row < self.start[name] + count:
                return f"{name}[{row - self.start[name]}]"
        raise IndexError(row)


@dataclass(frozen=True)
class VariableIndexMap:
    """Column offsets for every decision-variable family of one block."""

    n_steps: int
    setpoint_count: int
    slack_count: int
    start: dict[str, int]
    size: dict[str, int]
    dim: int

    @classmethod
    def build(cls, n_steps: int, setpoint_count: int, slack_count: int) -> "VariableIndexMap":
        start: dict[str, int] = {}
        size: dict[str, int] = {}
        offset = 0

        def claim(name: str, count: int) -> None:
            nonlocal offset
            start[name] = offset
            size[name] = count
            offset += count

        for fid in FACILITIES:
            claim(f"cap:{fid}", 1)
        for fid in FACILITIES:
            claim(f"add:{fid}", 1)
        claim("reti:CFPP", 1)
        for name in POWER_NAMES:
            claim(name, n_steps)
        for name in FLOW_NAMES:
            claim(name, n_steps)
        for name in STATE_NAMES:
            claim(name, n_steps + 1)
        claim("qss", setpoint_count)
        claim("slack", slack_count)
        return cls(n_steps=n_steps, setpoint_count=setpoint_count,
                   slack_count=slack_count, start=dict(start), size=dict(size),
                   dim=offset)

    def cap(self, fid: str) -> int:
        return self.start[f"cap:{fid}"]

    def add(self, fid: str) -> int:
        return self.start[f"add:{fid}"]

    @property
    def reti_cfpp(self) -> int:
        return self.start["reti:CFPP"]

    def power(self, name: str, t: int = 0) -> int:
        return self.start[name] + t

    def flow(self, name: str, t: int = 0) -> int:
        return self.start[name] + t

    def state(self, name: str, t: int = 0) -> int:
        return self.start[name] + t

    def series(self, name: str) -> np.ndarray:
        """All per-step columns of a power/flow family."""
        return self.start[name] + np.arange(self.n_steps)

    def state_series(self, name: str) -> np.ndarray:
        """All N+1 samples of a state family."""
        return self.start[name] + np.arange(self.n_steps + 1)

    def setpoint(self, k: int = 0) -> int:
        return self.start["qss"] + k

    def slack(self, ordinal: int = 0) -> int:
        return self.start["slack"] + ordinal

    @property
    def n_structural(self) -> int:
        return self.start["slack"]

    def describe(self, col: int) -> str:
        for name, offset in self.start.items():
            if offset <= col < offset + self.size[name]:
                return f"{name}[{col - offset}]"
        raise IndexError(col)


def census(n_steps: int, setpoint_count: int, include_recursion: bool,
           transient_on: bool) -> dict[str, int]:
    """Closed-form size summary of one block, for documentation and tests."""
    rowmap = RowIndexMap.build(n_steps, include_recursion, transient_on)
    n_struct = (
        2 * len(FACILITIES) + 1
        + (len(POWER_NAMES) + len(FLOW_NAMES)) * n_steps
        + len(STATE_NAMES) * (n_steps + 1)
        + (setpoint_count if transient_on else 0)
    )
    return {
        "rows": rowmap.n_rows,
        "equalities": rowmap.n_rows - rowmap.n_inequalities,
        "inequalities": rowmap.n_inequalities,
        "structural_columns": n_struct,
        "slack_columns": rowmap.n_inequalities,
        "columns": n_struct + rowmap.n_inequalities,
    }
