"""Independent reference computations the tests check the package against.

Everything here is deliberately computed by a different method than the
package uses: discount factors through closed-form geometric sums in
50-digit arithmetic, LP optima through exhaustive vertex enumeration, and
net present cost through direct price-weighted flow accounting. Agreement
between two unrelated routes is the evidence the tests rely on.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from mpmath import mp, mpf

mp.dps = 50


# ---------------------------------------------------------------------------
# discounting

def mp_delta1(year: int, rate: float) -> mpf:
    return (1 + mpf(repr(rate))) ** (-year)


def mp_year_sum(first: int, last: int, rate: float) -> mpf:
    """sum_{y=first..last} (1+rate)^-y via the geometric closed form."""
    if last < first:
        return mpf(0)
    r = mpf(repr(rate))
    if r == 0:
        return mpf(last - first + 1)
    v = 1 / (1 + r)
    return (v ** first - v ** (last + 1)) / (1 - v)


def mp_delta2(stage: int, stage_count: int, years_per_stage: int, rate: float) -> mpf:
    first = (stage - 1) * years_per_stage + 1
    return mp_year_sum(first, stage_count * years_per_stage, rate)


def mp_delta3(stage: int, years_per_stage: int, rate: float) -> mpf:
    first = (stage - 1) * years_per_stage + 1
    return mp_year_sum(first, stage * years_per_stage, rate)


def mp_salvage(stage: int, stage_count: int, years_per_stage: int, lifetime: int) -> mpf:
    served = (stage_count - stage + 1) * years_per_stage - 1
    if served >= lifetime - 1:
        return mpf(0)
    return 1 - mpf(served) / (lifetime - 1)


def rel_err(value: float, reference: mpf) -> float:
    return float(abs(mpf(repr(value)) - reference) / (1 + abs(reference)))


# ---------------------------------------------------------------------------
# tiny-LP ground truth

def enumerate_box_lp(
    cost: np.ndarray,
    a: np.ndarray,
    b: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    tol: float = 1e-9,
) -> tuple[str, float, np.ndarray | None]:
    """Exact optimum of min c'x over {A x = b, l <= x <= u}, all bounds finite.

    Enumerates every basic solution: n-m variables pinned at one of their
    bounds, the rest solved from the equalities. A bounded feasible LP
    attains its optimum at such a point, so the enumeration minimum is the
    true optimum. Exponential in n, intended for n <= 10.
    """
    cost = np.asarray(cost, dtype=float)
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.asarray(b, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    m, n = a.shape
    if m > n:
        raise ValueError("oracle expects m <= n")
    if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
        raise ValueError("oracle needs finite bounds on every variable")

    best_obj, best_x = math.inf, None
    for fixed in itertools.combinations(range(n), n - m):
        fixed = list(fixed)
        basic = [j for j in range(n) if j not in fixed]
        a_b = a[:, basic]
        for corner in itertools.product(*[(lower[j], upper[j]) for j in fixed]):
            x = np.empty(n)
            x[fixed] = corner
            if m:
                rhs = b - a[:, fixed] @ np.asarray(corner) if fixed else b.copy()
                try:
                    xb = np.linalg.solve(a_b, rhs)
                except np.linalg.LinAlgError:
                    break  # singular for every corner of this split
                if not np.all(np.isfinite(xb)) or (
                    float(np.max(np.abs(a_b @ xb - rhs)))
                    > tol * (1.0 + float(np.max(np.abs(rhs))))
                ):
                    break
                x[basic] = xb
            if np.any(x < lower - tol) or np.any(x > upper + tol):
                continue
            x = np.clip(x, lower, upper)
            obj = float(cost @ x)
            if obj < best_obj:
                best_obj, best_x = obj, x
    if best_x is None:
        return "infeasible", math.inf, None
    return "optimal", best_obj, best_x


def random_box_lp(rng: np.random.Generator, n_max: int = 8):
    """A feasible random equality LP with finite bounds.

    Feasibility is by construction: the RHS is A x0 for an in-box point x0.
    Some coordinates of x0 snap to their bounds so degenerate vertices show
    up, and costs are quantized so ties happen.
    """
    n = int(rng.integers(2, n_max + 1))
    m = int(rng.integers(1, n + 1))
    a = rng.integers(-3, 4, size=(m, n)).astype(float)
    for i in range(m):  # no empty rows
        if not np.any(a[i]):
            a[i, int(rng.integers(0, n))] = 1.0
    lower = np.round(rng.uniform(-5.0, 0.0, size=n), 3)
    upper = lower + np.round(rng.uniform(0.5, 6.0, size=n), 3)
    u = rng.uniform(0.0, 1.0, size=n)
    snap = rng.uniform(size=n)
    u[snap < 0.15] = 0.0
    u[snap > 0.85] = 1.0
    x0 = lower + u * (upper - lower)
    b = a @ x0
    cost = np.round(rng.uniform(-5.0, 5.0, size=n) * 4.0) / 4.0
    return cost, a, b, lower, upper


# ---------------------------------------------------------------------------
# price-system back-substitution

def reconstruct_npc(ledger, prices: dict, include_degradation: bool = True) -> float:
    """Net present cost re-derived from the solved internal prices.

    Active parts contribute their price-weighted delivered flows; a part the
    price system dropped has no break-even equation, so its net book cost
    (plus the power it bought from generation) is added directly. For a plan
    whose parts all broke even this telescopes to the plain NPC, giving a
    second route to the same number.
    """
    e = ledger.energy
    pe = prices["E"]
    total = pe * e["G.D"]

    if prices["B"] is not None:
        total += prices["B"] * e["B.disc"]
    else:
        total += ledger.part_capex("B") + pe * e["B.ch"]
        total += ledger.degradation if include_degradation else 0.0

    lcoh = prices["LCOH"]
    if prices["H"] is not None or lcoh is not None:
        total += (prices["H"] or 0.0) * e["FC"] + (lcoh or 0.0) * e["H.A"]
    else:
        total += (ledger.part_capex("H") + ledger.hydrogen_purchase
                  - ledger.hydrogen_sale + pe * e["AE"])

    if prices["A"] is not None:
        total += prices["A"] * e["AF"] - (lcoh or 0.0) * e["H.A"]
    else:
        total += (ledger.part_capex("A") + ledger.ammonia_purchase
                  - ledger.ammonia_sale + pe * e["AS"])
    return total


def ledger_npc(ledger, include_degradation: bool = True) -> float:
    """Direct-route NPC of a ledger: the sum of all four parts' net costs."""
    total = ledger.retirement + ledger.coal
    total += ledger.degradation if include_degradation else 0.0
    total += ledger.hydrogen_purchase - ledger.hydrogen_sale
    total += ledger.ammonia_purchase - ledger.ammonia_sale
    for part in "GBHA":
        total += ledger.part_capex(part)
    return total
