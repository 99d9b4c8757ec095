"""Present-value discount factors and end-of-horizon salvage fractions.

Planning years are 1-based: year y runs from the start of year y to its end,
and a stage s covers years (s-1)*years_per_stage+1 .. s*years_per_stage.
Investment cash flows land at the start of the first year of their stage;
operating cash flows accrue once per year of their stage; fixed O&M accrues
every year from the stage's first year to the end of the horizon.
"""

from __future__ import annotations


def discount_delta1(year: int, rate: float) -> float:
    """Discount factor (1+rate)^(-year) for a cash flow in planning year `year`."""
    if year < 0:
        raise ValueError(f"year must be >= 0, got {year}")
    return (1.0 + rate) ** (-year)


def discount_delta2(stage: int, stage_count: int, years_per_stage: int, rate: float) -> float:
    """Sum of yearly discount factors from the first year of `stage` to the horizon end.

    Used for recurring costs that persist once incurred (fixed O&M of capacity
    added in `stage`).
    """
    _check_stage(stage, stage_count)
    first = (stage - 1) * years_per_stage + 1
    last = stage_count * years_per_stage
    return sum(discount_delta1(y, rate) for y in range(first, last + 1))


def discount_delta3(stage: int, years_per_stage: int, rate: float) -> float:
    """Sum of yearly discount factors over the years of `stage` itself.

    Used for operating costs and revenues that accrue only during the stage
    (fuel, trading, degradation).
    """
    if stage < 1:
        raise ValueError(f"stage must be >= 1, got {stage}")
    first = (stage - 1) * years_per_stage + 1
    last = stage * years_per_stage
    return sum(discount_delta1(y, rate) for y in range(first, last + 1))


def salvage_fraction(stage: int, stage_count: int, years_per_stage: int, lifetime_years: int) -> float:
    """Straight-line residual value fraction at the horizon end for capacity added in `stage`.

    An asset bought at the start of the stage has served
    (stage_count - stage + 1)*years_per_stage - 1 full years when the horizon
    closes; the remaining book value is linear in the unserved lifetime.
    A 1-year asset is fully consumed (the straight line has no span).
    """
    _check_stage(stage, stage_count)
    if lifetime_years < 1:
        raise ValueError(f"lifetime_years must be >= 1, got {lifetime_years}")
    served = (stage_count - stage + 1) * years_per_stage - 1
    if served >= lifetime_years - 1:
        return 0.0
    return 1.0 - served / (lifetime_years - 1.0)


def _check_stage(stage: int, stage_count: int) -> None:
    if not 1 <= stage <= stage_count:
        raise ValueError(f"stage must be in 1..{stage_count}, got {stage}")
