"""Unit-annotated quantity parsing for config files.

Internal canonical units, fixed project-wide:

    power            MW          energy            MWh
    hydrogen flow    Nm3/h       hydrogen volume   Nm3
    ammonia flow     t/h         ammonia mass      t
    ammonia rate     t/yr        emissions         kg/MWh
    coal price       ccy/kg      currency          per config

Config values are either bare numbers (already in the canonical unit) or
strings like "3500 RMB/kW"; the declared currency token is accepted wherever
the tables below say "ccy".
"""

from __future__ import annotations

# factor converts the named unit to the canonical unit of its dimension
_FACTORS: dict[str, dict[str, float]] = {
    "dimensionless": {"": 1.0},
    "hours": {"h": 1.0},
    "years": {"yr": 1.0},
    "power": {"kW": 1e-3, "MW": 1.0, "GW": 1e3},
    "energy": {"kWh": 1e-3, "MWh": 1.0, "GWh": 1e3},
    "h2_volume": {"Nm3": 1.0, "kNm3": 1e3, "MNm3": 1e6},
    "mass": {"kg": 1e-3, "t": 1.0, "kt": 1e3, "Mt": 1e6},
    "mass_rate": {"t/yr": 1.0, "kt/yr": 1e3, "Mt/yr": 1e6},
    "cost_per_power": {"ccy/kW": 1e3, "ccy/MW": 1.0, "ccy/GW": 1e-3},
    "cost_per_energy": {"ccy/kWh": 1e3, "ccy/MWh": 1.0},
    "cost_per_h2_volume": {"ccy/Nm3": 1.0},
    "cost_per_mass": {"ccy/kg": 1e3, "ccy/t": 1.0},
    "cost_per_mass_rate": {"ccy/t/yr": 1.0, "ccy/kt/yr": 1e-3},
    "coal_price": {"ccy/kg": 1.0, "ccy/t": 1e-3},
    "energy_per_h2_volume": {"kWh/Nm3": 1e-3, "MWh/Nm3": 1.0},
    "mass_per_h2_volume": {"t/Nm3": 1.0, "kg/Nm3": 1e-3},
    "energy_per_mass": {"kWh/t": 1e-3, "MWh/t": 1.0},
    "mass_per_energy": {"kg/kWh": 1e3, "kg/MWh": 1.0, "t/MWh": 1e3},
}

CANONICAL_UNIT: dict[str, str] = {
    "dimensionless": "",
    "hours": "h",
    "years": "yr",
    "power": "MW",
    "energy": "MWh",
    "h2_volume": "Nm3",
    "mass": "t",
    "mass_rate": "t/yr",
    "cost_per_power": "ccy/MW",
    "cost_per_energy": "ccy/MWh",
    "cost_per_h2_volume": "ccy/Nm3",
    "cost_per_mass": "ccy/t",
    "cost_per_mass_rate": "ccy/t/yr",
    "coal_price": "ccy/kg",
    "energy_per_h2_volume": "MWh/Nm3",
    "mass_per_h2_volume": "t/Nm3",
    "energy_per_mass": "MWh/t",
    "mass_per_energy": "kg/MWh",
}


class UnitError(ValueError):
    """A quantity string could not be interpreted in its expected dimension."""


def parse_quantity(value: object, dimension: str, currency: str = "RMB", field: str = "") -> float:
    """Convert a config value to the canonical unit of `dimension`.

    Bare numbers are taken as already canonical; strings must be
    "<number> <unit>" with a unit from the dimension's table.
    """
    if dimension not in _FACTORS:
        raise UnitError(f"unknown dimension {dimension!r}")
    if isinstance(value, bool):
        raise UnitError(f"{field or 'value'}: boolean is not a quantity")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        parts = value.strip().split(None, 1)
        if len(parts) != 2:
            raise UnitError(
                f"{field or 'value'}: expected '<number> <unit>', got {value!r}"
            )
        try:
            number = float(parts[0])
        except ValueError as exc:
            raise UnitError(f"{field or 'value'}: bad number in {value!r}") from exc
        unit = parts[1].replace(" ", "").replace("³", "3")
        if unit.startswith(currency):
            unit = "ccy" + unit[len(currency):]
        table = _FACTORS[dimension]
        if unit not in table:
            allowed = ", ".join(sorted(table))
            raise UnitError(
                f"{field or 'value'}: unit {parts[1]!r} not valid for {dimension} "
                f"(accepted: {allowed}, 'ccy' meaning {currency})"
            )
        return number * table[unit]
    raise UnitError(f"{field or 'value'}: cannot parse {value!r} as a quantity")
