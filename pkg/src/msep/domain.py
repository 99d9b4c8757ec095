"""Planning inputs: parameter records, loaders and input validation.

Everything downstream (formulation, solvers, metrics) consumes the immutable
`PlanningInputs` bundle produced here. Units are canonical internal units
(see `msep.units`); config files may annotate values with unit strings and
are converted on load.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from msep.units import CANONICAL_UNIT, UnitError, parse_quantity

# facility identifiers: wind, solar, coal plant, battery, electrolyzer,
# hydrogen store, fuel cell, ammonia synthesis, ammonia store
FACILITIES: tuple[str, ...] = ("W", "S", "CFPP", "B", "AE", "HS", "FC", "ASyn", "ASto")

# facility groups used for cost attribution in the levelized-price system
GROUP_GEN: tuple[str, ...] = ("W", "S", "CFPP")
GROUP_BATTERY: tuple[str, ...] = ("B",)
GROUP_HYDROGEN: tuple[str, ...] = ("AE", "HS", "FC")
GROUP_AMMONIA: tuple[str, ...] = ("ASyn", "ASto")

# dimension of each facility's capacity (and of its invest cost denominator)
CAPACITY_DIMENSION: dict[str, str] = {
    "W": "power",
    "S": "power",
    "CFPP": "power",
    "B": "energy",
    "AE": "power",
    "HS": "h2_volume",
    "FC": "power",
    "ASyn": "mass_rate",
    "ASto": "mass",
}

_INVEST_DIMENSION: dict[str, str] = {
    "power": "cost_per_power",
    "energy": "cost_per_energy",
    "h2_volume": "cost_per_h2_volume",
    "mass_rate": "cost_per_mass_rate",
    "mass": "cost_per_mass",
}

SERIES_COLUMNS: tuple[str, ...] = ("t", "wind_pu", "solar_pu", "uhvdc_mw")


class ConfigError(ValueError):
    """Structural problem in a config or series file (missing key, bad type)."""


@dataclass(frozen=True)
class PlanningConfig:
    """Horizon structure, economics and solver defaults."""

    stage_count: int                      # S
    years_per_stage: int                  # years covered by one stage
    timestep_count: int                   # N, samples per representative year
    timestep_hours: float                 # hours per sample
    interest_rate: float                  # yearly, dimensionless
    carbon_reduction_targets: np.ndarray  # fraction per stage, shape (S,)
    epsilon: float = 1e-4                 # decomposition gap tolerance
    max_iterations: int = 100             # column-generation iteration cap
    currency: str = "RMB"
    # model options (paper-literal variants flip these)
    as_transient_mode: str = "relative"   # relative | absolute | off
    discount_degradation: bool = True     # discount battery degradation cost
    lcos_ammonia_revenue: bool = True     # ammonia part credits its own sales
    # LP backend selection and optional tolerance overrides
    backend: str = "highs"                # highs | reference
    solver_feasibility: float | None = None
    solver_optimality: float | None = None
    solver_zero_pivot: float | None = None


@dataclass(frozen=True)
class FacilityParams:
    """Investment and operating envelope of one facility type."""

    facility_id: str
    invest_cost: np.ndarray       # ccy per capacity unit, per stage, shape (S,)
    om_fraction: float            # yearly fixed O&M as fraction of invest cost
    lifetime_years: int
    capacity_max: np.ndarray      # capacity units, per stage, shape (S,)
    initial_capacity: float = 0.0
    band: tuple[float, float] = (0.0, 1.0)  # operating band as fraction of capacity


@dataclass(frozen=True)
class ConversionParams:
    """Conversion coefficients and storage dynamics shared across stages."""

    kappa_ae: float               # MWh electricity per Nm3 hydrogen produced
    kappa_fc: float               # MWh electricity per Nm3 hydrogen consumed
    kappa_as: float               # MWh electricity per Nm3 hydrogen fed to synthesis
    gamma_h2a: float              # t ammonia per Nm3 hydrogen feed
    gamma_a2p: float              # MWh electricity per t ammonia fired
    gamma_p2c: float              # kg coal per MWh coal-fired output
    mu_cf: float                  # kg CO2 per MWh coal-fired output
    battery_self_discharge: float  # fraction of stored energy lost per step
    battery_efficiency: float      # one-way charge/discharge efficiency
    battery_power_hours: float     # energy-to-power ratio (hours)
    battery_degradation_cost: float  # ccy per MWh discharged
    as_ramp_down: float           # fraction of rated feed per step, <= 0
    as_ramp_up: float             # fraction of rated feed per step, >= 0
    as_transient_hours: float     # first-order settling time constant
    as_setpoint_hours: float      # setpoint interval length, multiple of timestep
    as_full_load_hours: float = 8000.0  # rated-feed utilization used in sizing


@dataclass(frozen=True)
class PriceSchedule:
    """Per-stage commodity prices, shape (S,) each."""

    coal: np.ndarray                 # ccy/kg
    hydrogen_purchase: np.ndarray    # ccy/Nm3
    hydrogen_sell: np.ndarray        # ccy/Nm3
    ammonia_purchase: np.ndarray     # ccy/t
    ammonia_sell: np.ndarray         # ccy/t
    cfpp_retirement: np.ndarray      # ccy/MW retired


@dataclass(frozen=True)
class TechnologyCatalog:
    """All facility parameters plus the shared conversion coefficients."""

    facilities: dict[str, FacilityParams]
    conversion: ConversionParams


@dataclass(frozen=True)
class TimeSeriesBundle:
    """Per-unit availability profiles and the delivery obligation."""

    wind_pu: np.ndarray    # [0,1], shape (N,)
    solar_pu: np.ndarray   # [0,1], shape (N,)
    uhvdc_mw: np.ndarray   # MW, shape (N,)


@dataclass(frozen=True)
class PlanningInputs:
    """Validated bundle handed to the formulation."""

    config: PlanningConfig
    catalog: TechnologyCatalog
    prices: PriceSchedule
    series: TimeSeriesBundle

    @property
    def facilities(self) -> dict[str, FacilityParams]:
        return self.catalog.facilities

    @property
    def conversion(self) -> ConversionParams:
        return self.catalog.conversion


@dataclass
class ValidationReport:
    """Input admissibility findings, split by severity."""

    fatal: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.fatal

    def __str__(self) -> str:
        lines = [f"fatal: {m}" for m in self.fatal]
        lines += [f"warning: {m}" for m in self.warnings]
        return "\n".join(lines) if lines else "inputs admissible"


def carbon_baseline_kg(config: PlanningConfig, series: TimeSeriesBundle, mu_cf: float) -> float:
    """Yearly emission baseline: half the delivered energy priced at coal intensity.

    mu_cf is kg CO2 per MWh; the result is kg CO2 per representative year.
    """
    load_mwh = float(np.sum(series.uhvdc_mw)) * config.timestep_hours
    return 0.5 * mu_cf * load_mwh


# ---------------------------------------------------------------------------
# loading


def load_config(path: str | Path) -> tuple[PlanningConfig, TechnologyCatalog, PriceSchedule]:
    """Parse the YAML config tree into typed, unit-converted records."""
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file {path} is not valid YAML: {exc}")
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path} must contain a mapping at top level")
    return parse_config(raw)


def parse_config(raw: dict) -> tuple[PlanningConfig, TechnologyCatalog, PriceSchedule]:
    currency = str(raw.get("currency", "RMB"))
    planning = _require_map(raw, "planning")
    options = raw.get("options", {}) or {}
    if not isinstance(options, dict):
        raise ConfigError("options must be a mapping")

    stage_count = _require_int(planning, "planning.stage_count", "stage_count")
    targets = planning.get("carbon_reduction_targets", 0.0)
    targets_arr = _per_stage(targets, stage_count, "dimensionless", currency,
                             "planning.carbon_reduction_targets")

    solver = raw.get("solver", {}) or {}
    if not isinstance(solver, dict):
        raise ConfigError("solver must be a mapping")

    def solver_tol(key: str) -> float | None:
        value = solver.get(key)
        return None if value is None else float(value)

    config = PlanningConfig(
        stage_count=stage_count,
        years_per_stage=_require_int(planning, "planning.years_per_stage", "years_per_stage"),
        timestep_count=_require_int(planning, "planning.timestep_count", "timestep_count"),
        timestep_hours=float(planning.get("timestep_hours", 1.0)),
        interest_rate=float(_require(planning, "planning.interest_rate", "interest_rate")),
        carbon_reduction_targets=targets_arr,
        epsilon=float(planning.get("epsilon", 1e-4)),
        max_iterations=int(planning.get("max_iterations", 100)),
        currency=currency,
        as_transient_mode=str(options.get("as_transient", "relative")),
        discount_degradation=bool(options.get("discount_degradation", True)),
        lcos_ammonia_revenue=bool(options.get("lcos_ammonia_revenue", True)),
        backend=str(solver.get("backend", "highs")),
        solver_feasibility=solver_tol("feasibility"),
        solver_optimality=solver_tol("optimality"),
        solver_zero_pivot=solver_tol("zero_pivot"),
    )
    if config.as_transient_mode not in ("relative", "absolute", "off"):
        raise ConfigError(
            f"options.as_transient must be relative|absolute|off, got {config.as_transient_mode!r}"
        )
    if config.backend not in ("highs", "reference"):
        raise ConfigError(f"solver.backend must be highs|reference, got {config.backend!r}")

    fac_raw = _require_map(raw, "facilities")
    facilities: dict[str, FacilityParams] = {}
    for fid in FACILITIES:
        if fid not in fac_raw:
            continue  # reported by validate_inputs, not a structural failure
        entry = fac_raw[fid]
        if not isinstance(entry, dict):
            raise ConfigError(f"facilities.{fid} must be a mapping")
        cap_dim = CAPACITY_DIMENSION[fid]
        inv_dim = _INVEST_DIMENSION[cap_dim]
        prefix = f"facilities.{fid}"
        band_raw = entry.get("band", [0.0, 1.0])
        if not (isinstance(band_raw, (list, tuple)) and len(band_raw) == 2):
            raise ConfigError(f"{prefix}.band must be a [lower, upper] pair")
        facilities[fid] = FacilityParams(
            facility_id=fid,
            invest_cost=_per_stage(_require(entry, f"{prefix}.invest_cost", "invest_cost"),
                                   stage_count, inv_dim, currency, f"{prefix}.invest_cost"),
            om_fraction=float(_require(entry, f"{prefix}.om_fraction", "om_fraction")),
            lifetime_years=_require_int(entry, f"{prefix}.lifetime_years", "lifetime_years"),
            capacity_max=_per_stage(_require(entry, f"{prefix}.capacity_max", "capacity_max"),
                                    stage_count, cap_dim, currency, f"{prefix}.capacity_max"),
            initial_capacity=parse_quantity(entry.get("initial_capacity", 0.0), cap_dim,
                                            currency, f"{prefix}.initial_capacity"),
            band=(float(band_raw[0]), float(band_raw[1])),
        )

    conv_raw = _require_map(raw, "conversion")
    battery = _require_map(conv_raw, "conversion.battery")
    ammonia = _require_map(conv_raw, "conversion.ammonia_synthesis")

    def conv(key: str, dim: str, source: dict, prefix: str) -> float:
        return parse_quantity(_require(source, f"{prefix}.{key}", key), dim,
                              currency, f"{prefix}.{key}")

    conversion = ConversionParams(
        kappa_ae=conv("kappa_ae", "energy_per_h2_volume", conv_raw, "conversion"),
        kappa_fc=conv("kappa_fc", "energy_per_h2_volume", conv_raw, "conversion"),
        kappa_as=conv("kappa_as", "energy_per_h2_volume", conv_raw, "conversion"),
        gamma_h2a=conv("gamma_h2a", "mass_per_h2_volume", conv_raw, "conversion"),
        gamma_a2p=conv("gamma_a2p", "energy_per_mass", conv_raw, "conversion"),
        gamma_p2c=conv("gamma_p2c", "mass_per_energy", conv_raw, "conversion"),
        mu_cf=conv("mu_cf", "mass_per_energy", conv_raw, "conversion"),
        battery_self_discharge=float(_require(battery, "conversion.battery.self_discharge",
                                              "self_discharge")),
        battery_efficiency=float(_require(battery, "conversion.battery.one_way_efficiency",
                                          "one_way_efficiency")),
        battery_power_hours=float(_require(battery, "conversion.battery.energy_to_power_hours",
                                           "energy_to_power_hours")),
        battery_degradation_cost=conv("degradation_cost", "cost_per_energy", battery,
                                      "conversion.battery"),
        as_ramp_down=float(_require(ammonia, "conversion.ammonia_synthesis.ramp_down_fraction",
                                    "ramp_down_fraction")),
        as_ramp_up=float(_require(ammonia, "conversion.ammonia_synthesis.ramp_up_fraction",
                                  "ramp_up_fraction")),
        as_transient_hours=float(_require(ammonia, "conversion.ammonia_synthesis.transient_hours",
                                          "transient_hours")),
        as_setpoint_hours=float(_require(ammonia, "conversion.ammonia_synthesis.setpoint_hours",
                                         "setpoint_hours")),
        as_full_load_hours=float(ammonia.get("full_load_hours", 8000.0)),
    )

    price_raw = _require_map(raw, "prices")

    def price(key: str, dim: str) -> np.ndarray:
        return _per_stage(_require(price_raw, f"prices.{key}", key), stage_count,
                          dim, currency, f"prices.{key}")

    prices = PriceSchedule(
        coal=price("coal", "coal_price"),
        hydrogen_purchase=price("hydrogen_purchase", "cost_per_h2_volume"),
        hydrogen_sell=price("hydrogen_sell", "cost_per_h2_volume"),
        ammonia_purchase=price("ammonia_purchase", "cost_per_mass"),
        ammonia_sell=price("ammonia_sell", "cost_per_mass"),
        cfpp_retirement=price("cfpp_retirement", "cost_per_power"),
    )

    return config, TechnologyCatalog(facilities=facilities, conversion=conversion), prices


def load_series(path: str | Path, expected_steps: int | None = None) -> TimeSeriesBundle:
    """Read the time-series CSV with header t,wind_pu,solar_pu,uhvdc_mw."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"series file not found: {path}")
    reader = csv.DictReader(text.splitlines())
    header = reader.fieldnames or []
    for col in SERIES_COLUMNS:
        if col not in header:
            raise ConfigError(f"series file {path} is missing column {col!r}")
    wind, solar, load = [], [], []
    for i, row in enumerate(reader):
        try:
            wind.append(float(row["wind_pu"]))
            solar.append(float(row["solar_pu"]))
            load.append(float(row["uhvdc_mw"]))
        except (TypeError, ValueError):
            raise ConfigError(f"series file {path}: non-numeric value in data row {i}")
    bundle = TimeSeriesBundle(
        wind_pu=np.asarray(wind, dtype=float),
        solar_pu=np.asarray(solar, dtype=float),
        uhvdc_mw=np.asarray(load, dtype=float),
    )
    if expected_steps is not None and len(bundle.wind_pu) != expected_steps:
        raise ConfigError(
            f"series file {path} has {len(bundle.wind_pu)} data rows, "
            f"config expects {expected_steps}"
        )
    return bundle


def load_inputs(config_path: str | Path, series_path: str | Path) -> PlanningInputs:
    config, catalog, prices = load_config(config_path)
    series = load_series(series_path, expected_steps=config.timestep_count)
    return PlanningInputs(config=config, catalog=catalog, prices=prices, series=series)


# ---------------------------------------------------------------------------
# validation


def validate_inputs(
    config: PlanningConfig,
    catalog: TechnologyCatalog,
    prices: PriceSchedule,
    series: TimeSeriesBundle,
) -> ValidationReport:
    """Check every typed invariant; fatal findings block the solve."""
    report = ValidationReport()
    fatal, warn = report.fatal.append, report.warnings.append

    s_count, n_steps = config.stage_count, config.timestep_count
    if s_count < 1:
        fatal(f"stage_count must be >= 1, got {s_count}")
    if config.years_per_stage < 1:
        fatal(f"years_per_stage must be >= 1, got {config.years_per_stage}")
    if n_steps < 1:
        fatal(f"timestep_count must be >= 1, got {n_steps}")
    if config.timestep_hours <= 0:
        fatal(f"timestep_hours must be > 0, got {config.timestep_hours}")
    if config.interest_rate < 0:
        fatal(f"interest_rate must be >= 0, got {config.interest_rate}")
    if config.epsilon <= 0:
        fatal(f"epsilon must be > 0, got {config.epsilon}")
    if config.max_iterations < 1:
        fatal(f"max_iterations must be >= 1, got {config.max_iterations}")

    targets = config.carbon_reduction_targets
    if len(targets) != s_count:
        fatal(f"carbon_reduction_targets has {len(targets)} entries, expected {s_count}")
    else:
        for s, val in enumerate(targets, start=1):
            if not 0.0 <= val <= 1.0:
                fatal(f"carbon_reduction_targets[{s}] = {val} outside [0, 1]")
        if np.any(np.diff(targets) < 0):
            warn("non-monotone carbon targets (policy usually tightens per stage)")

    for fid in FACILITIES:
        if fid not in catalog.facilities:
            fatal(f"facility {fid} missing from catalog")
            continue
        fac = catalog.facilities[fid]
        pre = f"facility {fid}"
        lo, hi = fac.band
        if not 0.0 <= lo <= hi <= 1.0:
            fatal(f"{pre}: operating band ({lo}, {hi}) must satisfy 0 <= lo <= hi <= 1")
        if fac.lifetime_years < 1:
            fatal(f"{pre}: lifetime_years must be >= 1, got {fac.lifetime_years}")
        if fac.om_fraction < 0:
            fatal(f"{pre}: om_fraction must be >= 0, got {fac.om_fraction}")
        for name, arr in (("invest_cost", fac.invest_cost), ("capacity_max", fac.capacity_max)):
            if len(arr) != s_count:
                fatal(f"{pre}: {name} has {len(arr)} entries, expected {s_count}")
            elif np.any(arr < 0):
                fatal(f"{pre}: {name} must be nonnegative")
        if fac.initial_capacity < 0:
            fatal(f"{pre}: initial_capacity must be >= 0, got {fac.initial_capacity}")
        elif len(fac.capacity_max) == s_count and fid != "CFPP" \
                and fac.initial_capacity > fac.capacity_max[0]:
            warn(f"{pre}: initial_capacity exceeds stage-1 capacity_max; "
                 "the capacity recursion cannot shed it (likely infeasible)")

    conv = catalog.conversion
    for name in ("kappa_ae", "kappa_fc", "kappa_as", "gamma_h2a", "gamma_a2p",
                 "gamma_p2c", "mu_cf"):
        if getattr(conv, name) <= 0:
            fatal(f"conversion.{name} must be > 0, got {getattr(conv, name)}")
    if not 0.0 <= conv.battery_self_discharge < 1.0:
        fatal(f"battery self_discharge must be in [0, 1), got {conv.battery_self_discharge}")
    if not 0.0 < conv.battery_efficiency <= 1.0:
        fatal(f"battery one_way_efficiency must be in (0, 1], got {conv.battery_efficiency}")
    if conv.battery_power_hours <= 0:
        fatal(f"battery energy_to_power_hours must be > 0, got {conv.battery_power_hours}")
    if conv.battery_degradation_cost < 0:
        fatal(f"battery degradation_cost must be >= 0, got {conv.battery_degradation_cost}")
    if not conv.as_ramp_down <= 0.0 <= conv.as_ramp_up:
        fatal(f"ammonia ramp fractions must satisfy down <= 0 <= up, "
              f"got ({conv.as_ramp_down}, {conv.as_ramp_up})")
    if conv.as_full_load_hours <= 0:
        fatal(f"ammonia full_load_hours must be > 0, got {conv.as_full_load_hours}")
    if config.as_transient_mode != "off":
        if conv.as_transient_hours <= 0:
            fatal(f"ammonia transient_hours must be > 0, got {conv.as_transient_hours}")
        dt, dt_as = config.timestep_hours, conv.as_setpoint_hours
        if dt_as <= 0 or abs(dt_as / dt - round(dt_as / dt)) > 1e-9:
            fatal(f"ammonia setpoint_hours ({dt_as}) must be a positive integer "
                  f"multiple of timestep_hours ({dt})")
        elif n_steps >= 1:
            year_hours = n_steps * dt
            if abs(year_hours / dt_as - round(year_hours / dt_as)) > 1e-9:
                fatal(f"timestep_count*timestep_hours ({year_hours}) must be a "
                      f"multiple of setpoint_hours ({dt_as}) for a periodic year")

    for name, arr in (("coal", prices.coal),
                      ("hydrogen_purchase", prices.hydrogen_purchase),
                      ("hydrogen_sell", prices.hydrogen_sell),
                      ("ammonia_purchase", prices.ammonia_purchase),
                      ("ammonia_sell", prices.ammonia_sell),
                      ("cfpp_retirement", prices.cfpp_retirement)):
        if len(arr) != s_count:
            fatal(f"prices.{name} has {len(arr)} entries, expected {s_count}")
        elif np.any(arr < 0):
            fatal(f"prices.{name} must be nonnegative")
    if len(prices.hydrogen_sell) == len(prices.hydrogen_purchase) and \
            np.any(prices.hydrogen_sell > prices.hydrogen_purchase):
        warn("hydrogen sell price exceeds purchase price in some stage "
             "(buy-and-resell arbitrage is profitable)")
    if len(prices.ammonia_sell) == len(prices.ammonia_purchase) and \
            np.any(prices.ammonia_sell > prices.ammonia_purchase):
        warn("ammonia sell price exceeds purchase price in some stage "
             "(buy-and-resell arbitrage is profitable)")

    for name, arr in (("wind_pu", series.wind_pu), ("solar_pu", series.solar_pu)):
        if len(arr) != n_steps:
            fatal(f"series {name} has {len(arr)} samples, expected {n_steps}")
            continue
        if np.any((arr < 0.0) | (arr > 1.0)):
            bad = int(np.argmax((arr < 0.0) | (arr > 1.0)))
            fatal(f"series {name}: per-unit out of [0,1] at row {bad} (value {arr[bad]})")
    if len(series.uhvdc_mw) != n_steps:
        fatal(f"series uhvdc_mw has {len(series.uhvdc_mw)} samples, expected {n_steps}")
    elif np.any(series.uhvdc_mw < 0):
        bad = int(np.argmax(series.uhvdc_mw < 0))
        fatal(f"series uhvdc_mw: negative load at row {bad}")
    elif not np.any(series.uhvdc_mw > 0):
        warn("uhvdc_mw is identically zero; nothing to deliver")

    return report


# ---------------------------------------------------------------------------
# helpers


def _require(source: dict, label: str, key: str):
    if key not in source or source[key] is None:
        raise ConfigError(f"missing required config key {label}")
    return source[key]


def _require_int(source: dict, label: str, key: str) -> int:
    value = _require(source, label, key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{label} must be an integer, got {value!r}")
    return value


def _require_map(source: dict, label: str) -> dict:
    key = label.rsplit(".", 1)[-1]
    value = source.get(key)
    if not isinstance(value, dict):
        raise ConfigError(f"missing or non-mapping config section {label}")
    return value


def _per_stage(value, stage_count: int, dimension: str, currency: str, fieldname: str) -> np.ndarray:
    """Scalar values broadcast to all stages; lists must have one entry per stage."""
    if isinstance(value, (list, tuple)):
        if len(value) != stage_count:
            raise ConfigError(
                f"{fieldname} has {len(value)} entries, expected {stage_count} (one per stage)"
            )
        items = value
    else:
        items = [value] * stage_count
    try:
        return np.asarray(
            [parse_quantity(v, dimension, currency, fieldname) for v in items], dtype=float
        )
    except UnitError as exc:
        raise ConfigError(str(exc))


def canonical_unit(dimension: str, currency: str = "RMB") -> str:
    """Human-readable canonical unit of a dimension, e.g. for error messages."""
    return CANONICAL_UNIT[dimension].replace("ccy", currency)
