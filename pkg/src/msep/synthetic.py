"""Deterministic synthetic planning instances for tests and demos.

Real project data for this class of system is not public, so tests run on
generated stand-ins: seeded wind/solar/load profiles normalized to typical
full-load-hour targets (3000 h wind, 1500 h solar), plus a parameter set
assembled from published figures for the coal plant and ammonia store and
from conventional cost ranges for the remaining facilities.

Instances are sized against a representative year of `n_steps` samples.
When that year is shorter than 8760 h, yearly operating volumes shrink
proportionally while investment costs would not, which makes every build
decision look absurdly expensive at desk scale. Investment and retirement
unit costs are therefore scaled by n_steps * timestep_hours / 8760 so the
capex/opex balance of a full-year study carries over to small instances;
the model formulas themselves are untouched.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import yaml

from msep.domain import (
    PlanningInputs,
    TimeSeriesBundle,
    parse_config,
)

PROFILES = {"small": 168, "medium": 8760}

WIND_FLH = 3000.0
SOLAR_FLH = 1500.0


def _smooth(x: np.ndarray, width: int) -> np.ndarray:
    """Circular moving average, so profiles stay periodic over the year."""
    if width <= 1 or len(x) <= 2:
        return x
    width = min(width, len(x))
    kernel = np.ones(width) / width
    ext = np.concatenate([x[-width:], x, x[:width]])
    return np.convolve(ext, kernel, mode="same")[width:-width]


def _renormalize(x: np.ndarray, target_mean: float) -> np.ndarray:
    """Scale a [0,1] profile so its mean hits the target despite clipping."""
    for _ in range(8):
        mean = float(x.mean())
        if mean <= 0.0:
            break
        x = np.clip(x * (target_mean / mean), 0.0, 1.0)
    return x


def synthetic_series(
    seed: int,
    n_steps: int,
    timestep_hours: float = 1.0,
    load_mw: float = 8000.0,
) -> TimeSeriesBundle:
    """Seeded wind/solar/load profiles hitting the FLH targets within 2%."""
    rng = np.random.default_rng(seed)
    hours = np.arange(n_steps) * timestep_hours
    day = (hours % 24.0) / 24.0
    year = (hours % 8760.0) / 8760.0

    wind = (
        0.42
        + 0.18 * np.sin(2 * np.pi * (year - 0.03))
        - 0.08 * np.sin(2 * np.pi * day)
        + 0.22 * _smooth(rng.standard_normal(n_steps), 6)
    )
    wind = _renormalize(np.clip(wind, 0.02, 0.98), WIND_FLH / 8760.0)

    daylight = np.maximum(0.0, np.sin(np.pi * (day * 24.0 - 6.5) / 11.0))
    season = 1.0 + 0.28 * np.sin(2 * np.pi * (year - 0.22))
    cloud = 1.0 - 0.35 * np.clip(_smooth(rng.standard_normal(n_steps), 4), 0.0, None)
    solar = _renormalize(np.clip(daylight * season * cloud, 0.0, 1.0), SOLAR_FLH / 8760.0)

    load = load_mw * (
        1.0
        + 0.06 * np.sin(2 * np.pi * (day - 0.58))
        + 0.03 * np.sin(4 * np.pi * (day - 0.10))
        + 0.04 * np.sin(2 * np.pi * (year - 0.05))
        + 0.01 * _smooth(rng.standard_normal(n_steps), 3)
    )
    load = np.clip(load, 0.2 * load_mw, None)

    return TimeSeriesBundle(wind_pu=wind, solar_pu=solar, uhvdc_mw=load)


def _declining(first: float, last_fraction: float, stage_count: int) -> list[float]:
    if stage_count == 1:
        return [first]
    return [first * (1.0 - (1.0 - last_fraction) * s / (stage_count - 1))
            for s in range(stage_count)]


def _growing(base: float, start: float, end: float, stage_count: int) -> list[float]:
    return [base * (start + (end - start) * (s + 1) / stage_count)
            for s in range(stage_count)]


def synthetic_raw_config(
    stage_count: int = 3,
    n_steps: int = 168,
    timestep_hours: float = 1.0,
    years_per_stage: int = 5,
    final_target: float = 0.5,
    load_mw: float = 8000.0,
    battery_only: bool = False,
) -> dict:
    """Plain config mapping (YAML-ready) for a synthetic instance."""
    s_count = int(stage_count)
    scale = n_steps * timestep_hours / 8760.0
    if s_count == 1:
        targets = [float(final_target)]
    else:
        targets = [final_target * s / (s_count - 1) for s in range(s_count)]

    def invest(values: list[float]) -> list[float]:
        return [v * scale for v in values]

    caps = {
        "W": _growing(load_mw, 0.8, 2.5, s_count),
        "S": _growing(load_mw, 0.5, 2.5, s_count),
        "CFPP": [0.75 * load_mw] * s_count,
        "B": _growing(load_mw, 2.0, 6.0, s_count),        # MWh
        "AE": _growing(load_mw, 0.5, 1.5, s_count),
        "HS": _growing(4.0e7, 0.3, 1.0, s_count),         # Nm3
        "FC": _growing(load_mw, 0.3, 1.0, s_count),
        "ASyn": _growing(5.0e5, 0.2, 1.0, s_count),       # t/yr
        "ASto": _growing(5.0e5, 0.2, 1.0, s_count),       # t
    }
    if battery_only:
        for fid in ("AE", "HS", "FC", "ASyn", "ASto"):
            caps[fid] = [0.0] * s_count

    return {
        "currency": "RMB",
        "planning": {
            "stage_count": s_count,
            "years_per_stage": int(years_per_stage),
            "timestep_count": int(n_steps),
            "timestep_hours": float(timestep_hours),
            "interest_rate": 0.08,
            "carbon_reduction_targets": targets,
            "epsilon": 1e-4,
            "max_iterations": 500,
        },
        "facilities": {
            "W": {"invest_cost": invest(_declining(5.0e6, 0.85, s_count)),
                  "om_fraction": 0.03, "lifetime_years": 20, "capacity_max": caps["W"]},
            "S": {"invest_cost": invest(_declining(2.8e6, 0.75, s_count)),
                  "om_fraction": 0.02, "lifetime_years": 25, "capacity_max": caps["S"]},
            "CFPP": {"invest_cost": invest([3.5e6] * s_count),
                     "om_fraction": 0.03, "lifetime_years": 25,
                     "capacity_max": caps["CFPP"],
                     "initial_capacity": 0.75 * load_mw, "band": [0.3, 1.0]},
            "B": {"invest_cost": invest(_declining(1.0e6, 0.60, s_count)),
                  "om_fraction": 0.02, "lifetime_years": 12, "capacity_max": caps["B"]},
            "AE": {"invest_cost": invest(_declining(2.5e6, 0.70, s_count)),
                   "om_fraction": 0.03, "lifetime_years": 15, "capacity_max": caps["AE"]},
            "HS": {"invest_cost": invest(_declining(300.0, 0.90, s_count)),
                   "om_fraction": 0.01, "lifetime_years": 25, "capacity_max": caps["HS"]},
            "FC": {"invest_cost": invest(_declining(3.0e6, 0.75, s_count)),
                   "om_fraction": 0.03, "lifetime_years": 12, "capacity_max": caps["FC"]},
            "ASyn": {"invest_cost": invest(_declining(4.0e3, 0.85, s_count)),
                     "om_fraction": 0.03, "lifetime_years": 20, "capacity_max": caps["ASyn"]},
            "ASto": {"invest_cost": invest(_declining(5.5e3, 0.90, s_count)),
                     "om_fraction": 0.01, "lifetime_years": 20,
                     "capacity_max": caps["ASto"], "band": [0.1, 0.9]},
        },
        "conversion": {
            "kappa_ae": "4.5 kWh/Nm3",
            "kappa_fc": "1.5 kWh/Nm3",
            "kappa_as": "0.3 kWh/Nm3",
            "gamma_h2a": 5.06e-4,
            "gamma_a2p": "2070 kWh/t",
            "gamma_p2c": "0.300 kg/kWh",
            "mu_cf": "0.738 kg/kWh",
            "battery": {
                "self_discharge": 0.001,
                "one_way_efficiency": 0.95,
                "energy_to_power_hours": 2.0,
                "degradation_cost": 50.0,
            },
            "ammonia_synthesis": {
                "ramp_down_fraction": -0.02,
                "ramp_up_fraction": 0.02,
                "transient_hours": 12.0,
                "setpoint_hours": 24.0,
                "full_load_hours": 8000.0,
            },
        },
        "prices": {
            "coal": ["800 RMB/t"] * s_count,
            "hydrogen_purchase": _declining(2.0, 0.75, s_count),
            "hydrogen_sell": [0.2] * s_count,
            "ammonia_purchase": _declining(4000.0, 0.875, s_count),
            "ammonia_sell": [800.0] * s_count,
            "cfpp_retirement": [5.0e5 * scale] * s_count,
        },
    }


def synthetic_inputs(
    seed: int,
    stage_count: int = 3,
    n_steps: int = 168,
    timestep_hours: float = 1.0,
    **config_kwargs,
) -> PlanningInputs:
    """Parsed, ready-to-solve synthetic instance."""
    raw = synthetic_raw_config(
        stage_count=stage_count,
        n_steps=n_steps,
        timestep_hours=timestep_hours,
        **config_kwargs,
    )
    config, catalog, prices = parse_config(raw)
    load_mw = config_kwargs.get("load_mw", 8000.0)
    series = synthetic_series(seed, n_steps, timestep_hours, load_mw)
    return PlanningInputs(config=config, catalog=catalog, prices=prices, series=series)


def write_series_csv(series: TimeSeriesBundle, path: str | Path) -> None:
    lines = ["t,wind_pu,solar_pu,uhvdc_mw"]
    for t in range(len(series.wind_pu)):
        lines.append(
            f"{t},{float(series.wind_pu[t])!r},"
            f"{float(series.solar_pu[t])!r},{float(series.uhvdc_mw[t])!r}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def generate_synthetic(
    seed: int,
    profile: str,
    out_dir: str | Path,
    stage_count: int = 3,
) -> tuple[Path, Path]:
    """Write the synthetic config and series files; returns their paths."""
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}; expected one of {sorted(PROFILES)}")
    n_steps = PROFILES[profile]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    raw = synthetic_raw_config(stage_count=stage_count, n_steps=n_steps)
    config_path = out / f"synthetic_{profile}_seed{seed}.yaml"
    config_path.write_text(yaml.safe_dump(raw, sort_keys=True), encoding="utf-8")

    series = synthetic_series(seed, n_steps)
    series_path = out / f"synthetic_{profile}_seed{seed}.csv"
    write_series_csv(series, series_path)
    return config_path, series_path
