"""
Synthetic systems and load/wind years. No published case-study data is
bundled, so studies and tests run on these. Every system built here is named
with a "synthetic-" prefix.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from ..config import HOURS_PER_DAY
from ..scenario import (DayProfile, HourlySeries, ScenarioSet, hourly_series,
                        normalize, segment_days, to_full_set)
from ..sysmodel import Line, Load, SystemModel, ThermalGen, WindFarm, check_valid

logger = logging.getLogger(__name__) # type: ignore

def synthetic_year(n_days: int = 365, seed: int = 0,
                   peak_days: int = 4) -> Tuple[HourlySeries, HourlySeries]:
    """ A year of hourly load (MW) and wind (capacity factor) samples.

    Load has a winter-peaking seasonal swing, a morning and an evening peak
    and noise; `peak_days` randomly chosen winter days carry markedly higher
    load. Wind follows a seasonal mean with autocorrelated noise.
    """

    rng = np.random.RandomState(seed)
    hours = np.arange(HOURS_PER_DAY)
    days = np.arange(n_days)
    season = np.cos(2 * np.pi * (days - 15) / 365.0)
    shape = (0.7 + 0.15 * np.exp(-((hours - 8) / 2.5) ** 2)
             + 0.3 * np.exp(-((hours - 19) / 3.0) ** 2))

    load = 1000.0 * (1.0 + 0.2 * season)[:, None] * shape[None, :]
    load *= 1.0 + 0.03 * rng.standard_normal((n_days, HOURS_PER_DAY))
    if peak_days:
        winter = np.flatnonzero(season > 0.5)
        pool = winter if winter.size >= peak_days else days
        chosen = rng.choice(pool, size=min(peak_days, pool.size), replace=False)
        load[np.sort(chosen)] *= 1.3
        logger.debug("Peak days: %s", sorted(int(day) for day in chosen))

    wind = np.empty(n_days * HOURS_PER_DAY)
    mean = np.repeat(0.35 + 0.12 * season, HOURS_PER_DAY)
    level = 0.0
    for t in range(wind.size):
        level = 0.95 * level + 0.08 * rng.standard_normal()
        wind[t] = mean[t] + level
    wind = np.clip(wind, 0.0, 1.0)

    return (hourly_series("load", np.clip(load.ravel(), 0.0, None)),
            hourly_series("wind", wind))

def synthetic_full_set(n_days: int = 365, seed: int = 0,
                       peak_days: int = 4) -> ScenarioSet:
    """ `synthetic_year()` normalized and segmented into the full set. """
    load, wind = synthetic_year(n_days, seed, peak_days)
    return to_full_set(segment_days(normalize(load), normalize(wind)))

def flat_day(load_factor: float, wind_factor: float = 0.0) -> np.ndarray:
    """ Features of a day with constant load and wind factors. """
    return np.concatenate([np.full(HOURS_PER_DAY, load_factor),
                           np.full(HOURS_PER_DAY, wind_factor)])

def flat_days_set(load_factors: Sequence[float],
                  wind_factors: Optional[Sequence[float]] = None) -> ScenarioSet:
    """ A full set of days with constant factors, one day per load factor. """

    if wind_factors is None:
        wind_factors = [0.0] * len(load_factors)
    days = [DayProfile(i, np.full(HOURS_PER_DAY, float(lf)),
                       np.full(HOURS_PER_DAY, float(wf)), 1.0)
            for i, (lf, wf) in enumerate(zip(load_factors, wind_factors))]
    return to_full_set(days)

def single_bus_system(peak: float = 100.0, p_max: float = 100.0,
                      marginal_cost: float = 10.0, voll: float = 1000.0,
                      ramp: Optional[float] = None,
                      wind_capacity: float = 0.0,
                      wind_cost: float = 0.0) -> SystemModel:
    """ One bus, one thermal unit and, if `wind_capacity` is positive, one
    candidate wind farm. """

    farms = (WindFarm(1, wind_capacity, wind_cost, "w1"),) if wind_capacity > 0 else ()
    return check_valid(SystemModel(
        buses=(1,),
        existing_lines=(),
        candidate_lines=(),
        thermal_units=(ThermalGen(1, 0.0, p_max, marginal_cost,
                                  ramp if ramp is not None else p_max, "g1"),),
        candidate_wind=farms,
        loads=(Load(1, peak),),
        voll=voll,
        curtail_price=0.0,
        reference_bus=1,
        name="synthetic-single-bus"))

def two_bus_system(line_capacity: float = 60.0) -> SystemModel:
    """ A cheap unit at bus 1 feeds a 100 MW load at bus 2 through one line;
    an expensive unit at bus 2 covers what the line cannot carry. """

    return check_valid(SystemModel(
        buses=(1, 2),
        existing_lines=(Line(1, 2, 10.0, line_capacity),),
        candidate_lines=(),
        thermal_units=(ThermalGen(1, 0.0, 200.0, 10.0, 200.0, "cheap"),
                       ThermalGen(2, 0.0, 200.0, 50.0, 200.0, "expensive")),
        candidate_wind=(),
        loads=(Load(2, 100.0),),
        voll=1000.0,
        curtail_price=0.0,
        reference_bus=1,
        name="synthetic-two-bus"))

def three_bus_system() -> SystemModel:
    """ Three buses in a line, a congested corridor towards the load at bus 3,
    one candidate line relieving it and one candidate wind farm at bus 3. """

    return check_valid(SystemModel(
        buses=(1, 2, 3),
        existing_lines=(Line(1, 2, 10.0, 150.0), Line(2, 3, 10.0, 70.0)),
        candidate_lines=(Line(1, 3, 8.0, 80.0, 4.0e5),),
        thermal_units=(ThermalGen(1, 0.0, 200.0, 20.0, 60.0, "base"),
                       ThermalGen(3, 0.0, 120.0, 90.0, 40.0, "peaker")),
        candidate_wind=(WindFarm(3, 80.0, 5.0e5, "w3"),),
        loads=(Load(2, 50.0), Load(3, 110.0)),
        voll=2000.0,
        curtail_price=0.0,
        reference_bus=1,
        name="synthetic-three-bus"))

def ring_system(n_buses: int, n_candidate_lines: int, n_candidate_wind: int,
                seed: int = 0) -> SystemModel:
    """ A ring of `n_buses` buses with thermal units on every other bus, load
    on every bus, candidate chords across the ring and candidate wind farms.
    Parameters are drawn from a fixed seed so the system is reproducible. """

    if n_buses < 3:
        raise ValueError("A ring needs at least 3 buses")
    rng = np.random.RandomState(seed)
    buses = tuple(range(1, n_buses + 1))
    lines = tuple(Line(b, b % n_buses + 1, float(rng.uniform(5, 15)),
                       float(rng.uniform(60, 120)))
                  for b in buses)
    units = tuple(ThermalGen(b, 0.0, float(rng.uniform(120, 220)),
                             float(15 + 20 * i + rng.uniform(0, 5)),
                             float(rng.uniform(30, 70)), "g{}".format(b))
                  for i, b in enumerate(buses[::2]))
    loads = tuple(Load(b, float(rng.uniform(40, 90))) for b in buses)
    chords = [(b, (b + 1) % n_buses + 1) for b in buses]
    candidate_lines = tuple(Line(fr, to, float(rng.uniform(5, 15)),
                                 float(rng.uniform(50, 100)),
                                 float(rng.uniform(2e5, 8e5)))
                            for fr, to in chords[:n_candidate_lines])
    wind_buses = buses[1::2] + buses[::2]
    candidate_wind = tuple(WindFarm(b, float(rng.uniform(60, 120)),
                                    float(rng.uniform(3e5, 9e5)), "w{}".format(b))
                           for b in wind_buses[:n_candidate_wind])
    return check_valid(SystemModel(
        buses=buses,
        existing_lines=lines,
        candidate_lines=candidate_lines,
        thermal_units=units,
        candidate_wind=candidate_wind,
        loads=loads,
        voll=3000.0,
        curtail_price=0.0,
        reference_bus=1,
        name="synthetic-ring-{}".format(n_buses)))

def five_bus_system(n_candidate_lines: int = 3, n_candidate_wind: int = 3) -> SystemModel:
    return ring_system(5, n_candidate_lines, n_candidate_wind, seed=5)

def six_bus_system(n_candidate_lines: int = 2, n_candidate_wind: int = 2) -> SystemModel:
    return ring_system(6, n_candidate_lines, n_candidate_wind, seed=6)

# Load factors of the days of `peak_shedding_days()`. The unit covers 90% of
# peak demand, so only the four high days shed load.
NORMAL_LOAD_FACTORS = tuple(float(lf) for lf in np.linspace(0.1, 0.5, 26))
PEAK_LOAD_FACTORS = (0.86, 0.88, 0.92, 0.94)

def peak_shedding_system() -> SystemModel:
    """ One bus with a 100 MW peak and a 90 MW unit: daily cost is linear in
    load up to 90 MW and jumps to the lost load price beyond. The only
    candidate is a wind farm too expensive to ever be built. """

    return check_valid(SystemModel(
        buses=(1,),
        existing_lines=(),
        candidate_lines=(),
        thermal_units=(ThermalGen(1, 0.0, 90.0, 10.0, 90.0, "g1"),),
        candidate_wind=(WindFarm(1, 50.0, 1.0e9, "w1"),),
        loads=(Load(1, 100.0),),
        voll=1000.0,
        curtail_price=0.0,
        reference_bus=1,
        name="synthetic-peak-shedding"))

def peak_shedding_days() -> ScenarioSet:
    """ 26 ordinary days followed by 4 high-load days, all with flat profiles
    and no wind. """
    return flat_days_set(NORMAL_LOAD_FACTORS + PEAK_LOAD_FACTORS)
