"""Test fixtures setup for pytest

https://docs.pytest.org/en/latest/fixture.html
"""
import pytest

@pytest.fixture
def backend():
    from repday.backend import HighsBackend
    return HighsBackend()

@pytest.fixture
def random_full_set():
    """Fixture for creating full scenario sets of random days. Features are
    drawn uniformly from [0, 1] so ties between distances have probability
    zero."""
    import numpy as np
    from repday.scenario import ScenarioSet
    def _random_full_set(n_days: int, seed: int = 0, n_features: int = 48) -> ScenarioSet:
        rng = np.random.RandomState(seed)
        features = rng.uniform(0, 1, size=(n_days, n_features))
        return ScenarioSet(ScenarioSet.FULL, [1.0] * n_days, features,
                           [[i] for i in range(n_days)])
    return _random_full_set

@pytest.fixture
def peak_case():
    """A single bus system with 26 ordinary days and 4 days that need load
    shedding, whose cost is badly estimated by their mean."""
    from repday.datasets.synthetic import peak_shedding_days, peak_shedding_system
    return peak_shedding_system(), peak_shedding_days()

@pytest.fixture
def write_inputs(tmp_path):
    """Writes a system JSON file and a time series CSV file for CLI tests
    and returns their paths."""
    from repday.datasets import synthetic
    from repday.scenario import write_timeseries_csv
    from repday.sysmodel import save_system
    def _write_inputs(model=None, n_days: int = 20, seed: int = 0):
        model = model if model is not None else synthetic.three_bus_system()
        system_path = tmp_path / "system.json"
        series_path = tmp_path / "timeseries.csv"
        save_system(model, system_path)
        load, wind = synthetic.synthetic_year(n_days, seed, peak_days=2)
        write_timeseries_csv(series_path, load, wind)
        return system_path, series_path
    return _write_inputs
