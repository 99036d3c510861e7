import numpy as np
import pytest

def test_synthetic_year():
    from repday.datasets.synthetic import synthetic_year

    load, wind = synthetic_year(n_days=365, seed=0)
    assert load.length == wind.length == 365 * 24
    assert load.values.min() > 0
    assert 0 <= wind.values.min() and wind.values.max() <= 1

def test_synthetic_year_is_reproducible():
    from repday.datasets.synthetic import synthetic_year

    first = synthetic_year(n_days=30, seed=4)
    second = synthetic_year(n_days=30, seed=4)
    other = synthetic_year(n_days=30, seed=5)
    np.testing.assert_array_equal(first[0].values, second[0].values)
    assert not np.array_equal(first[0].values, other[0].values)

def test_peak_days_are_raised_winter_days():
    from repday.datasets.synthetic import synthetic_year

    # Load noise is drawn before the peak days are chosen, so the two years
    # differ only on the raised days.
    plain, _ = synthetic_year(n_days=365, seed=1, peak_days=0)
    raised, _ = synthetic_year(n_days=365, seed=1, peak_days=4)
    ratio = (raised.values / plain.values).reshape(365, 24)
    np.testing.assert_allclose(ratio, ratio[:, :1] * np.ones((1, 24)))
    raised_days = np.flatnonzero(ratio[:, 0] > 1.0 + 1e-9)
    assert len(raised_days) == 4
    np.testing.assert_allclose(ratio[raised_days, 0], 1.3)
    # All in winter
    assert all(day < 90 or day > 300 for day in raised_days)

def test_synthetic_full_set():
    from repday.datasets.synthetic import synthetic_full_set

    full = synthetic_full_set(n_days=20, seed=3)
    assert len(full) == 20
    assert full.features.max() == pytest.approx(1.0)

def test_flat_days_set():
    from repday.datasets.synthetic import flat_days_set

    days = flat_days_set([0.25, 0.5], [1.0, 0.0])
    np.testing.assert_array_equal(days.features[0], [0.25] * 24 + [1.0] * 24)
    np.testing.assert_array_equal(days.features[1], [0.5] * 24 + [0.0] * 24)

def test_ring_systems():
    from repday.datasets.synthetic import five_bus_system, ring_system, six_bus_system

    five = five_bus_system()
    assert len(five.buses) == 5
    assert five.n_candidates == 6
    assert six_bus_system().n_candidates == 4
    assert five_bus_system() == five
    assert all(model.name.startswith("synthetic-")
               for model in (five, six_bus_system()))
    with pytest.raises(ValueError):
        ring_system(2, 0, 0)

def test_peak_shedding_days():
    from repday.datasets.synthetic import (NORMAL_LOAD_FACTORS, PEAK_LOAD_FACTORS,
                                           peak_shedding_days)

    days = peak_shedding_days()
    assert len(days) == len(NORMAL_LOAD_FACTORS) + len(PEAK_LOAD_FACTORS) == 30
    np.testing.assert_allclose(days.features[26:, 0], PEAK_LOAD_FACTORS)
