import numpy as np
import pytest

def test_hourly_series_rejects_partial_days():
    from repday.exceptions import FormatException
    from repday.scenario import hourly_series

    with pytest.raises(FormatException):
        hourly_series("load", [1.0] * 25)
    with pytest.raises(FormatException):
        hourly_series("load", [])

def test_hourly_series_rejects_bad_samples():
    from repday.exceptions import FormatException
    from repday.scenario import hourly_series

    values = [1.0] * 24
    values[3] = -1.0
    with pytest.raises(FormatException):
        hourly_series("load", values)
    values[3] = float("nan")
    with pytest.raises(FormatException):
        hourly_series("load", values)

def test_hourly_series_is_read_only():
    from repday.scenario import hourly_series

    series = hourly_series("wind", np.zeros(48))
    assert series.length == 48
    with pytest.raises(ValueError):
        series.values[0] = 1.0

def test_normalize():
    from repday.scenario import hourly_series, normalize

    series = normalize(hourly_series("load", np.arange(48, dtype=float)))
    assert series.values.max() == 1.0
    assert series.values.min() == 0.0
    assert series.values[24] == pytest.approx(24 / 47)
    # Already scaled factors are left as they are
    np.testing.assert_array_equal(normalize(series).values, series.values)

def test_normalize_all_zero():
    from repday.exceptions import NormalizationException
    from repday.scenario import hourly_series, normalize

    with pytest.raises(NormalizationException):
        normalize(hourly_series("wind", np.zeros(24)))

def test_segment_days():
    from repday.scenario import hourly_series, normalize, segment_days

    load = normalize(hourly_series("load", np.arange(72, dtype=float)))
    wind = hourly_series("wind", np.full(72, 0.5))
    days = segment_days(load, wind)
    assert [day.day_id for day in days] == [0, 1, 2]
    assert all(day.weight == 1.0 for day in days)
    # Day 1 holds hours 24 to 47
    np.testing.assert_allclose(days[1].load_factors, np.arange(24, 48) / 71)
    np.testing.assert_allclose(days[2].wind_factors, np.full(24, 0.5))

def test_segment_days_length_mismatch():
    from repday.exceptions import FormatException
    from repday.scenario import hourly_series, segment_days

    with pytest.raises(FormatException):
        segment_days(hourly_series("load", np.ones(48)),
                     hourly_series("wind", np.ones(24)))

def test_segment_days_needs_factors():
    from repday.exceptions import FormatException
    from repday.scenario import hourly_series, segment_days

    with pytest.raises(FormatException):
        segment_days(hourly_series("load", np.full(24, 2.0)),
                     hourly_series("wind", np.ones(24)))

def test_days_to_series_inverts_segmentation():
    from repday.scenario import days_to_series, hourly_series, segment_days

    load = hourly_series("load", np.linspace(0, 1, 48))
    wind = hourly_series("wind", np.linspace(1, 0, 48))
    load2, wind2 = days_to_series(segment_days(load, wind))
    np.testing.assert_array_equal(load.values, load2.values)
    np.testing.assert_array_equal(wind.values, wind2.values)

def test_full_set():
    from repday.datasets.synthetic import synthetic_full_set
    from repday.scenario import ScenarioSet

    full = synthetic_full_set(n_days=10, seed=1, peak_days=0)
    assert full.kind == ScenarioSet.FULL
    assert len(full) == 10
    assert full.total_weight == 10.0
    assert full.n_features == 48
    assert full.provenance == [frozenset([i]) for i in range(10)]
    assert full.day_index() == {i: i for i in range(10)}

def test_to_full_set_empty():
    from repday.exceptions import EmptyScenarioSetException
    from repday.scenario import to_full_set

    with pytest.raises(EmptyScenarioSetException):
        to_full_set([])

def test_scenario_set_invariants():
    from repday.exceptions import EmptyScenarioSetException, FormatException
    from repday.scenario import ScenarioSet

    with pytest.raises(EmptyScenarioSetException):
        ScenarioSet(ScenarioSet.REDUCED, [], np.zeros((0, 48)), [])
    with pytest.raises(FormatException):
        ScenarioSet(ScenarioSet.REDUCED, [1.0, 0.0], np.zeros((2, 48)), [[0], [1]])
    # Overlapping provenance
    with pytest.raises(FormatException):
        ScenarioSet(ScenarioSet.REDUCED, [2.0, 1.0], np.zeros((2, 48)), [[0, 1], [1]])
    with pytest.raises(FormatException):
        ScenarioSet(ScenarioSet.REDUCED, [1.0], np.zeros((2, 48)), [[0]])
    with pytest.raises(FormatException):
        ScenarioSet("weekly", [1.0], np.zeros((1, 48)), [[0]])

def test_restrict(random_full_set):
    from repday.exceptions import FormatException
    from repday.scenario import ScenarioSet

    full = random_full_set(6)
    subset = full.restrict([4, 1, 2])
    assert subset.day_ids() == [1, 2, 4]
    np.testing.assert_array_equal(subset.features[0], full.features[1])
    np.testing.assert_array_equal(subset.features[2], full.features[4])
    with pytest.raises(FormatException):
        full.restrict([7])

    reduced = ScenarioSet(ScenarioSet.REDUCED, [6.0], full.features[:1], [range(6)])
    with pytest.raises(FormatException):
        reduced.restrict([0])

def test_save_and_load(tmp_path, random_full_set):
    from repday.scenario import ScenarioSet

    full = random_full_set(4)
    path = tmp_path / "full_set.json"
    full.save(path)
    loaded = ScenarioSet.load(path)
    assert loaded.kind == full.kind
    np.testing.assert_array_equal(loaded.features, full.features)
    assert loaded.provenance == full.provenance

def test_malformed_document():
    from repday.exceptions import FormatException
    from repday.scenario import ScenarioSet

    with pytest.raises(FormatException):
        ScenarioSet.from_json({"kind": "full", "provenance": [[0]]})
    with pytest.raises(FormatException):
        ScenarioSet.from_json({"kind": "full", "provenance": [[0]],
                               "entries": [{"weight": 1.0, "features": ["x", 0.5]}]})

def test_load_full_set_from_csv(tmp_path):
    from repday.scenario import hourly_series, load_full_set, write_timeseries_csv

    path = tmp_path / "timeseries.csv"
    load = hourly_series("load", 500.0 + 100.0 * np.sin(np.arange(72)))
    wind = hourly_series("wind", np.linspace(0.0, 30.0, 72))
    write_timeseries_csv(path, load, wind)

    full = load_full_set(path)
    assert len(full) == 3
    assert full.features[:, :24].max() == pytest.approx(1.0)
    assert full.features[:, 24:].max() == pytest.approx(1.0)
    assert full.features[0, 24] == 0.0

def test_read_timeseries_csv_errors(tmp_path):
    from repday.exceptions import FormatException
    from repday.scenario import read_timeseries_csv

    with pytest.raises(FileNotFoundError):
        read_timeseries_csv(tmp_path / "missing.csv")

    no_wind = tmp_path / "no_wind.csv"
    no_wind.write_text("hour,load\n" + "".join("{},1\n".format(h) for h in range(24)))
    with pytest.raises(FormatException):
        read_timeseries_csv(no_wind)

    gap = tmp_path / "gap.csv"
    gap.write_text("hour,load,wind\n"
                   + "".join("{},1,0\n".format(h) for h in range(25) if h != 5))
    with pytest.raises(FormatException):
        read_timeseries_csv(gap)
