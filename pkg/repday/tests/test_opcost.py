import numpy as np
import pytest

def flat(load_factor, wind_factor=0.0):
    from repday.datasets.synthetic import flat_day
    return flat_day(load_factor, wind_factor)

def test_single_bus_day(backend):
    from repday.datasets.synthetic import single_bus_system
    from repday.opcost import solve_day
    from repday.sysmodel import empty_decision

    model = single_bus_system()
    dispatch = solve_day(model, empty_decision(model), flat(0.5), backend)
    # 50 MW for 24 hours at 10 per MWh
    assert dispatch.cost == pytest.approx(12000.0, rel=1e-8)
    np.testing.assert_allclose(dispatch.generation, 50.0, atol=1e-6)
    np.testing.assert_allclose(dispatch.shed, 0.0, atol=1e-6)

def test_load_shedding(backend):
    from repday.datasets.synthetic import single_bus_system
    from repday.opcost import solve_day
    from repday.sysmodel import empty_decision

    model = single_bus_system(peak=120.0, p_max=100.0, voll=1000.0)
    dispatch = solve_day(model, empty_decision(model), flat(1.0), backend)
    assert dispatch.cost == pytest.approx(24 * (100 * 10.0 + 20 * 1000.0), rel=1e-8)
    np.testing.assert_allclose(dispatch.shed, 20.0, atol=1e-6)

def test_congested_line(backend):
    from repday.datasets.synthetic import two_bus_system
    from repday.opcost import solve_day
    from repday.sysmodel import empty_decision

    model = two_bus_system(line_capacity=60.0)
    dispatch = solve_day(model, empty_decision(model), flat(1.0), backend)
    # 60 MW over the line at 10 plus 40 MW local at 50
    assert dispatch.cost == pytest.approx(24 * (60 * 10.0 + 40 * 50.0), rel=1e-8)
    np.testing.assert_allclose(dispatch.flows, 60.0, atol=1e-6)
    # Reference bus angle is fixed; the flow sets the other angle
    np.testing.assert_allclose(dispatch.angles[0], 0.0, atol=1e-9)
    np.testing.assert_allclose(dispatch.angles[1], -6.0, atol=1e-6)

def test_ramp_limits(backend):
    from repday.datasets.synthetic import single_bus_system
    from repday.opcost import solve_day
    from repday.sysmodel import empty_decision

    model = single_bus_system(peak=100.0, ramp=20.0, voll=1000.0)
    features = np.concatenate([np.zeros(12), np.full(12, 0.5), np.zeros(24)])
    dispatch = solve_day(model, empty_decision(model), features, backend)
    # The unit climbs 0, 20, 40, 50 from hour 11 so hours 12 and 13 shed
    # 30 and 10 MW.
    np.testing.assert_allclose(dispatch.generation[0, 11:15], [0, 20, 40, 50], atol=1e-6)
    np.testing.assert_allclose(dispatch.shed[0, 12:14], [30, 10], atol=1e-6)
    assert dispatch.cost == pytest.approx(10.0 * (20 + 40 + 50 * 10) + 1000.0 * 40, rel=1e-8)

def test_wind_reduces_cost(backend):
    from repday.datasets.synthetic import single_bus_system
    from repday.opcost import solve_day
    from repday.sysmodel import decision_from_bits

    model = single_bus_system(marginal_cost=50.0, wind_capacity=50.0, wind_cost=1.0e5)
    without = solve_day(model, decision_from_bits(model, [0]), flat(0.5, 0.5), backend)
    built = solve_day(model, decision_from_bits(model, [1]), flat(0.5, 0.5), backend)
    assert without.cost == pytest.approx(24 * 50 * 50.0, rel=1e-8)
    assert built.cost == pytest.approx(24 * 25 * 50.0, rel=1e-8)
    np.testing.assert_allclose(built.wind_output[0], 25.0, atol=1e-6)
    np.testing.assert_allclose(built.curtailed[0], 0.0, atol=1e-6)
    np.testing.assert_allclose(without.wind_output, 0.0)

def test_curtailment(backend):
    from repday.datasets.synthetic import single_bus_system
    from repday.opcost import solve_day
    from repday.sysmodel import decision_from_bits

    model = single_bus_system(wind_capacity=50.0, wind_cost=1.0)
    dispatch = solve_day(model, decision_from_bits(model, [1]), flat(0.2, 1.0), backend)
    # 20 MW of demand against 50 MW of wind
    np.testing.assert_allclose(dispatch.wind_output[0], 20.0, atol=1e-6)
    np.testing.assert_allclose(dispatch.curtailed[0], 30.0, atol=1e-6)
    assert dispatch.cost == pytest.approx(0.0, abs=1e-6)

def test_bus_residuals(backend):
    from repday.datasets.synthetic import three_bus_system
    from repday.opcost import bus_residuals, solve_day
    from repday.sysmodel import decision_from_bits

    model = three_bus_system()
    features = np.concatenate([np.linspace(0.4, 1.0, 24), np.linspace(1.0, 0.0, 24)])
    for bits in ([0, 0], [1, 1]):
        dispatch = solve_day(model, decision_from_bits(model, bits), features, backend)
        assert np.max(np.abs(bus_residuals(model, dispatch))) < 1e-6
        caps = np.array([line.capacity for line in dispatch.lines])[:, None]
        assert np.all(np.abs(dispatch.flows) <= caps + 1e-6)

def test_rhs_shape():
    from repday.datasets.synthetic import single_bus_system
    from repday.exceptions import DimensionMismatchException
    from repday.opcost import DailyLpTemplate
    from repday.sysmodel import empty_decision

    model = single_bus_system()
    template = DailyLpTemplate(model, empty_decision(model))
    with pytest.raises(DimensionMismatchException):
        template.rhs(np.zeros(24))

def test_infeasible_day(backend):
    from repday.exceptions import BackendException
    from repday.opcost import op_cost
    from repday.datasets.synthetic import flat_days_set, single_bus_system
    from repday.sysmodel import ThermalGen, empty_decision

    model = single_bus_system()._replace(
        thermal_units=(ThermalGen(1, 10.0, 100.0, 10.0, 100.0, "must-run"),))
    with pytest.raises(BackendException) as excinfo:
        op_cost(model, empty_decision(model), flat_days_set([0.5, 0.0]), backend)
    assert "days [1]" in str(excinfo.value)

def test_op_cost_weights(backend):
    from repday.datasets.synthetic import flat_day, single_bus_system
    from repday.opcost import op_cost
    from repday.scenario import ScenarioSet
    from repday.sysmodel import empty_decision

    model = single_bus_system()
    reduced = ScenarioSet(ScenarioSet.REDUCED, [3.0, 2.0],
                          [flat_day(0.5), flat_day(0.25)], [[0, 1, 2], [3, 4]])
    result = op_cost(model, empty_decision(model), reduced, backend)
    np.testing.assert_allclose(result.per_entry, [3 * 12000.0, 2 * 6000.0])
    assert result.total == pytest.approx(48000.0)
    assert result.dispatches is None

def test_op_cost_cache(backend):
    from repday.datasets.synthetic import flat_days_set, single_bus_system, two_bus_system
    from repday.exceptions import BackendException
    from repday.opcost import DayCostCache, op_cost
    from repday.sysmodel import empty_decision

    model = single_bus_system()
    days = flat_days_set([0.5, 0.5, 0.25])
    cache = DayCostCache(model)
    first = op_cost(model, empty_decision(model), days, backend, cache)
    assert cache.misses == 3
    assert len(cache) == 2
    second = op_cost(model, empty_decision(model), days, backend, cache)
    assert cache.hits == 3
    assert first.total == second.total

    with pytest.raises(BackendException):
        op_cost(two_bus_system(), empty_decision(two_bus_system()), days, backend, cache)

def test_parallel_matches_sequential(backend):
    from repday.datasets.synthetic import synthetic_full_set, three_bus_system
    from repday.opcost import op_cost
    from repday.sysmodel import decision_from_bits

    model = three_bus_system()
    full = synthetic_full_set(n_days=8, seed=2)
    decision = decision_from_bits(model, [1, 0])
    sequential = op_cost(model, decision, full, backend, jobs=1)
    parallel = op_cost(model, decision, full, backend, jobs=3)
    np.testing.assert_allclose(parallel.per_entry, sequential.per_entry, rtol=1e-9)
    assert parallel.total == pytest.approx(sequential.total, rel=1e-9)

def test_keep_dispatch(backend):
    from repday.datasets.synthetic import flat_days_set, single_bus_system
    from repday.opcost import op_cost
    from repday.sysmodel import empty_decision

    model = single_bus_system()
    result = op_cost(model, empty_decision(model), flat_days_set([0.5, 0.25]), backend,
                     keep_dispatch=True)
    assert len(result.dispatches) == 2
    assert [d.cost for d in result.dispatches] == pytest.approx([12000.0, 6000.0])

def test_per_cluster_costs(backend):
    from repday.clustering import reduced_from_clusters
    from repday.datasets.synthetic import flat_days_set, single_bus_system
    from repday.opcost import per_cluster_costs
    from repday.sysmodel import empty_decision

    model = single_bus_system()
    full = flat_days_set([0.2, 0.4, 0.6, 0.8])
    reduced = reduced_from_clusters(full, [(0, 1), (2, 3)])
    pairs = per_cluster_costs(model, empty_decision(model), full, reduced, backend)
    # Cost is linear in load below the unit's capacity
    assert pairs[0] == pytest.approx((2 * 7200.0, 4800.0 + 9600.0))
    assert pairs[1] == pytest.approx((2 * 16800.0, 14400.0 + 19200.0))

def test_write_dispatch_csv(tmp_path, backend):
    import pandas as pd
    from repday.datasets.synthetic import flat_days_set, two_bus_system
    from repday.opcost import op_cost, write_dispatch_csv
    from repday.sysmodel import empty_decision

    model = two_bus_system()
    days = flat_days_set([1.0, 0.5])
    dispatches = op_cost(model, empty_decision(model), days, backend,
                         keep_dispatch=True).dispatches
    path = tmp_path / "dispatch.csv"
    write_dispatch_csv(path, model, dispatches, days.day_ids())
    table = pd.read_csv(str(path))
    assert list(table.columns) == ["day", "hour", "bus", "gen", "wind", "curtailed",
                                   "shed", "net_import", "demand"]
    assert len(table) == 2 * 24 * 2
    first = table[(table.day == 0) & (table.hour == 0)]
    assert list(first.bus) == [1, 2]
    assert list(first.net_import) == pytest.approx([-60.0, 60.0], abs=1e-6)
    with pytest.raises(ValueError):
        write_dispatch_csv(path, model, [])

def test_matrices_do_not_depend_on_the_day():
    from repday.datasets.synthetic import five_bus_system, synthetic_full_set
    from repday.opcost import build_daily_lp
    from repday.sysmodel import decision_from_bits

    model = five_bus_system()
    decision = decision_from_bits(model, [1, 0, 1, 0, 1, 1])
    days = synthetic_full_set(n_days=3, seed=5).features
    first, *others = [build_daily_lp(model, decision, features) for features in days]
    for other in others:
        for name in ("c", "b_ub", "lb", "ub"):
            np.testing.assert_array_equal(getattr(other, name), getattr(first, name))
        assert (other.a_eq != first.a_eq).nnz == 0
        assert (other.a_ub != first.a_ub).nnz == 0
        assert not np.array_equal(other.b_eq, first.b_eq)

def test_building_wind_never_raises_op_cost(backend):
    import itertools
    from repday.datasets.synthetic import five_bus_system, synthetic_full_set
    from repday.opcost import DayCostCache, op_cost
    from repday.sysmodel import InvestmentDecision

    model = five_bus_system()
    days = synthetic_full_set(n_days=4, seed=0)
    cache = DayCostCache(model)
    n_wind = len(model.candidate_wind)

    def cost(lines, wind):
        return op_cost(model, InvestmentDecision(lines, wind), days, backend,
                       cache=cache).total

    for lines in itertools.product((0, 1), repeat=len(model.candidate_lines)):
        for wind in itertools.product((0, 1), repeat=n_wind):
            for w in range(n_wind):
                if wind[w]:
                    continue
                more = wind[:w] + (1,) + wind[w + 1:]
                assert cost(lines, more) <= cost(lines, wind) + 1e-6 * cost(lines, wind)

def test_building_a_line_can_raise_op_cost(backend):
    from repday.opcost import solve_day
    from repday.sysmodel import (InvestmentDecision, Line, Load, SystemModel, ThermalGen,
                                 check_valid)

    # A cheap unit at bus 1 serves 100 MW at bus 2 over 1-2 and 1-3. The
    # candidate 3-2 closes a loop carrying a third of the import, so its
    # 10 MW limit caps the import at 30 MW.
    model = check_valid(SystemModel(
        buses=(1, 2, 3),
        existing_lines=(Line(1, 2, 10.0, 200.0), Line(1, 3, 10.0, 200.0)),
        candidate_lines=(Line(3, 2, 10.0, 10.0, 1.0e4),),
        thermal_units=(ThermalGen(1, 0.0, 200.0, 10.0, 200.0, "cheap"),
                       ThermalGen(2, 0.0, 200.0, 50.0, 200.0, "expensive")),
        candidate_wind=(),
        loads=(Load(2, 100.0),),
        voll=1000.0,
        curtail_price=0.0,
        reference_bus=1,
        name="synthetic-loop-flow"))

    without = solve_day(model, InvestmentDecision((0,), ()), flat(1.0), backend)
    built = solve_day(model, InvestmentDecision((1,), ()), flat(1.0), backend)
    assert without.cost == pytest.approx(24 * 100 * 10.0, rel=1e-8)
    assert built.cost == pytest.approx(24 * (30 * 10.0 + 70 * 50.0), rel=1e-8)
    np.testing.assert_allclose(built.flows[2], 10.0, atol=1e-6)
