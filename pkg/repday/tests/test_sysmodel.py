import random

import pytest

def make_system(**changes):
    from repday.datasets.synthetic import three_bus_system
    return three_bus_system()._replace(**changes)

def test_fixtures_are_valid():
    from repday.datasets import synthetic
    from repday.sysmodel import validate

    for model in (synthetic.single_bus_system(), synthetic.two_bus_system(),
                  synthetic.three_bus_system(), synthetic.five_bus_system(),
                  synthetic.six_bus_system(), synthetic.peak_shedding_system()):
        assert validate(model) == [], model.name

def test_self_loop_and_unknown_bus():
    from repday.sysmodel import Line, validate

    model = make_system(existing_lines=(Line(1, 1, 10.0, 100.0),
                                        Line(2, 7, 10.0, 100.0)))
    violations = validate(model)
    assert any("self-loop" in v for v in violations)
    assert any("unknown bus 7" in v for v in violations)

def test_line_parameters():
    from repday.sysmodel import Line, validate

    model = make_system(candidate_lines=(Line(1, 3, 0.0, -5.0, -1.0),))
    violations = validate(model)
    assert any("susceptance" in v for v in violations)
    assert any("capacity" in v for v in violations)
    assert any("investment cost" in v for v in violations)

def test_voll_must_exceed_marginal_costs():
    from repday.sysmodel import validate

    violations = validate(make_system(voll=90.0))
    assert any(v.startswith("voll") for v in violations)

def test_reference_bus():
    from repday.sysmodel import validate

    assert any("reference_bus" in v for v in validate(make_system(reference_bus=9)))

def test_check_valid_lists_all_violations():
    from repday.exceptions import ValidationException
    from repday.sysmodel import check_valid

    with pytest.raises(ValidationException) as excinfo:
        check_valid(make_system(voll=1.0, curtail_price=-1.0))
    assert len(excinfo.value.violations) == 2

def find(parent, i):
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i

def test_islands_match_union_find():
    from repday.sysmodel import Line, Load, SystemModel, ThermalGen, validate

    rng = random.Random(0)
    for _ in range(100):
        n_buses = rng.randint(2, 8)
        buses = tuple(range(1, n_buses + 1))
        pairs = [(a, b) for a in buses for b in buses if a < b]
        chosen = rng.sample(pairs, rng.randint(0, len(pairs)))
        model = SystemModel(
            buses=buses,
            existing_lines=tuple(Line(a, b, 10.0, 50.0) for a, b in chosen),
            candidate_lines=(),
            thermal_units=(ThermalGen(1, 0.0, 100.0, 10.0, 100.0),),
            candidate_wind=(),
            loads=tuple(Load(b, 10.0) for b in buses),
            voll=1000.0,
            curtail_price=0.0,
            reference_bus=1)

        parent = {b: b for b in buses}
        for a, b in chosen:
            parent[find(parent, a)] = find(parent, b)
        expected = [b for b in buses if find(parent, b) != find(parent, 1)]
        islands = [int(v.split(":")[0].split()[1]) for v in validate(model)
                   if "island" in v]
        assert islands == expected

def test_candidate_lines_do_not_connect_islands():
    from repday.sysmodel import Line, validate

    model = make_system(existing_lines=(Line(1, 2, 10.0, 150.0),))
    assert validate(model) == [
        "bus 3: island, not connected to reference bus 1"]

def test_enumerate_decisions():
    from repday.datasets.synthetic import five_bus_system
    from repday.sysmodel import enumerate_decisions

    model = five_bus_system(2, 1)
    decisions = enumerate_decisions(model)
    assert len(decisions) == 8
    assert [d.label for d in decisions] == [
        "000", "001", "010", "011", "100", "101", "110", "111"]
    assert decisions[5].line_built == (1, 0)
    assert decisions[5].wind_built == (1,)

def test_enumeration_limit():
    from repday.datasets.synthetic import five_bus_system
    from repday.exceptions import EnumerationLimitException
    from repday.sysmodel import enumerate_decisions

    with pytest.raises(EnumerationLimitException):
        enumerate_decisions(five_bus_system(3, 3), limit=5)

def test_no_candidates():
    from repday.datasets.synthetic import two_bus_system
    from repday.sysmodel import empty_decision, enumerate_decisions

    model = two_bus_system()
    assert enumerate_decisions(model) == [empty_decision(model)]
    assert empty_decision(model).label == ""

def test_invest_cost_and_describe():
    from repday.sysmodel import decision_from_bits, describe, invest_cost

    model = make_system()
    both = decision_from_bits(model, [1, 1])
    assert invest_cost(model, both) == 4.0e5 + 5.0e5
    assert invest_cost(model, decision_from_bits(model, [0, 0])) == 0.0
    assert describe(model, both) == ["line 1-3 (80 MW)", "wind w3 at bus 3 (80 MW)"]

def test_decision_dimensions():
    from repday.exceptions import DimensionMismatchException, FormatException
    from repday.sysmodel import InvestmentDecision, decision_from_bits, invest_cost

    model = make_system()
    with pytest.raises(DimensionMismatchException):
        decision_from_bits(model, [1, 0, 1])
    with pytest.raises(DimensionMismatchException):
        invest_cost(model, InvestmentDecision((1,), ()))
    with pytest.raises(FormatException):
        decision_from_bits(model, [2, 0])

def test_save_and_load_system(tmp_path):
    from repday.datasets.synthetic import six_bus_system
    from repday.sysmodel import load_system, save_system

    model = six_bus_system()
    path = tmp_path / "system.json"
    save_system(model, path)
    assert load_system(path) == model

def test_load_system_errors(tmp_path):
    from repday.exceptions import FormatException, ValidationException
    from repday.sysmodel import load_system, save_system

    with pytest.raises(FileNotFoundError):
        load_system(tmp_path / "missing.json")

    broken = tmp_path / "broken.json"
    broken.write_text('{"buses": [1]}')
    with pytest.raises(FormatException):
        load_system(broken)

    invalid = tmp_path / "invalid.json"
    save_system(make_system(voll=1.0), invalid)
    with pytest.raises(ValidationException):
        load_system(invalid)
