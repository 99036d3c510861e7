"""
The power system data model: buses, existing and candidate lines, thermal
units, candidate wind farms, loads and penalty prices, along with the binary
investment decisions over the candidate assets.
"""

import itertools
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Sequence, Tuple, Union

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import config
from .config import ENCODING
from .exceptions import (DimensionMismatchException, EnumerationLimitException,
                         FormatException, ValidationException)

logger = logging.getLogger(__name__) # type: ignore

class Line(NamedTuple):
    """ A transmission line. `invest_cost` is annualized and only meaningful
    for candidate lines. Susceptance is in p.u. and capacity in MW. """
    from_bus: int
    to_bus: int
    susceptance: float
    capacity: float
    invest_cost: float = 0.0

class ThermalGen(NamedTuple):
    """ A dispatchable thermal unit with intra-day ramp limits (MW/h). """
    bus: int
    p_min: float
    p_max: float
    marginal_cost: float
    ramp: float
    name: str = ""

class WindFarm(NamedTuple):
    bus: int
    capacity: float
    invest_cost: float
    name: str = ""

Load = NamedTuple("Load", [("bus", int), ("peak", float)])
Load.__doc__ = (
    """ Demand at a bus. Hourly demand is `peak` times the system-wide load
    factor of the hour. """)

class SystemModel(NamedTuple):
    """ An immutable description of the system being planned.

    Attributes:
        buses: Bus ids.
        existing_lines: Lines that are always in service.
        candidate_lines: Lines that may be built, each with its annualized
            investment cost.
        thermal_units: Thermal generators.
        candidate_wind: Wind farms that may be built.
        loads: Bus peak demands in MW.
        voll: Value of lost load, the price of shed demand per MWh.
        curtail_price: Price per MWh of curtailed wind.
        reference_bus: The bus whose voltage angle is fixed at 0.
        name: Optional label, carried into reports.
    """
    buses: Tuple[int, ...]
    existing_lines: Tuple[Line, ...]
    candidate_lines: Tuple[Line, ...]
    thermal_units: Tuple[ThermalGen, ...]
    candidate_wind: Tuple[WindFarm, ...]
    loads: Tuple[Load, ...]
    voll: float
    curtail_price: float
    reference_bus: int
    name: str = ""

    @property
    def n_candidates(self) -> int:
        return len(self.candidate_lines) + len(self.candidate_wind)

    def bus_index(self) -> Dict[int, int]:
        return {bus: i for i, bus in enumerate(self.buses)}

    def bus_peaks(self) -> np.ndarray:
        """ Peak demand per bus, in the order of `buses`. """
        index = self.bus_index()
        peaks = np.zeros(len(self.buses))
        for load in self.loads:
            peaks[index[load.bus]] += load.peak
        return peaks

class InvestmentDecision(NamedTuple):
    """ A binary build decision per candidate line and candidate wind farm. """
    line_built: Tuple[int, ...]
    wind_built: Tuple[int, ...]

    @property
    def bits(self) -> Tuple[int, ...]:
        """ The line bits followed by the wind bits. """
        return tuple(self.line_built) + tuple(self.wind_built)

    @property
    def label(self) -> str:
        """ The bits as a string such as "0110"; empty for no candidates. """
        return "".join(str(bit) for bit in self.bits)

    @classmethod
    def from_bits(cls, bits: Sequence[int], n_lines: int) -> "InvestmentDecision":
        bits = tuple(int(bit) for bit in bits)
        if any(bit not in (0, 1) for bit in bits):
            raise FormatException("Decision bits must be 0 or 1, got {}".format(bits))
        if n_lines > len(bits):
            raise DimensionMismatchException(
                "{} bits cannot cover {} candidate lines".format(len(bits), n_lines))
        return cls(bits[:n_lines], bits[n_lines:])

def empty_decision(model: SystemModel) -> InvestmentDecision:
    """ The decision that builds nothing. """
    return InvestmentDecision((0,) * len(model.candidate_lines),
                              (0,) * len(model.candidate_wind))

def decision_from_bits(model: SystemModel, bits: Sequence[int]) -> InvestmentDecision:
    """ Splits a bit vector into a decision for `model`, checking its length. """

    if len(bits) != model.n_candidates:
        raise DimensionMismatchException(
            "Decision has {} bits but the system has {} candidates".format(
                len(bits), model.n_candidates))
    return InvestmentDecision.from_bits(bits, len(model.candidate_lines))

def check_dimensions(model: SystemModel, decision: InvestmentDecision) -> None:
    if (len(decision.line_built) != len(model.candidate_lines)
            or len(decision.wind_built) != len(model.candidate_wind)):
        raise DimensionMismatchException(
            "Decision with {} line and {} wind bits does not fit a system with"
            " {} candidate lines and {} candidate wind farms".format(
                len(decision.line_built), len(decision.wind_built),
                len(model.candidate_lines), len(model.candidate_wind)))

def validate(model: SystemModel) -> List[str]:
    """ Checks a system model against its invariants.

    Returns:
        A list with one message per violation; an empty list means the model
        is valid.
    """

    violations = [] # type: List[str]
    known = set(model.buses)
    if len(known) != len(model.buses):
        violations.append("buses: duplicate bus ids")

    def check_bus(where: str, bus: int) -> None:
        if bus not in known:
            violations.append("{}: unknown bus {}".format(where, bus))

    for kind, lines in (("line", model.existing_lines),
                        ("candidate_line", model.candidate_lines)):
        for i, line in enumerate(lines):
            where = "{} {} ({}-{})".format(kind, i, line.from_bus, line.to_bus)
            if line.from_bus == line.to_bus:
                violations.append("{}: self-loop".format(where))
            check_bus(where, line.from_bus)
            check_bus(where, line.to_bus)
            if not line.susceptance > 0:
                violations.append("{}: susceptance must be positive".format(where))
            if not line.capacity > 0:
                violations.append("{}: capacity must be positive".format(where))
            if line.invest_cost < 0:
                violations.append("{}: negative investment cost".format(where))

    for i, unit in enumerate(model.thermal_units):
        where = "thermal {} ({})".format(i, unit.name or unit.bus)
        check_bus(where, unit.bus)
        if not 0 <= unit.p_min <= unit.p_max:
            violations.append("{}: needs 0 <= p_min <= p_max".format(where))
        if not unit.ramp > 0:
            violations.append("{}: ramp must be positive".format(where))
        if unit.marginal_cost < 0:
            violations.append("{}: negative marginal cost".format(where))

    for i, farm in enumerate(model.candidate_wind):
        where = "candidate_wind {} ({})".format(i, farm.name or farm.bus)
        check_bus(where, farm.bus)
        if not farm.capacity > 0:
            violations.append("{}: capacity must be positive".format(where))
        if farm.invest_cost < 0:
            violations.append("{}: negative investment cost".format(where))

    for i, load in enumerate(model.loads):
        check_bus("load {}".format(i), load.bus)
        if load.peak < 0:
            violations.append("load {} (bus {}): negative peak".format(i, load.bus))

    check_bus("reference_bus", model.reference_bus)
    if model.curtail_price < 0:
        violations.append("curtail_price: must be non-negative")
    max_cost = max((unit.marginal_cost for unit in model.thermal_units), default=0.0)
    if not model.voll > max_cost:
        violations.append(
            "voll: {} must exceed the largest marginal cost {}".format(model.voll, max_cost))

    # Connectivity is only meaningful once every line references known buses.
    if not any("unknown bus" in violation for violation in violations):
        violations.extend(_island_violations(model))
    return violations

def _island_violations(model: SystemModel) -> List[str]:
    """ Buses with load or generation that the existing lines do not connect
    to the reference bus. """

    index = model.bus_index()
    n_buses = len(model.buses)
    rows = [index[line.from_bus] for line in model.existing_lines]
    cols = [index[line.to_bus] for line in model.existing_lines]
    graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n_buses, n_buses))
    _, labels = connected_components(graph, directed=False)

    active = set(load.bus for load in model.loads if load.peak > 0)
    active |= set(unit.bus for unit in model.thermal_units if unit.p_max > 0)
    active |= set(farm.bus for farm in model.candidate_wind)
    ref_label = labels[index[model.reference_bus]]
    return ["bus {}: island, not connected to reference bus {}".format(
                bus, model.reference_bus)
            for bus in sorted(active) if labels[index[bus]] != ref_label]

def check_valid(model: SystemModel) -> SystemModel:
    """ Returns the model if it is valid.

    Raises:
        repday.exceptions.ValidationException: Listing every violation.
    """

    violations = validate(model)
    if violations:
        for violation in violations:
            logger.error("Invalid system: %s", violation)
        raise ValidationException(violations)
    if sum(unit.p_min for unit in model.thermal_units) > 0:
        logger.warning("Thermal units with p_min > 0 may make hours with low"
                       " load infeasible; shedding cannot absorb surplus output")
    return model

def invest_cost(model: SystemModel, decision: InvestmentDecision) -> float:
    """ Annualized investment cost of the assets built by `decision`. """

    check_dimensions(model, decision)
    total = 0.0
    for line, built in zip(model.candidate_lines, decision.line_built):
        if built:
            total += line.invest_cost
    for farm, built in zip(model.candidate_wind, decision.wind_built):
        if built:
            total += farm.invest_cost
    return total

def enumerate_decisions(model: SystemModel,
                        limit: int = config.ENUM_LIMIT) -> List[InvestmentDecision]:
    """ All 2^n investment decisions over the n candidates, in lexicographic
    order of their bit vectors.

    Raises:
        repday.exceptions.EnumerationLimitException: If n exceeds `limit`.
    """

    n_candidates = model.n_candidates
    if n_candidates > limit:
        raise EnumerationLimitException(
            "The system has {} candidates, above the enumeration limit of {}."
            " Raise it with --enum-limit.".format(n_candidates, limit))
    n_lines = len(model.candidate_lines)
    return [InvestmentDecision.from_bits(bits, n_lines)
            for bits in itertools.product((0, 1), repeat=n_candidates)]

def describe(model: SystemModel, decision: InvestmentDecision) -> List[str]:
    """ Human-readable names of the assets built by `decision`. """

    check_dimensions(model, decision)
    built = [] # type: List[str]
    for line, bit in zip(model.candidate_lines, decision.line_built):
        if bit:
            built.append("line {}-{} ({:g} MW)".format(
                line.from_bus, line.to_bus, line.capacity))
    for farm, bit in zip(model.candidate_wind, decision.wind_built):
        if bit:
            built.append("wind {}at bus {} ({:g} MW)".format(
                farm.name + " " if farm.name else "", farm.bus, farm.capacity))
    return built

def _line_to_json(line: Line) -> Dict[str, Any]:
    return {"from": line.from_bus, "to": line.to_bus,
            "susceptance": line.susceptance, "capacity": line.capacity,
            "invest_cost": line.invest_cost}

def _line_from_json(doc: Dict[str, Any]) -> Line:
    return Line(int(doc["from"]), int(doc["to"]), float(doc["susceptance"]),
                float(doc["capacity"]), float(doc.get("invest_cost", 0.0)))

def system_to_json(model: SystemModel) -> Dict[str, Any]:
    return {"name": model.name,
            "buses": list(model.buses),
            "lines": [_line_to_json(line) for line in model.existing_lines],
            "candidate_lines": [_line_to_json(line) for line in model.candidate_lines],
            "thermal": [unit._asdict() for unit in model.thermal_units],
            "candidate_wind": [farm._asdict() for farm in model.candidate_wind],
            "loads": [load._asdict() for load in model.loads],
            "voll": model.voll,
            "curtail_price": model.curtail_price,
            "reference_bus": model.reference_bus}

def system_from_json(doc: Dict[str, Any]) -> SystemModel:
    try:
        return SystemModel(
            buses=tuple(int(bus) for bus in doc["buses"]),
            existing_lines=tuple(_line_from_json(line) for line in doc["lines"]),
            candidate_lines=tuple(_line_from_json(line)
                                  for line in doc.get("candidate_lines", [])),
            thermal_units=tuple(
                ThermalGen(int(unit["bus"]), float(unit.get("p_min", 0.0)),
                           float(unit["p_max"]), float(unit["marginal_cost"]),
                           float(unit["ramp"]), str(unit.get("name", "")))
                for unit in doc["thermal"]),
            candidate_wind=tuple(
                WindFarm(int(farm["bus"]), float(farm["capacity"]),
                         float(farm["invest_cost"]), str(farm.get("name", "")))
                for farm in doc.get("candidate_wind", [])),
            loads=tuple(Load(int(load["bus"]), float(load["peak"]))
                        for load in doc["loads"]),
            voll=float(doc["voll"]),
            curtail_price=float(doc.get("curtail_price", 0.0)),
            reference_bus=int(doc["reference_bus"]),
            name=str(doc.get("name", "")))
    except (KeyError, TypeError, ValueError) as err:
        raise FormatException("Malformed system document: {!r}".format(err))

def load_system(path: Union[str, Path]) -> SystemModel:
    """ Reads a system JSON file and validates it.

    Raises:
        FileNotFoundError: If the file does not exist.
        repday.exceptions.FormatException: If a required key is missing.
        repday.exceptions.ValidationException: If the model is invalid.
    """

    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError("System file {} does not exist".format(path))
    with path.open(encoding=ENCODING) as f:
        try:
            doc = json.load(f)
        except ValueError as err:
            raise FormatException("{} is not valid JSON: {}".format(path, err))
    model = check_valid(system_from_json(doc))
    logger.info("Loaded system %s: %d buses, %d candidates",
                model.name or path.name, len(model.buses), model.n_candidates)
    return model

def save_system(model: SystemModel, path: Union[str, Path]) -> None:
    with Path(path).open("w", encoding=ENCODING) as f:
        json.dump(system_to_json(model), f, indent=1, sort_keys=True)
