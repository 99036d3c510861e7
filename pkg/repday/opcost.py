"""
The daily DC optimal power flow subproblem for a fixed investment decision,
and the weighted operational cost of a scenario set.

For a fixed system and decision the daily LP has the same constraint matrices
on every day; a day's load and wind factors only enter the right-hand sides.
`DailyLpTemplate` builds the matrices once and stamps out one `LpInstance`
per day.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.sparse import coo_matrix

from . import config
from . import utils
from .backend import OPTIMAL, LpBackend, LpInstance, default_backend
from .clustering import check_provenance
from .config import HOURS_PER_DAY
from .exceptions import BackendException, DimensionMismatchException
from .scenario import ScenarioSet
from .sysmodel import InvestmentDecision, Line, SystemModel, check_dimensions

logger = logging.getLogger(__name__) # type: ignore

class DailyDispatch(NamedTuple):
    """ The optimal operation of one day.

    All arrays have one column per hour. Wind arrays have one row per
    candidate wind farm, with zeros for farms that are not built; flow rows
    follow `lines`, the lines in service.
    """
    generation: np.ndarray
    wind_output: np.ndarray
    curtailed: np.ndarray
    angles: np.ndarray
    flows: np.ndarray
    shed: np.ndarray
    demand: np.ndarray
    lines: Tuple[Line, ...]
    cost: float

class OpCostResult(NamedTuple):
    """ Weighted operational cost of a scenario set. `per_entry[k]` is the
    weight of entry k times its daily optimum. """
    total: float
    per_entry: np.ndarray
    dispatches: Optional[List[DailyDispatch]] = None

class DailyLpTemplate:
    """ The constraint structure of the daily LP for one (system, decision)
    pair.

    Variables per hour: generation per thermal unit, wind output and
    curtailment per built wind farm, voltage angle and shed load per bus, and
    flow per line in service (existing lines plus built candidates).
    """

    def __init__(self, model: SystemModel, decision: InvestmentDecision) -> None:
        check_dimensions(model, decision)
        self.model = model
        self.decision = decision
        self.lines = model.existing_lines + tuple(
            line for line, built in zip(model.candidate_lines, decision.line_built)
            if built)
        self.farms = [w for w, built in enumerate(decision.wind_built) if built]
        self.peaks = model.bus_peaks()
        self.farm_capacity = np.array(
            [model.candidate_wind[w].capacity for w in self.farms])

        T = HOURS_PER_DAY
        n_units = len(model.thermal_units)
        n_farms = len(self.farms)
        n_buses = len(model.buses)
        n_lines = len(self.lines)
        self.off_gen = 0
        self.off_wind = self.off_gen + n_units * T
        self.off_curt = self.off_wind + n_farms * T
        self.off_theta = self.off_curt + n_farms * T
        self.off_flow = self.off_theta + n_buses * T
        self.off_shed = self.off_flow + n_lines * T
        self.n_variables = self.off_shed + n_buses * T

        self._build_equalities()
        self._build_inequalities()
        self._build_bounds_and_costs()

    def _build_equalities(self) -> None:
        model = self.model
        T = HOURS_PER_DAY
        bus_index = model.bus_index()
        n_buses = len(model.buses)
        rows = [] # type: List[int]
        cols = [] # type: List[int]
        vals = [] # type: List[float]

        def put(row: int, col: int, val: float) -> None:
            rows.append(row)
            cols.append(col)
            vals.append(val)

        # Bus balance rows come first, then wind rows, then flow rows.
        for t in range(T):
            for g, unit in enumerate(model.thermal_units):
                put(bus_index[unit.bus] * T + t, self.off_gen + g * T + t, 1.0)
            for f, w in enumerate(self.farms):
                put(bus_index[model.candidate_wind[w].bus] * T + t,
                    self.off_wind + f * T + t, 1.0)
            for l, line in enumerate(self.lines):
                put(bus_index[line.to_bus] * T + t, self.off_flow + l * T + t, 1.0)
                put(bus_index[line.from_bus] * T + t, self.off_flow + l * T + t, -1.0)
            for b in range(n_buses):
                put(b * T + t, self.off_shed + b * T + t, 1.0)

        wind_row = n_buses * T
        for f in range(len(self.farms)):
            for t in range(T):
                put(wind_row + f * T + t, self.off_wind + f * T + t, 1.0)
                put(wind_row + f * T + t, self.off_curt + f * T + t, 1.0)

        flow_row = wind_row + len(self.farms) * T
        for l, line in enumerate(self.lines):
            fr = bus_index[line.from_bus]
            to = bus_index[line.to_bus]
            for t in range(T):
                row = flow_row + l * T + t
                put(row, self.off_flow + l * T + t, 1.0)
                put(row, self.off_theta + fr * T + t, -line.susceptance)
                put(row, self.off_theta + to * T + t, line.susceptance)

        n_rows = flow_row + len(self.lines) * T
        self.a_eq = coo_matrix((vals, (rows, cols)),
                               shape=(n_rows, self.n_variables)).tocsr()

    def _build_inequalities(self) -> None:
        T = HOURS_PER_DAY
        rows = [] # type: List[int]
        cols = [] # type: List[int]
        vals = [] # type: List[float]
        rhs = [] # type: List[float]
        row = 0
        for g, unit in enumerate(self.model.thermal_units):
            for t in range(1, T):
                now = self.off_gen + g * T + t
                for sign in (1.0, -1.0):
                    rows.extend((row, row))
                    cols.extend((now, now - 1))
                    vals.extend((sign, -sign))
                    rhs.append(unit.ramp)
                    row += 1
        self.a_ub = coo_matrix((vals, (rows, cols)),
                               shape=(row, self.n_variables)).tocsr()
        self.b_ub = np.array(rhs, dtype=float)

    def _build_bounds_and_costs(self) -> None:
        model = self.model
        T = HOURS_PER_DAY
        lb = np.zeros(self.n_variables)
        ub = np.full(self.n_variables, np.inf)
        c = np.zeros(self.n_variables)
        for g, unit in enumerate(model.thermal_units):
            span = slice(self.off_gen + g * T, self.off_gen + (g + 1) * T)
            lb[span] = unit.p_min
            ub[span] = unit.p_max
            c[span] = unit.marginal_cost
        c[self.off_curt:self.off_theta] = model.curtail_price
        lb[self.off_theta:self.off_flow] = -np.inf
        ref = model.bus_index()[model.reference_bus]
        ref_span = slice(self.off_theta + ref * T, self.off_theta + (ref + 1) * T)
        lb[ref_span] = 0.0
        ub[ref_span] = 0.0
        for l, line in enumerate(self.lines):
            span = slice(self.off_flow + l * T, self.off_flow + (l + 1) * T)
            lb[span] = -line.capacity
            ub[span] = line.capacity
        c[self.off_shed:] = model.voll
        self.lb = lb
        self.ub = ub
        self.c = c

    def rhs(self, features: np.ndarray) -> np.ndarray:
        """ Equality right-hand side for a day's 48 factors. """

        T = HOURS_PER_DAY
        if features.shape != (2 * T,):
            raise DimensionMismatchException(
                "Expected {} daily features, got shape {}".format(2 * T, features.shape))
        load, wind = features[:T], features[T:]
        balance = np.outer(self.peaks, load).ravel()
        farms = np.outer(self.farm_capacity, wind).ravel()
        flows = np.zeros(len(self.lines) * T)
        return np.concatenate([balance, farms, flows])

    def instance(self, features: np.ndarray) -> LpInstance:
        return LpInstance(self.c, self.a_ub, self.b_ub, self.a_eq,
                          self.rhs(np.asarray(features, dtype=float)),
                          self.lb, self.ub)

    def dispatch(self, x: np.ndarray, features: np.ndarray, cost: float) -> DailyDispatch:
        """ Unpacks an LP solution into a `DailyDispatch`. """

        T = HOURS_PER_DAY
        model = self.model
        n_buses = len(model.buses)
        n_candidates = len(model.candidate_wind)
        wind = np.zeros((n_candidates, T))
        curt = np.zeros((n_candidates, T))
        for f, w in enumerate(self.farms):
            wind[w] = x[self.off_wind + f * T:self.off_wind + (f + 1) * T]
            curt[w] = x[self.off_curt + f * T:self.off_curt + (f + 1) * T]
        return DailyDispatch(
            generation=x[self.off_gen:self.off_wind].reshape(-1, T),
            wind_output=wind,
            curtailed=curt,
            angles=x[self.off_theta:self.off_flow].reshape(n_buses, T),
            flows=x[self.off_flow:self.off_shed].reshape(len(self.lines), T),
            shed=x[self.off_shed:].reshape(n_buses, T),
            demand=np.outer(self.peaks, features[:T]),
            lines=self.lines,
            cost=cost)

def build_daily_lp(model: SystemModel, decision: InvestmentDecision,
                   features: np.ndarray) -> LpInstance:
    """ The daily DC-OPF LP of `model` under `decision` for one day's 24 load
    factors followed by 24 wind factors. """
    return DailyLpTemplate(model, decision).instance(features)

def bus_residuals(model: SystemModel, dispatch: DailyDispatch) -> np.ndarray:
    """ Generation + wind + net import + shed - demand per bus and hour. """

    bus_index = model.bus_index()
    supply = dispatch.shed - dispatch.demand
    for g, unit in enumerate(model.thermal_units):
        supply[bus_index[unit.bus]] += dispatch.generation[g]
    for w, farm in enumerate(model.candidate_wind):
        supply[bus_index[farm.bus]] += dispatch.wind_output[w]
    for l, line in enumerate(dispatch.lines):
        supply[bus_index[line.to_bus]] += dispatch.flows[l]
        supply[bus_index[line.from_bus]] -= dispatch.flows[l]
    return supply

def check_dispatch(model: SystemModel, dispatch: DailyDispatch,
                   tol: float = config.MW_TOL) -> None:
    """ Checks power balance and flow limits of a dispatch.

    Raises:
        repday.exceptions.BackendException: If a residual exceeds `tol` MW.
    """

    balance = float(np.max(np.abs(bus_residuals(model, dispatch)), initial=0.0))
    if balance > tol:
        raise BackendException("Power balance residual of {:g} MW".format(balance))
    caps = np.array([line.capacity for line in dispatch.lines]).reshape(-1, 1)
    overload = float(np.max(np.abs(dispatch.flows) - caps, initial=-np.inf))
    if overload > tol:
        raise BackendException("Line flow exceeds capacity by {:g} MW".format(overload))
    for name in ("generation", "wind_output", "curtailed", "shed"):
        if np.any(getattr(dispatch, name) < -tol):
            raise BackendException("Negative {} in dispatch".format(name))

def _solve(template: DailyLpTemplate, features: np.ndarray, backend: LpBackend,
           context: str) -> Tuple[float, np.ndarray]:
    solution = backend.solve(template.instance(features))
    if solution.status != OPTIMAL or solution.x is None:
        logger.error("Daily LP for %s ended %s: %s", context, solution.status,
                     solution.message)
        raise BackendException("Daily LP ended {}: {}".format(
            solution.status, solution.message), context)
    return solution.objective, solution.x

def solve_day(model: SystemModel, decision: InvestmentDecision,
              features: np.ndarray, backend: Optional[LpBackend] = None,
              template: Optional[DailyLpTemplate] = None) -> DailyDispatch:
    """ Solves one day and checks the residuals of the optimal dispatch. """

    backend = backend or default_backend()
    template = template or DailyLpTemplate(model, decision)
    features = np.asarray(features, dtype=float)
    cost, x = _solve(template, features, backend, "decision " + decision.label)
    dispatch = template.dispatch(x, features, cost)
    check_dispatch(model, dispatch)
    return dispatch

class DayCostCache:
    """ Optimal daily costs of one system, keyed by decision bits and the
    exact bytes of the day's features. """

    def __init__(self, model: SystemModel) -> None:
        self.model = model
        self._costs = {} # type: Dict[Tuple[Tuple[int, ...], bytes], float]
        self.hits = 0
        self.misses = 0

    def __len__(self) -> int:
        return len(self._costs)

    def __repr__(self) -> str:
        return "DayCostCache(entries={}, hits={}, misses={})".format(
            len(self), self.hits, self.misses)

    @staticmethod
    def key(decision: InvestmentDecision,
            features: np.ndarray) -> Tuple[Tuple[int, ...], bytes]:
        return decision.bits, np.ascontiguousarray(features, dtype=float).tobytes()

    def get(self, decision: InvestmentDecision, features: np.ndarray) -> Optional[float]:
        cost = self._costs.get(self.key(decision, features))
        if cost is None:
            self.misses += 1
        else:
            self.hits += 1
        return cost

    def put(self, decision: InvestmentDecision, features: np.ndarray, cost: float) -> None:
        self._costs[self.key(decision, features)] = cost

    def serves(self, model: SystemModel) -> bool:
        return self.model is model or self.model == model

def _entry_costs(model: SystemModel, decision: InvestmentDecision,
                 rows: np.ndarray, backend: LpBackend) -> List[float]:
    """ Unweighted optima of a batch of days. Runs in worker processes. """
    template = DailyLpTemplate(model, decision)
    return [_solve(template, features, backend, "decision " + decision.label)[0]
            for features in rows]

def op_cost(model: SystemModel, decision: InvestmentDecision,
            scenarios: ScenarioSet, backend: Optional[LpBackend] = None,
            cache: Optional[DayCostCache] = None, jobs: int = config.JOBS,
            keep_dispatch: bool = False) -> OpCostResult:
    """ The weighted operational cost of a scenario set under a fixed
    decision. Each entry is solved independently.

    Args:
        model: The system.
        decision: The investment decision, fixed.
        scenarios: A full or reduced scenario set.
        backend: The LP backend; HiGHS by default.
        cache: Optional cache of daily optima, shared between calls.
        jobs: Number of worker processes used for entries not in the cache.
        keep_dispatch: Whether to solve every entry afresh and return the
            dispatches too.

    Raises:
        repday.exceptions.BackendException: If a day cannot be solved to
            optimality; the context names the entry and its days.
    """

    backend = backend or default_backend()
    if cache is not None and not cache.serves(model):
        raise BackendException("Day cost cache belongs to a different system")
    n_entries = len(scenarios)
    costs = np.full(n_entries, np.nan)
    dispatches = None # type: Optional[List[DailyDispatch]]

    if keep_dispatch:
        template = DailyLpTemplate(model, decision)
        dispatches = []
        for k, (_, features) in enumerate(scenarios.entries()):
            try:
                dispatch = solve_day(model, decision, features, backend, template)
            except BackendException as err:
                raise BackendException(str(err), _entry_context(scenarios, k))
            dispatches.append(dispatch)
            costs[k] = dispatch.cost
    else:
        pending = [] # type: List[int]
        for k in range(n_entries):
            cached = cache.get(decision, scenarios.features[k]) if cache is not None else None
            if cached is None:
                pending.append(k)
            else:
                costs[k] = cached
        if pending:
            for k, cost in zip(pending, _solve_pending(model, decision, scenarios,
                                                       pending, backend, jobs)):
                costs[k] = cost
                if cache is not None:
                    cache.put(decision, scenarios.features[k], cost)

    per_entry = scenarios.weights * costs
    per_entry.setflags(write=False)
    # Sum in entry order so totals are reproducible across job counts.
    total = 0.0
    for value in per_entry:
        total += float(value)
    logger.debug("Operational cost of decision %s on %d entries: %g",
                 decision.label or "-", n_entries, total)
    return OpCostResult(total, per_entry, dispatches)

def _entry_context(scenarios: ScenarioSet, k: int) -> str:
    return "entry {} representing days {}".format(k, sorted(scenarios.provenance[k]))

def _solve_pending(model: SystemModel, decision: InvestmentDecision,
                   scenarios: ScenarioSet, pending: Sequence[int],
                   backend: LpBackend, jobs: int) -> List[float]:
    if jobs <= 1 or len(pending) < 2:
        template = DailyLpTemplate(model, decision)
        return [_solve(template, scenarios.features[k], backend,
                       _entry_context(scenarios, k))[0]
                for k in pending]

    batch_size = max(1, -(-len(pending) // jobs))
    batches = list(utils.make_batches(list(pending), batch_size))
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        futures = [executor.submit(_entry_costs, model, decision,
                                   scenarios.features[batch], backend)
                   for batch in batches]
        results = []
        for batch, future in zip(batches, futures):
            try:
                results.extend(future.result())
            except BackendException as err:
                raise BackendException(
                    str(err), "one of entries {}".format([int(k) for k in batch]))
    return results

def per_cluster_costs(model: SystemModel, decision: InvestmentDecision,
                      full: ScenarioSet, reduced: ScenarioSet,
                      backend: Optional[LpBackend] = None,
                      cache: Optional[DayCostCache] = None,
                      jobs: int = config.JOBS) -> List[Tuple[float, float]]:
    """ For each representative day k, the pair (weight_k * cost of the
    representative, sum over member days of weight_d * cost of day d).

    Raises:
        repday.exceptions.ProvenanceException: If the provenance of `reduced`
            does not partition the days of `full`.
    """

    check_provenance(full, reduced)
    cache = cache if cache is not None else DayCostCache(model)
    rd_costs = op_cost(model, decision, reduced, backend, cache, jobs).per_entry
    day_costs = op_cost(model, decision, full, backend, cache, jobs).per_entry
    full_index = full.day_index()
    pairs = []
    for k, members in enumerate(reduced.provenance):
        member_sum = 0.0
        for day_id in sorted(members):
            member_sum += float(day_costs[full_index[day_id]])
        pairs.append((float(rd_costs[k]), member_sum))
    return pairs

def write_dispatch_csv(path: Union[str, Path], model: SystemModel,
                       dispatches: Sequence[DailyDispatch],
                       day_ids: Optional[Sequence[int]] = None) -> None:
    """ Writes one row per (day, hour, bus) with the bus totals of generation,
    wind, curtailment, shed load, net import and demand. """

    if not dispatches:
        raise ValueError("No dispatches to write")
    bus_index = model.bus_index()
    n_buses = len(model.buses)
    frames = []
    for d, dispatch in enumerate(dispatches):
        gen = np.zeros((n_buses, HOURS_PER_DAY))
        wind = np.zeros_like(gen)
        curt = np.zeros_like(gen)
        imports = np.zeros_like(gen)
        for g, unit in enumerate(model.thermal_units):
            gen[bus_index[unit.bus]] += dispatch.generation[g]
        for w, farm in enumerate(model.candidate_wind):
            wind[bus_index[farm.bus]] += dispatch.wind_output[w]
            curt[bus_index[farm.bus]] += dispatch.curtailed[w]
        for l, line in enumerate(dispatch.lines):
            imports[bus_index[line.to_bus]] += dispatch.flows[l]
            imports[bus_index[line.from_bus]] -= dispatch.flows[l]
        hours, buses = np.meshgrid(np.arange(HOURS_PER_DAY), np.arange(n_buses))
        frames.append(pd.DataFrame({
            "day": day_ids[d] if day_ids is not None else d,
            "hour": hours.ravel(),
            "bus": np.array(model.buses)[buses.ravel()],
            "gen": gen.ravel(),
            "wind": wind.ravel(),
            "curtailed": curt.ravel(),
            "shed": dispatch.shed.ravel(),
            "net_import": imports.ravel(),
            "demand": dispatch.demand.ravel()}))
    table = pd.concat(frames, ignore_index=True)
    table = table.sort_values(["day", "hour", "bus"], kind="mergesort")
    table.to_csv(str(path), index=False, encoding=config.ENCODING)
