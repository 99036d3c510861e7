"""
Investment planning by exhaustive enumeration of binary investment
decisions, each evaluated through the daily operational LPs.
"""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Optional, Union

import numpy as np
import pandas as pd

from . import config
from .backend import LpBackend, default_backend
from .config import ENCODING
from .exceptions import BackendException, FormatException
from .opcost import DayCostCache, op_cost
from .scenario import ScenarioSet
from .sysmodel import (InvestmentDecision, SystemModel, check_dimensions,
                       enumerate_decisions, invest_cost, system_to_json)

logger = logging.getLogger(__name__) # type: ignore

REFERENCE = "reference"
APPROXIMATE = "approximate"

TraceRow = NamedTuple("TraceRow", [("decision", str),
                                   ("invest", float),
                                   ("op", float),
                                   ("total", float),
                                   ("pruned", bool)])
TraceRow.__doc__ = (
    """ The evaluation of one decision during planning. Pruned decisions were
    skipped because their investment cost alone reached the best total, so
    their `op` and `total` are NaN. """)

class PlanResult(NamedTuple):
    """ The optimal decision on a scenario set and its costs.

    Attributes:
        decision: The minimizing investment decision.
        total_cost: Investment plus operational cost on the set planned over.
        invest_cost: Annualized investment cost of `decision`.
        op_cost: Weighted operational cost of `decision` on the set.
        label: "reference" for plans on the full set, "approximate" for plans
            on a reduced set.
        trace: Every decision visited, in enumeration order, when requested.
    """
    decision: InvestmentDecision
    total_cost: float
    invest_cost: float
    op_cost: float
    label: str = APPROXIMATE
    trace: Optional[List[TraceRow]] = None

    def to_json(self) -> Dict[str, Any]:
        return {"decision": list(self.decision.bits),
                "n_lines": len(self.decision.line_built),
                "total_cost": self.total_cost,
                "invest_cost": self.invest_cost,
                "op_cost": self.op_cost,
                "label": self.label}

    @classmethod
    def from_json(cls, doc: Dict[str, Any]) -> "PlanResult":
        try:
            decision = InvestmentDecision.from_bits(doc["decision"], doc["n_lines"])
            return cls(decision, float(doc["total_cost"]), float(doc["invest_cost"]),
                       float(doc["op_cost"]), str(doc.get("label", APPROXIMATE)))
        except (KeyError, TypeError) as err:
            raise FormatException("Malformed plan document: {}".format(err))

def save_plan(result: PlanResult, path: Union[str, Path], **extra: Any) -> None:
    """ Writes a plan as JSON, with any extra keys given. """
    doc = result.to_json()
    doc.update(extra)
    with Path(path).open("w", encoding=ENCODING) as f:
        json.dump(doc, f, indent=1, sort_keys=True)

def load_plan(path: Union[str, Path]) -> PlanResult:
    with Path(path).open(encoding=ENCODING) as f:
        return PlanResult.from_json(json.load(f))

def write_trace_csv(path: Union[str, Path], result: PlanResult) -> None:
    """ Writes the decision trace of a plan with columns
    decision, invest, op, total, pruned. """

    if result.trace is None:
        raise ValueError("Plan was computed without keep_trace")
    frame = pd.DataFrame(result.trace, columns=TraceRow._fields)
    frame.to_csv(str(path), index=False, encoding=ENCODING)

def plan(model: SystemModel, scenarios: ScenarioSet,
         backend: Optional[LpBackend] = None,
         cache: Optional[DayCostCache] = None,
         jobs: int = config.JOBS,
         limit: int = config.ENUM_LIMIT,
         prune: bool = True,
         keep_trace: bool = False,
         label: str = APPROXIMATE) -> PlanResult:
    """ Finds the investment decision minimizing investment plus weighted
    operational cost over `scenarios`.

    Decisions are visited in lexicographic order and a decision only replaces
    the incumbent when its total is strictly smaller, so ties go to the
    lexicographically smallest decision. With `prune`, decisions whose
    investment cost alone reaches the incumbent total are skipped; operational
    costs are non-negative so this never changes the result.

    Raises:
        repday.exceptions.EnumerationLimitException: If the system has more
            candidates than `limit`.
        repday.exceptions.BackendException: If a daily LP fails; the context
            names the decision.
    """

    backend = backend or default_backend()
    cache = cache if cache is not None else DayCostCache(model)
    decisions = enumerate_decisions(model, limit)
    trace = [] # type: List[TraceRow]
    best = None # type: Optional[PlanResult]
    n_pruned = 0

    for decision in decisions:
        inv = invest_cost(model, decision)
        if prune and best is not None and inv >= best.total_cost:
            n_pruned += 1
            if keep_trace:
                trace.append(TraceRow(decision.label, inv, np.nan, np.nan, True))
            continue
        try:
            op = op_cost(model, decision, scenarios, backend, cache, jobs).total
        except BackendException as err:
            raise BackendException(str(err), "decision {}".format(decision.label or "-"))
        total = inv + op
        if keep_trace:
            trace.append(TraceRow(decision.label, inv, op, total, False))
        if best is None or total < best.total_cost:
            best = PlanResult(decision, total, inv, op, label)

    assert best is not None
    logger.info("Planned over %d %s entries: decision %s, total %g"
                " (%d of %d decisions pruned)", len(scenarios), scenarios.kind,
                best.decision.label or "-", best.total_cost, n_pruned, len(decisions))
    if keep_trace:
        best = best._replace(trace=trace)
    return best

def evaluate_fixed(model: SystemModel, decision: InvestmentDecision,
                   full: ScenarioSet, backend: Optional[LpBackend] = None,
                   cache: Optional[DayCostCache] = None,
                   jobs: int = config.JOBS) -> float:
    """ Investment cost of `decision` plus its operational cost on `full`. """

    check_dimensions(model, decision)
    return evaluate_decision(model, decision, full, backend, cache, jobs).total_cost

def evaluate_decision(model: SystemModel, decision: InvestmentDecision,
                      scenarios: ScenarioSet, backend: Optional[LpBackend] = None,
                      cache: Optional[DayCostCache] = None,
                      jobs: int = config.JOBS) -> PlanResult:
    """ Like `evaluate_fixed()` but keeps the cost breakdown. """

    inv = invest_cost(model, decision)
    op = op_cost(model, decision, scenarios, backend, cache, jobs).total
    return PlanResult(decision, inv + op, inv, op, "evaluation")

def fingerprint(model: SystemModel, scenarios: ScenarioSet) -> str:
    """ A digest identifying a system together with a scenario set. """

    doc = {"system": system_to_json(model), "scenarios": scenarios.to_json()}
    text = json.dumps(doc, sort_keys=True)
    return hashlib.sha256(text.encode(ENCODING)).hexdigest()

def reference_solution(model: SystemModel, full: ScenarioSet,
                       run_dir: Optional[Path] = None,
                       backend: Optional[LpBackend] = None,
                       cache: Optional[DayCostCache] = None,
                       jobs: int = config.JOBS,
                       limit: int = config.ENUM_LIMIT) -> PlanResult:
    """ Plans on the full-scale set. When `run_dir` is given the result is
    cached there as reference.json and reused while the system and set are
    unchanged. """

    if full.kind != ScenarioSet.FULL:
        raise FormatException("The reference solution needs the full scenario set")
    digest = fingerprint(model, full)
    path = Path(run_dir) / "reference.json" if run_dir is not None else None
    if path is not None and path.is_file():
        with path.open(encoding=ENCODING) as f:
            doc = json.load(f)
        if doc.get("fingerprint") == digest:
            logger.info("Reference solution cache hit: %s", path)
            return PlanResult.from_json(doc)._replace(label=REFERENCE)
        logger.info("Cached reference at %s is for other inputs; recomputing", path)

    result = plan(model, full, backend, cache, jobs, limit, label=REFERENCE)
    if path is not None:
        save_plan(result, path, fingerprint=digest)
    return result
