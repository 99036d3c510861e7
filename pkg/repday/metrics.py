"""
Error metrics of planning on representative days.

With x* the decision planned on the full set and x_hat the decision planned
on a reduced set:

    simplification error   C_tot(x_hat, reduced) - C_tot(x*, full)
    decision error         C_tot(x_hat, full) - C_tot(x*, full)
    op. estimation error   C_op(x, reduced) - C_op(x, full), for a given x

The decision error equals the simplification error minus the operational
estimation error of x_hat. With mean-based representatives the operational
estimation error is never positive, which bounds the decision error by
-C_op estimation error of x_hat without knowing x*.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Optional, Tuple, Union

import numpy as np

from . import config
from . import utils
from .backend import LpBackend
from .clustering import assigned_features, check_provenance
from .config import ENCODING
from .exceptions import FormatException, ReferenceUnavailableException
from .opcost import DayCostCache, op_cost, per_cluster_costs
from .scenario import ScenarioSet
from .solve import PlanResult, evaluate_fixed
from .sysmodel import InvestmentDecision, SystemModel

logger = logging.getLogger(__name__) # type: ignore

GENERAL_BOUND = "general_bound"
PRACTICAL_BOUND = "practical_bound"
ESTIMATION_CHAIN = "estimation_chain"
UNDER_ESTIMATION = "under_estimation"
IDENTITY = "identity"

class BoundVerdict(NamedTuple):
    """ The outcome of checking one bound.

    Attributes:
        name: Which bound.
        evaluable: False when the report lacks the quantities needed.
        passed: Whether the bound holds within tolerance; None if not
            evaluable.
        margin: The smallest slack over the inequalities of the bound.
            Negative values mean violation.
        bound: For the decision error bounds, the upper bound value itself.
    """
    name: str
    evaluable: bool
    passed: Optional[bool] = None
    margin: Optional[float] = None
    bound: Optional[float] = None

class ErrorReport(NamedTuple):
    """ All errors of one planning run on a reduced set.

    Costs are in currency per year. `per_rd_errors` and `per_day_errors` are
    for the approximate decision; `per_rd_errors_ref` is for the reference
    decision. Fields that need the reference plan are None without one.
    """
    decision: str
    reduced_total: float
    full_total: float
    op_estimation_error: float
    per_rd_errors: List[Tuple[int, float]]
    rd_weights: List[float]
    per_day_errors: List[Tuple[int, float]]
    per_day_ts_errors: List[Tuple[int, float]]
    reference_decision: Optional[str] = None
    reference_total: Optional[float] = None
    simplification_error: Optional[float] = None
    decision_error: Optional[float] = None
    op_estimation_error_ref: Optional[float] = None
    per_rd_errors_ref: Optional[List[Tuple[int, float]]] = None
    normalizer: Optional[float] = None
    bound_verdicts: Optional[Dict[str, BoundVerdict]] = None

    @property
    def rd_count(self) -> int:
        return len(self.per_rd_errors)

    def to_json(self) -> Dict[str, Any]:
        doc = self._asdict()
        doc["per_rd_errors"] = [list(pair) for pair in self.per_rd_errors]
        doc["per_day_errors"] = [list(pair) for pair in self.per_day_errors]
        doc["per_day_ts_errors"] = [list(pair) for pair in self.per_day_ts_errors]
        if self.per_rd_errors_ref is not None:
            doc["per_rd_errors_ref"] = [list(pair) for pair in self.per_rd_errors_ref]
        if self.bound_verdicts is not None:
            doc["bound_verdicts"] = {name: verdict._asdict()
                                     for name, verdict in self.bound_verdicts.items()}
        return dict(doc)

    @classmethod
    def from_json(cls, doc: Dict[str, Any]) -> "ErrorReport":
        def pairs(key: str) -> Optional[List[Tuple[int, float]]]:
            if doc.get(key) is None:
                return None
            return [(int(k), float(value)) for k, value in doc[key]]

        try:
            verdicts = doc.get("bound_verdicts")
            fields = dict(doc)
            for key in ("per_rd_errors", "per_day_errors", "per_day_ts_errors",
                        "per_rd_errors_ref"):
                fields[key] = pairs(key)
            if verdicts is not None:
                fields["bound_verdicts"] = {name: BoundVerdict(**verdict)
                                            for name, verdict in verdicts.items()}
            return cls(**fields)
        except (KeyError, TypeError) as err:
            raise FormatException("Malformed error report: {}".format(err))

    def save(self, path: Union[str, Path]) -> None:
        with Path(path).open("w", encoding=ENCODING) as f:
            json.dump(self.to_json(), f, indent=1, sort_keys=True)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ErrorReport":
        with Path(path).open(encoding=ENCODING) as f:
            return cls.from_json(json.load(f))

def simplification_error(reduced_plan: PlanResult, reference_plan: PlanResult) -> float:
    """ Optimal total on the reduced set minus optimal total on the full set.
    Negative values are legitimate but say little about decision quality. """

    error = reduced_plan.total_cost - reference_plan.total_cost
    if error < 0:
        logger.warning("Negative simplification error %g: the reduced model"
                       " under-estimates the full-scale optimum", error)
    return error

def decision_error(model: SystemModel, decision: InvestmentDecision,
                   reference_plan: Optional[PlanResult], full: ScenarioSet,
                   backend: Optional[LpBackend] = None,
                   cache: Optional[DayCostCache] = None,
                   jobs: int = config.JOBS) -> float:
    """ Total cost of `decision` on the full set minus the reference optimum.

    Raises:
        repday.exceptions.ReferenceUnavailableException: If there is no
            reference plan.
    """

    if reference_plan is None:
        raise ReferenceUnavailableException(
            "The decision error needs the reference solution; run the reference command")
    error = evaluate_fixed(model, decision, full, backend, cache, jobs) \
        - reference_plan.total_cost
    if error < -utils.tolerance(reference_plan.total_cost):
        logger.error("Decision %s beats the reference by %g; the reference is"
                     " not optimal for these inputs", decision.label, -error)
    return error

def op_estimation_error(model: SystemModel, decision: InvestmentDecision,
                        full: ScenarioSet, reduced: ScenarioSet,
                        backend: Optional[LpBackend] = None,
                        cache: Optional[DayCostCache] = None,
                        jobs: int = config.JOBS) -> float:
    """ Operational cost of `decision` on `reduced` minus that on `full`. """

    cache = cache if cache is not None else DayCostCache(model)
    reduced_op = op_cost(model, decision, reduced, backend, cache, jobs).total
    full_op = op_cost(model, decision, full, backend, cache, jobs).total
    return reduced_op - full_op

def per_rd_errors(model: SystemModel, decision: InvestmentDecision,
                  full: ScenarioSet, reduced: ScenarioSet,
                  backend: Optional[LpBackend] = None,
                  cache: Optional[DayCostCache] = None,
                  jobs: int = config.JOBS) -> List[Tuple[int, float]]:
    """ The operational estimation error attributed to each representative
    day: its weighted cost minus the summed weighted costs of its member days.
    """

    pairs = per_cluster_costs(model, decision, full, reduced, backend, cache, jobs)
    return [(k, rd - members) for k, (rd, members) in enumerate(pairs)]

def per_day_errors(model: SystemModel, decision: InvestmentDecision,
                   full: ScenarioSet, reduced: ScenarioSet,
                   backend: Optional[LpBackend] = None,
                   cache: Optional[DayCostCache] = None,
                   jobs: int = config.JOBS) -> List[Tuple[int, float]]:
    """ For each original day d in representative k, w_d times the daily cost
    of k minus w_d times the daily cost of d. Summing over the members of k
    gives the error of k. """

    check_provenance(full, reduced)
    cache = cache if cache is not None else DayCostCache(model)
    rd_result = op_cost(model, decision, reduced, backend, cache, jobs)
    day_result = op_cost(model, decision, full, backend, cache, jobs)
    rd_daily = rd_result.per_entry / reduced.weights
    rd_of_day = reduced.day_index()
    full_index = full.day_index()
    errors = []
    for day_id in full.day_ids():
        i = full_index[day_id]
        weight = float(full.weights[i])
        errors.append((day_id, weight * float(rd_daily[rd_of_day[day_id]])
                       - float(day_result.per_entry[i])))
    return errors

def ts_errors(full: ScenarioSet, reduced: ScenarioSet) -> List[Tuple[int, float]]:
    """ Euclidean distance between each original day and its representative. """

    return [(day_id, float(np.linalg.norm(day - rd)))
            for day_id, day, rd in assigned_features(full, reduced)]

def _verdict(name: str, slacks: List[float], tol: float,
             bound: Optional[float] = None) -> BoundVerdict:
    margin = min(slacks)
    return BoundVerdict(name, True, bool(margin >= -tol), margin, bound)

def check_bounds(report: ErrorReport, rel_tol: float = config.REL_TOL,
                 abs_floor: float = config.ABS_FLOOR) -> Dict[str, BoundVerdict]:
    """ Checks the error bounds that the report's fields allow.

    general_bound: 0 <= decision error <= est. error(x*) - est. error(x_hat)
    practical_bound: 0 <= decision error <= -est. error(x_hat)
    estimation_chain: est. error(x_hat) <= est. error(x*) <= 0
    under_estimation: est. error(x_hat) <= 0
    identity: decision error = simplification error - est. error(x_hat)

    Tolerances are relative to the normalizer, or to the full-set total of
    the approximate decision when there is no reference. Bounds whose inputs
    are missing are returned as not evaluable.
    """

    scale = report.normalizer if report.normalizer is not None else report.full_total
    tol = utils.tolerance(scale, rel_tol, abs_floor)
    op_err = report.op_estimation_error
    dec_err = report.decision_error
    op_err_ref = report.op_estimation_error_ref
    verdicts = {} # type: Dict[str, BoundVerdict]

    verdicts[UNDER_ESTIMATION] = _verdict(UNDER_ESTIMATION, [-op_err], tol)
    if dec_err is not None:
        verdicts[PRACTICAL_BOUND] = _verdict(
            PRACTICAL_BOUND, [dec_err, -op_err - dec_err], tol, -op_err)
    else:
        verdicts[PRACTICAL_BOUND] = BoundVerdict(PRACTICAL_BOUND, False, bound=-op_err)
    if dec_err is not None and op_err_ref is not None:
        verdicts[GENERAL_BOUND] = _verdict(
            GENERAL_BOUND, [dec_err, op_err_ref - op_err - dec_err], tol,
            op_err_ref - op_err)
    else:
        verdicts[GENERAL_BOUND] = BoundVerdict(GENERAL_BOUND, False)
    if op_err_ref is not None:
        verdicts[ESTIMATION_CHAIN] = _verdict(
            ESTIMATION_CHAIN, [op_err_ref - op_err, -op_err_ref], tol)
    else:
        verdicts[ESTIMATION_CHAIN] = BoundVerdict(ESTIMATION_CHAIN, False)
    if dec_err is not None and report.simplification_error is not None:
        residual = abs(dec_err - (report.simplification_error - op_err))
        verdicts[IDENTITY] = _verdict(IDENTITY, [-residual], tol)
    else:
        verdicts[IDENTITY] = BoundVerdict(IDENTITY, False)

    for verdict in verdicts.values():
        if verdict.passed is False:
            logger.warning("Bound %s violated with margin %g (tolerance %g)",
                           verdict.name, verdict.margin, tol)
    return verdicts

def build_report(model: SystemModel, full: ScenarioSet, reduced: ScenarioSet,
                 reduced_plan: PlanResult,
                 reference_plan: Optional[PlanResult] = None,
                 backend: Optional[LpBackend] = None,
                 cache: Optional[DayCostCache] = None,
                 jobs: int = config.JOBS) -> ErrorReport:
    """ Computes every error of a reduced-set plan, with bound verdicts.

    Args:
        model: The system.
        full: The full-scale scenario set.
        reduced: The reduced set that `reduced_plan` was planned on.
        reduced_plan: The approximate plan.
        reference_plan: The plan on `full`, when available.
    """

    check_provenance(full, reduced)
    cache = cache if cache is not None else DayCostCache(model)
    x_hat = reduced_plan.decision
    rd_errors = per_rd_errors(model, x_hat, full, reduced, backend, cache, jobs)
    full_op = op_cost(model, x_hat, full, backend, cache, jobs).total
    full_total = reduced_plan.invest_cost + full_op
    op_err = reduced_plan.op_cost - full_op

    fields = dict(
        decision=x_hat.label,
        reduced_total=reduced_plan.total_cost,
        full_total=full_total,
        op_estimation_error=op_err,
        per_rd_errors=rd_errors,
        rd_weights=[float(w) for w in reduced.weights],
        per_day_errors=per_day_errors(model, x_hat, full, reduced, backend, cache, jobs),
        per_day_ts_errors=ts_errors(full, reduced)) # type: Dict[str, Any]

    if reference_plan is not None:
        x_star = reference_plan.decision
        fields.update(
            reference_decision=x_star.label,
            reference_total=reference_plan.total_cost,
            simplification_error=simplification_error(reduced_plan, reference_plan),
            decision_error=full_total - reference_plan.total_cost,
            op_estimation_error_ref=op_estimation_error(
                model, x_star, full, reduced, backend, cache, jobs),
            per_rd_errors_ref=per_rd_errors(model, x_star, full, reduced,
                                            backend, cache, jobs),
            normalizer=reference_plan.total_cost)

    report = ErrorReport(**fields)
    report = report._replace(bound_verdicts=check_bounds(report))
    logger.info("Errors with %d representatives: estimation %g, decision %s",
                report.rd_count, op_err,
                "n/a" if report.decision_error is None else "{:g}".format(report.decision_error))
    return report

def normalized(report: ErrorReport) -> Dict[str, Optional[float]]:
    """ The three errors divided by the full-scale optimum, or None where the
    error or the normalizer is unavailable. """

    def scale(value: Optional[float]) -> Optional[float]:
        if value is None or not report.normalizer:
            return None
        return value / report.normalizer

    return {"simplification_error": scale(report.simplification_error),
            "decision_error": scale(report.decision_error),
            "op_estimation_error": scale(report.op_estimation_error),
            "op_estimation_error_ref": scale(report.op_estimation_error_ref)}

def worst_days(report: ErrorReport, n: int) -> List[Tuple[int, float]]:
    """ The `n` original days with the largest absolute operational
    estimation error, largest first. """

    ranked = sorted(report.per_day_errors, key=lambda pair: (-abs(pair[1]), pair[0]))
    return ranked[:n]

def imbalance(report: ErrorReport) -> float:
    """ Largest over median absolute per-representative error; inf when the
    median is zero and some error is not. """

    errors = np.abs([error for _, error in report.per_rd_errors])
    largest = float(np.max(errors))
    median = float(np.median(errors))
    if median == 0:
        return float("inf") if largest > 0 else 1.0
    return largest / median
