"""
Feedback re-clustering: plan on a small set of representative days, locate
the representatives whose operational cost is worst estimated, re-cluster
their member days into more representatives and plan again.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import pandas as pd

from . import config
from .backend import LpBackend
from .clustering import agglomerate, recluster_subset, reduced_from_clusters
from .config import ENCODING
from .exceptions import FeedbackConfigurationException, FormatException
from .metrics import PRACTICAL_BOUND, ErrorReport, build_report, normalized
from .opcost import DayCostCache
from .scenario import ScenarioSet
from .solve import PlanResult, plan
from .sysmodel import SystemModel

logger = logging.getLogger(__name__) # type: ignore

class FeedbackConfig(NamedTuple):
    """ Parameters of the feedback loop.

    Attributes:
        n0: Number of representative days clustered initially.
        n_loop: Number of refinement loops.
        n_step: Representatives added per loop.
        n_bad: Worst representatives replaced per loop.
    """
    n0: int
    n_loop: int
    n_step: int = 1
    n_bad: int = 1

    @property
    def final_count(self) -> int:
        return self.n0 + self.n_loop * self.n_step

    def validate(self, n_days: int) -> None:
        """
        Raises:
            repday.exceptions.FeedbackConfigurationException: If a count is
                not a positive integer (n_loop may be 0) or the final count
                exceeds `n_days`.
        """

        for name in ("n0", "n_step", "n_bad"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise FeedbackConfigurationException(
                    "{} must be a positive integer, got {!r}".format(name, value))
        if not isinstance(self.n_loop, int) or self.n_loop < 0:
            raise FeedbackConfigurationException(
                "n_loop must be a non-negative integer, got {!r}".format(self.n_loop))
        if self.n0 > n_days:
            raise FeedbackConfigurationException(
                "n0 = {} exceeds the {} days available".format(self.n0, n_days))
        if self.final_count > n_days:
            raise FeedbackConfigurationException(
                "The loop would end with {} representatives but only {} days"
                " exist".format(self.final_count, n_days))

class FeedbackRecord(NamedTuple):
    """ One planning round of the loop. `replaced` lists the positions of the
    representatives that were refined after this round; it is empty for the
    last round. """
    loop: int
    plan: PlanResult
    report: ErrorReport
    replaced: List[int]

    @property
    def rd_count(self) -> int:
        return self.report.rd_count

    @property
    def practical_bound_passed(self) -> Optional[bool]:
        verdict = (self.report.bound_verdicts or {}).get(PRACTICAL_BOUND)
        return None if verdict is None else verdict.passed

    def to_json(self) -> Dict[str, Any]:
        return {"loop": self.loop,
                "rd_count": self.rd_count,
                "plan": self.plan.to_json(),
                "report": self.report.to_json(),
                "normalized": normalized(self.report),
                "practical_bound_passed": self.practical_bound_passed,
                "replaced_rds": list(self.replaced)}

    @classmethod
    def from_json(cls, doc: Dict[str, Any]) -> "FeedbackRecord":
        return cls(int(doc["loop"]), PlanResult.from_json(doc["plan"]),
                   ErrorReport.from_json(doc["report"]),
                   [int(k) for k in doc["replaced_rds"]])

class FeedbackTrace:
    """ The records of a feedback run, one per planning round. """

    def __init__(self, cfg: FeedbackConfig, records: Sequence[FeedbackRecord]) -> None:
        self.cfg = cfg
        self.records = list(records)

    def __len__(self) -> int:
        return len(self.records)

    def __repr__(self) -> str:
        return "FeedbackTrace(cfg={}, rd_counts={})".format(
            self.cfg, [record.rd_count for record in self.records])

    @property
    def final(self) -> FeedbackRecord:
        return self.records[-1]

    def to_json(self) -> Dict[str, Any]:
        return {"config": self.cfg._asdict(),
                "records": [record.to_json() for record in self.records]}

    @classmethod
    def from_json(cls, doc: Dict[str, Any]) -> "FeedbackTrace":
        try:
            return cls(FeedbackConfig(**doc["config"]),
                       [FeedbackRecord.from_json(record) for record in doc["records"]])
        except (KeyError, TypeError) as err:
            raise FormatException("Malformed feedback trace: {}".format(err))

    def save(self, path: Union[str, Path]) -> None:
        with Path(path).open("w", encoding=ENCODING) as f:
            json.dump(self.to_json(), f, indent=1, sort_keys=True)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "FeedbackTrace":
        with Path(path).open(encoding=ENCODING) as f:
            return cls.from_json(json.load(f))

    def table(self) -> pd.DataFrame:
        rows = []
        for record in self.records:
            rows.append({"rd_count": record.rd_count,
                         "total_reduced": record.report.reduced_total,
                         "total_full": record.report.full_total,
                         "op_err": record.report.op_estimation_error,
                         "decision_err": record.report.decision_error,
                         "replaced_rds": " ".join(str(k) for k in record.replaced)})
        return pd.DataFrame(rows, columns=["rd_count", "total_reduced", "total_full",
                                           "op_err", "decision_err", "replaced_rds"])

    def write_csv(self, path: Union[str, Path]) -> None:
        """ Writes trace.csv: one row per round with the representative count,
        both totals of the approximate decision, its errors and the
        representatives replaced. """
        self.table().to_csv(str(path), index=False, encoding=ENCODING, na_rep="N/A")

def rank_representatives(report: ErrorReport, sizes: Sequence[int]) -> List[int]:
    """ Orders representatives from worst to best: by absolute estimation
    error, then by larger weight, then by smaller index. Single-day clusters
    cannot be split and come after all others. """

    errors = dict(report.per_rd_errors)
    return sorted(range(report.rd_count),
                  key=lambda k: (sizes[k] < 2, -abs(errors[k]),
                                 -report.rd_weights[k], k))

def _splice(groups: List[Tuple[int, ...]], positions: Sequence[int],
            new_groups: Sequence[Tuple[int, ...]]) -> List[Tuple[int, ...]]:
    """ Puts the first len(positions) new groups at the replaced positions,
    in ascending order, and appends the rest. """

    spliced = list(groups)
    for position, group in zip(sorted(positions), new_groups):
        spliced[position] = group
    spliced.extend(new_groups[len(positions):])
    return spliced

def run_feedback(model: SystemModel, full: ScenarioSet, cfg: FeedbackConfig,
                 reference_plan: Optional[PlanResult] = None,
                 backend: Optional[LpBackend] = None,
                 cache: Optional[DayCostCache] = None,
                 jobs: int = config.JOBS,
                 limit: int = config.ENUM_LIMIT) -> Tuple[ScenarioSet, FeedbackTrace]:
    """ Runs the feedback re-clustering loop.

    Each round plans on the current representatives, evaluates the decision
    on the full set and attributes the estimation error to representatives.
    Unless it is the last round, the `n_bad` worst representatives are then
    removed, their days pooled and clustered into `n_bad + n_step` new
    representatives, which are spliced in.

    Args:
        model: The system.
        full: The full-scale scenario set.
        cfg: Loop parameters.
        reference_plan: The full-scale plan, if known; adds decision errors
            and the full set of bound verdicts to every round.

    Returns:
        The final reduced set and the trace of all `n_loop + 1` rounds.

    Raises:
        repday.exceptions.FeedbackConfigurationException: If the counts are
            invalid, naming the loop where that shows.
    """

    cfg.validate(len(full))
    cache = cache if cache is not None else DayCostCache(model)
    partition = agglomerate(full, cfg.n0)
    groups = [cluster.member_day_ids for cluster in partition.clusters]
    reduced = reduced_from_clusters(full, groups)
    records = [] # type: List[FeedbackRecord]

    for loop in range(cfg.n_loop + 1):
        approx = plan(model, reduced, backend, cache, jobs, limit)
        report = build_report(model, full, reduced, approx, reference_plan,
                              backend, cache, jobs)
        logger.info("Feedback loop %d: %d representatives, estimation error %g",
                    loop, len(groups), report.op_estimation_error)
        if loop == cfg.n_loop:
            records.append(FeedbackRecord(loop, approx, report, []))
            break

        if cfg.n_bad > len(groups):
            raise FeedbackConfigurationException(
                "Loop {}: cannot refine {} of {} representatives".format(
                    loop, cfg.n_bad, len(groups)))
        ranked = rank_representatives(report, [len(group) for group in groups])
        worst = sorted(ranked[:cfg.n_bad])
        pool = [day_id for k in worst for day_id in groups[k]]
        n_new = cfg.n_bad + cfg.n_step
        if len(pool) < n_new:
            raise FeedbackConfigurationException(
                "Loop {}: representatives {} hold {} days, fewer than the {}"
                " new representatives needed".format(loop, worst, len(pool), n_new))
        sub = recluster_subset(full, pool, n_new)
        groups = _splice(groups, worst,
                         [cluster.member_day_ids for cluster in sub.clusters])
        reduced = reduced_from_clusters(full, groups)
        records.append(FeedbackRecord(loop, approx, report, worst))

    return reduced, FeedbackTrace(cfg, records)

def baseline_sweep(model: SystemModel, full: ScenarioSet, rd_counts: Sequence[int],
                   reference_plan: Optional[PlanResult] = None,
                   backend: Optional[LpBackend] = None,
                   cache: Optional[DayCostCache] = None,
                   jobs: int = config.JOBS,
                   limit: int = config.ENUM_LIMIT) -> List[Tuple[int, ErrorReport]]:
    """ Direct clustering at each representative count, planning and the
    complete error report for each. """

    cache = cache if cache is not None else DayCostCache(model)
    results = [] # type: List[Tuple[int, ErrorReport]]
    for count in rd_counts:
        partition = agglomerate(full, count)
        reduced = reduced_from_clusters(
            full, [cluster.member_day_ids for cluster in partition.clusters])
        approx = plan(model, reduced, backend, cache, jobs, limit)
        results.append((count, build_report(model, full, reduced, approx,
                                            reference_plan, backend, cache, jobs)))
    return results

def feedback_variants(model: SystemModel, full: ScenarioSet, starts: Sequence[int], n_loop: int,
                      n_step: int = 1, n_bad: int = 1,
                      reference_plan: Optional[PlanResult] = None,
                      backend: Optional[LpBackend] = None,
                      cache: Optional[DayCostCache] = None,
                      jobs: int = config.JOBS,
                      limit: int = config.ENUM_LIMIT) -> List[Tuple[int, FeedbackTrace]]:
    """ Runs the feedback loop from each initial count in `starts` with a
    shared day cost cache. """

    cache = cache if cache is not None else DayCostCache(model)
    traces = []
    for n0 in starts:
        _, trace = run_feedback(model, full, FeedbackConfig(n0, n_loop, n_step, n_bad),
                                reference_plan, backend, cache, jobs, limit)
        traces.append((n0, trace))
    return traces
