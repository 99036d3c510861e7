"""
The linear programming backend contract and its reference implementation on
top of the HiGHS solvers shipped with scipy.
"""

import abc
import logging
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csr_matrix

from . import config
from .exceptions import BackendException

logger = logging.getLogger(__name__) # type: ignore

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ERROR = "error"

class LpInstance(NamedTuple):
    """ min c.x subject to a_ub.x <= b_ub, a_eq.x = b_eq, lb <= x <= ub.

    Infinite entries of `lb` and `ub` mean the bound is absent.
    """
    c: np.ndarray
    a_ub: csr_matrix
    b_ub: np.ndarray
    a_eq: csr_matrix
    b_eq: np.ndarray
    lb: np.ndarray
    ub: np.ndarray

    @property
    def n_variables(self) -> int:
        return int(self.c.shape[0])

    @property
    def n_constraints(self) -> int:
        return int(self.a_ub.shape[0] + self.a_eq.shape[0])

class LpSolution(NamedTuple):
    status: str
    objective: float
    x: Optional[np.ndarray]
    message: str = ""

class Capabilities(NamedTuple):
    """ What a backend promises: problem size limits (0 for none) and the
    tolerance within which it reports optima. """
    name: str
    max_variables: int
    max_constraints: int
    tolerance: float

class LpBackend(abc.ABC):
    """ Something that solves `LpInstance`s.

    Implementations must return an optimal objective within their declared
    tolerance and report infeasible and unbounded instances distinctly.
    """

    @property
    @abc.abstractmethod
    def capabilities(self) -> Capabilities:
        ...

    @abc.abstractmethod
    def solve(self, instance: LpInstance) -> LpSolution:
        ...

    def check_size(self, instance: LpInstance) -> None:
        caps = self.capabilities
        if caps.max_variables and instance.n_variables > caps.max_variables:
            raise BackendException(
                "LP has {} variables, {} allows {}".format(
                    instance.n_variables, caps.name, caps.max_variables))
        if caps.max_constraints and instance.n_constraints > caps.max_constraints:
            raise BackendException(
                "LP has {} constraints, {} allows {}".format(
                    instance.n_constraints, caps.name, caps.max_constraints))

class HighsBackend(LpBackend):
    """ Solves LPs with `scipy.optimize.linprog(method="highs")`. """

    _STATUS = {0: OPTIMAL, 2: INFEASIBLE, 3: UNBOUNDED}

    def __init__(self, tolerance: float = config.LP_TOLERANCE,
                 time_limit: float = config.LP_TIME_LIMIT) -> None:
        self.tolerance = tolerance
        self.time_limit = time_limit

    def __repr__(self) -> str:
        return "HighsBackend(tolerance={}, time_limit={})".format(
            self.tolerance, self.time_limit)

    @property
    def capabilities(self) -> Capabilities:
        return Capabilities("highs", 0, 0, self.tolerance)

    def solve(self, instance: LpInstance) -> LpSolution:
        self.check_size(instance)
        options = {"primal_feasibility_tolerance": self.tolerance,
                   "dual_feasibility_tolerance": self.tolerance}
        if self.time_limit > 0:
            options["time_limit"] = self.time_limit
        bounds = list(zip(instance.lb, instance.ub))
        res = linprog(instance.c,
                      A_ub=instance.a_ub if instance.a_ub.shape[0] else None,
                      b_ub=instance.b_ub if instance.a_ub.shape[0] else None,
                      A_eq=instance.a_eq if instance.a_eq.shape[0] else None,
                      b_eq=instance.b_eq if instance.a_eq.shape[0] else None,
                      bounds=bounds, method="highs", options=options)
        status = self._STATUS.get(res.status, ERROR)
        if status != OPTIMAL:
            logger.debug("HiGHS returned status %d: %s", res.status, res.message)
            return LpSolution(status, float("nan"), None, res.message)
        return LpSolution(status, float(res.fun), np.asarray(res.x), res.message)

def default_backend() -> LpBackend:
    return HighsBackend()
