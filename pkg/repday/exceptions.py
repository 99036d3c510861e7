"""Exceptions that can be raised by the repday library are defined here"""

from typing import List, Optional

class RepdayException(Exception):
    """Base class for all exceptions raised by the repday library"""

class NormalizationException(RepdayException):
    """
    Raised when a series cannot be scaled to factors because its maximum is
    zero.
    """

class FormatException(RepdayException):
    """
    Raised when time series or serialized artifacts are malformed: series of
    mismatched length, lengths that are not whole days, bad CSV columns or
    JSON documents missing keys.
    """

class EmptyScenarioSetException(RepdayException):
    """ A scenario set must contain at least one day. """

class ClusterCountException(RepdayException):
    """
    The requested number of clusters is outside 1..n for the n days being
    clustered.
    """

class ValidationException(RepdayException):
    """
    Raised when a system model violates one or more of its invariants. The
    individual messages are kept in `violations`.
    """
    def __init__(self, violations: List[str]) -> None:
        self.violations = list(violations)
        super().__init__("Invalid system model:\n\t{}".format(
            "\n\t".join(self.violations)))

class DimensionMismatchException(RepdayException):
    """
    An investment decision does not have one entry per candidate asset of the
    system it is applied to.
    """

class EnumerationLimitException(RepdayException):
    """
    The system has more candidate assets than the enumeration limit allows.
    The limit is raised with the --enum-limit flag or ENUM_LIMIT in
    settings.ini.
    """

class BackendException(RepdayException):
    """
    The LP backend failed, or reported an infeasible or unbounded daily
    problem. `context` locates the day and decision that failed.
    """
    def __init__(self, message: str, context: Optional[str] = None) -> None:
        self.context = context
        if context:
            message = "{} ({})".format(message, context)
        super().__init__(message)

class ProvenanceException(RepdayException):
    """
    The provenance of a reduced scenario set does not partition the day ids of
    the full set it is compared against.
    """

class ReferenceUnavailableException(RepdayException):
    """
    A metric that needs the reference decision of the full-scale problem was
    requested without one.
    """

class FeedbackConfigurationException(RepdayException):
    """
    The feedback loop was configured with counts that cannot be realised, for
    example refining more representatives than exist at some loop.
    """

class RunDirectoryException(RepdayException):
    """
    A run directory is locked by another command or misses an artifact that a
    command depends on.
    """

class ConfigurationException(RepdayException):
    """
    A run configuration lacks a value that the command needs, or holds one
    that cannot be parsed.
    """
