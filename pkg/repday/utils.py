""" Miscellaneous utility functions. """
from typing import List, Sequence, TypeVar

from . import config

T = TypeVar("T")

def make_batches(items: Sequence[T], batch_size: int) -> List[Sequence[T]]:
    """ Group items into consecutive batches of at most batch_size, as handed
    to worker processes. """

    if batch_size < 1:
        raise ValueError("batch_size must be positive, got {}".format(batch_size))
    return [items[i:i+batch_size]
            for i in range(0, len(items), batch_size)]

def parse_int_list(text: str) -> List[int]:
    """ Parses "20, 40,60" into [20, 40, 60]. An empty string gives []. """

    items = [item.strip() for item in text.replace(";", ",").split(",")]
    try:
        return [int(item) for item in items if item]
    except ValueError:
        raise ValueError("Expected a comma separated list of integers, got {!r}".format(text))

def tolerance(normalizer: float, rel_tol: float = config.REL_TOL,
              abs_floor: float = config.ABS_FLOOR) -> float:
    """ Absolute tolerance for checks on costs of magnitude `normalizer`. """
    return max(rel_tol * abs(normalizer), abs_floor)
