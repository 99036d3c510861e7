"""
Hourly load and wind series, their segmentation into days and the weighted
scenario sets that the planning model is solved over.

A `ScenarioSet` is either the full-scale set, one entry per original day with
weight 1, or a reduced set of representative days whose provenance records
which original days each representative stands in for.
"""

import json
import logging
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, Iterator, List, NamedTuple, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .config import ENCODING, HOURS_PER_DAY
from .exceptions import EmptyScenarioSetException, FormatException, NormalizationException

logger = logging.getLogger(__name__) # type: ignore

class HourlySeries(NamedTuple):
    """ An immutable hourly time series.

    Attributes:
        name: A label such as "load" or "wind".
        values: A one dimensional array of non-negative samples, either in MW
            or as dimensionless factors after `normalize()`.
    """
    name: str
    values: np.ndarray

    @property
    def length(self) -> int:
        """ Number of hours in the series. """
        return int(self.values.shape[0])

DayProfile = NamedTuple("DayProfile", [("day_id", int),
                                       ("load_factors", np.ndarray),
                                       ("wind_factors", np.ndarray),
                                       ("weight", float)])
DayProfile.__doc__ = (
    """ One original day of the chronology.

    Attributes:
        day_id: Index of the day in the original chronology, starting at 0.
        load_factors: 24 load factors in [0, 1].
        wind_factors: 24 wind capacity factors in [0, 1].
        weight: Positive weight of the day; 1 for original days.
    """)

def hourly_series(name: str, values: Iterable[float]) -> HourlySeries:
    """ Creates an `HourlySeries`, checking that it covers whole days and
    holds only finite non-negative samples.

    Raises:
        repday.exceptions.FormatException: If the length is not a positive
            multiple of 24 or a sample is negative or not finite.
    """

    arr = np.array(list(values) if not isinstance(values, np.ndarray) else values,
                   dtype=float)
    if arr.ndim != 1 or arr.shape[0] == 0 or arr.shape[0] % HOURS_PER_DAY != 0:
        raise FormatException(
            "Series {} has {} samples; expected a positive multiple of {}".format(
                name, arr.size, HOURS_PER_DAY))
    if not np.all(np.isfinite(arr)):
        raise FormatException("Series {} holds non-finite samples".format(name))
    if np.any(arr < 0):
        raise FormatException("Series {} holds negative samples".format(name))
    arr.setflags(write=False)
    return HourlySeries(name, arr)

def normalize(series: HourlySeries) -> HourlySeries:
    """ Scales a series by its maximum so that it becomes a series of factors
    in [0, 1] whose maximum is exactly 1.

    Raises:
        repday.exceptions.NormalizationException: If every sample is zero.
    """

    peak = float(np.max(series.values))
    if peak <= 0:
        raise NormalizationException(
            "Cannot normalize series {}: all samples are zero".format(series.name))
    scaled = series.values / peak
    scaled.setflags(write=False)
    return HourlySeries(series.name, scaled)

def segment_days(load: HourlySeries, wind: HourlySeries) -> List[DayProfile]:
    """ Cuts normalized load and wind series into chronological days of weight
    1. Day i holds hours [24i, 24i+24).

    Raises:
        repday.exceptions.FormatException: If the series differ in length, do
            not cover whole days or are not normalized.
    """

    if load.length != wind.length:
        raise FormatException(
            "Load series has {} hours but wind series has {}".format(
                load.length, wind.length))
    if load.length == 0 or load.length % HOURS_PER_DAY != 0:
        raise FormatException(
            "Series length {} is not a whole number of days".format(load.length))
    for series in (load, wind):
        if np.any(series.values < 0) or np.any(series.values > 1):
            raise FormatException(
                "Series {} is not normalized to [0, 1]".format(series.name))

    n_days = load.length // HOURS_PER_DAY
    load_days = load.values.reshape(n_days, HOURS_PER_DAY)
    wind_days = wind.values.reshape(n_days, HOURS_PER_DAY)
    days = [DayProfile(i, load_days[i].copy(), wind_days[i].copy(), 1.0)
            for i in range(n_days)]
    logger.debug("Segmented %d hours into %d days", load.length, n_days)
    return days

def days_to_series(days: Sequence[DayProfile]) -> Tuple[HourlySeries, HourlySeries]:
    """ Concatenates days back into a load and a wind series. """

    load = np.concatenate([day.load_factors for day in days])
    wind = np.concatenate([day.wind_factors for day in days])
    return hourly_series("load", load), hourly_series("wind", wind)

class ScenarioSet:
    """ A weighted collection of daily feature vectors.

    Entry k has a weight, a feature vector (the 24 load factors followed by
    the 24 wind factors for daily data) and a provenance: the set of original
    day ids it represents. A full set has one entry per original day; a
    reduced set has one entry per representative day and its provenance sets
    partition the day ids of the full set it was built from.

    Instances should be treated as immutable; the arrays they hold are
    flagged read-only.
    """

    FULL = "full"
    REDUCED = "reduced"

    def __init__(self, kind: str, weights: Sequence[float],
                 features: Union[np.ndarray, Sequence[Sequence[float]]],
                 provenance: Sequence[Iterable[int]]) -> None:

        if kind not in (self.FULL, self.REDUCED):
            raise FormatException("Unknown scenario set kind {!r}".format(kind))
        weights_arr = np.array(weights, dtype=float)
        features_arr = np.array(features, dtype=float)
        if weights_arr.size == 0:
            raise EmptyScenarioSetException("A scenario set needs at least one entry")
        if features_arr.ndim != 2 or features_arr.shape[0] != weights_arr.shape[0]:
            raise FormatException(
                "Expected one feature vector per weight, got features of shape {}"
                " for {} weights".format(features_arr.shape, weights_arr.shape[0]))
        if len(provenance) != weights_arr.shape[0]:
            raise FormatException(
                "Expected one provenance set per entry, got {} for {} entries".format(
                    len(provenance), weights_arr.shape[0]))
        if np.any(weights_arr <= 0) or not np.all(np.isfinite(weights_arr)):
            raise FormatException("Scenario weights must be positive and finite")
        if not np.all(np.isfinite(features_arr)):
            raise FormatException("Scenario features must be finite")

        prov = [frozenset(int(day_id) for day_id in members) for members in provenance]
        seen = set() # type: set
        for members in prov:
            if not members:
                raise FormatException("Every entry must represent at least one day")
            if seen & members:
                raise FormatException(
                    "Days {} are claimed by more than one entry".format(
                        sorted(seen & members)))
            seen |= members

        weights_arr.setflags(write=False)
        features_arr.setflags(write=False)
        self.kind = kind
        self.weights = weights_arr
        self.features = features_arr
        self.provenance = prov # type: List[FrozenSet[int]]

    def __len__(self) -> int:
        return int(self.weights.shape[0])

    def __repr__(self) -> str:
        return "ScenarioSet(kind={!r}, entries={}, total_weight={})".format(
            self.kind, len(self), self.total_weight)

    @property
    def total_weight(self) -> float:
        """ Sum of entry weights. """
        return float(np.sum(self.weights))

    @property
    def n_features(self) -> int:
        return int(self.features.shape[1])

    def entries(self) -> Iterator[Tuple[float, np.ndarray]]:
        """ Iterates over (weight, feature vector) pairs in entry order. """
        for k in range(len(self)):
            yield float(self.weights[k]), self.features[k]

    def day_ids(self) -> List[int]:
        """ All original day ids covered by this set, sorted. """
        return sorted(set().union(*self.provenance))

    def day_index(self) -> Dict[int, int]:
        """ Maps every covered day id to the entry that represents it. """
        return {day_id: k for k, members in enumerate(self.provenance)
                for day_id in members}

    def restrict(self, day_ids: Iterable[int]) -> "ScenarioSet":
        """ Returns the full-kind subset holding only the given days, in the
        order of this set.

        Raises:
            repday.exceptions.FormatException: If this is not a full set or a
                day id is unknown.
        """

        if self.kind != self.FULL:
            raise FormatException("Only full scenario sets can be restricted to days")
        wanted = set(int(day_id) for day_id in day_ids)
        index = self.day_index()
        unknown = wanted - set(index)
        if unknown:
            raise FormatException("Unknown day ids {}".format(sorted(unknown)))
        rows = sorted(index[day_id] for day_id in wanted)
        return ScenarioSet(self.FULL, self.weights[rows], self.features[rows],
                           [self.provenance[k] for k in rows])

    def to_json(self) -> dict:
        return {"kind": self.kind,
                "entries": [{"weight": float(weight), "features": feats.tolist()}
                            for weight, feats in self.entries()],
                "provenance": [sorted(members) for members in self.provenance]}

    @classmethod
    def from_json(cls, doc: dict) -> "ScenarioSet":
        try:
            entries = doc["entries"]
            return cls(doc["kind"],
                       [entry["weight"] for entry in entries],
                       [entry["features"] for entry in entries],
                       doc["provenance"])
        except (KeyError, TypeError, ValueError) as err:
            raise FormatException("Malformed scenario set document: {}".format(err))

    def save(self, path: Path) -> None:
        """ Writes the set as JSON. """
        with Path(path).open("w", encoding=ENCODING) as f:
            json.dump(self.to_json(), f, indent=1, sort_keys=True)

    @classmethod
    def load(cls, path: Path) -> "ScenarioSet":
        logger.debug("Loading scenario set from %s", path)
        with Path(path).open(encoding=ENCODING) as f:
            return cls.from_json(json.load(f))

def to_full_set(days: Sequence[DayProfile]) -> ScenarioSet:
    """ Builds the full-scale scenario set: one entry per day whose feature
    vector is the load factors followed by the wind factors.

    Raises:
        repday.exceptions.EmptyScenarioSetException: If no days are given.
    """

    if not days:
        raise EmptyScenarioSetException("Cannot build a scenario set from no days")
    features = [np.concatenate([day.load_factors, day.wind_factors]) for day in days]
    return ScenarioSet(ScenarioSet.FULL,
                       [day.weight for day in days],
                       features,
                       [[day.day_id] for day in days])

def read_timeseries_csv(path: Union[str, Path]) -> Tuple[HourlySeries, HourlySeries]:
    """ Reads a CSV file with columns hour, load and wind, where hour counts
    consecutive hours from 0.

    Returns:
        The raw (unnormalized) load and wind series.

    Raises:
        FileNotFoundError: If the file does not exist.
        repday.exceptions.FormatException: If columns are missing, hours are
            not consecutive or samples are invalid.
    """

    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError("Time series file {} does not exist".format(path))
    try:
        frame = pd.read_csv(str(path), encoding=ENCODING)
    except (ValueError, pd.errors.ParserError) as err:
        raise FormatException("Cannot parse {}: {}".format(path, err))

    missing = {"hour", "load", "wind"} - set(frame.columns)
    if missing:
        raise FormatException("{} lacks columns {}".format(path, sorted(missing)))
    hours = frame["hour"].to_numpy()
    if not np.array_equal(hours, np.arange(len(frame))):
        raise FormatException(
            "{}: the hour column must count consecutive hours from 0".format(path))
    try:
        load = frame["load"].to_numpy(dtype=float)
        wind = frame["wind"].to_numpy(dtype=float)
    except ValueError as err:
        raise FormatException("{}: non-numeric samples ({})".format(path, err))
    logger.info("Read %d hours of load and wind from %s", len(frame), path)
    return hourly_series("load", load), hourly_series("wind", wind)

def write_timeseries_csv(path: Union[str, Path], load: HourlySeries,
                         wind: HourlySeries) -> None:
    """ Writes load and wind series in the format read by
    `read_timeseries_csv()`. """

    if load.length != wind.length:
        raise FormatException("Load and wind series differ in length")
    frame = pd.DataFrame({"hour": np.arange(load.length),
                          "load": load.values,
                          "wind": wind.values})
    frame.to_csv(str(path), index=False, encoding=ENCODING)

def load_full_set(path: Union[str, Path]) -> ScenarioSet:
    """ Reads, normalizes and segments a time series CSV into the full-scale
    scenario set. """

    load, wind = read_timeseries_csv(path)
    days = segment_days(normalize(load), normalize(wind))
    return to_full_set(days)
