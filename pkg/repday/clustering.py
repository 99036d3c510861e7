"""
Mean-based agglomerative clustering of days and construction of the
representative days that stand in for each cluster.
"""

import logging
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .exceptions import ClusterCountException, FormatException, ProvenanceException
from .scenario import ScenarioSet

logger = logging.getLogger(__name__) # type: ignore

class Cluster(NamedTuple):
    """ A group of original days.

    Attributes:
        member_day_ids: Sorted ids of the member days.
        member_weights: Weights of the member days, aligned with
            `member_day_ids`.
        mean_features: Weight-weighted mean of the members' feature vectors.
    """
    member_day_ids: Tuple[int, ...]
    member_weights: Tuple[float, ...]
    mean_features: np.ndarray

    @property
    def size(self) -> int:
        return len(self.member_day_ids)

    @property
    def weight(self) -> float:
        return float(sum(self.member_weights))

    @property
    def min_day_id(self) -> int:
        return self.member_day_ids[0]

def make_cluster(scenarios: ScenarioSet, day_ids: Iterable[int]) -> Cluster:
    """ Builds the cluster of the given days of a full scenario set, with its
    mean computed from the members. """

    index = scenarios.day_index()
    ids = tuple(sorted(set(int(day_id) for day_id in day_ids)))
    if not ids:
        raise ClusterCountException("A cluster needs at least one member day")
    rows = [index[day_id] for day_id in ids]
    weights = scenarios.weights[rows]
    mean = np.average(scenarios.features[rows], axis=0, weights=weights)
    return Cluster(ids, tuple(float(w) for w in weights), mean)

def ward_dist(a: Cluster, b: Cluster) -> float:
    """ Ward dissimilarity between two clusters:
    2|a||b| / (|a| + |b|) * ||mean_a - mean_b||^2, where |.| counts members.
    """

    n_a = a.size
    n_b = b.size
    diff = a.mean_features - b.mean_features
    return float(2.0 * n_a * n_b / (n_a + n_b) * np.dot(diff, diff))

class Partition:
    """ A partition of the days of a full scenario set into clusters.

    Clusters are kept ordered by their smallest member day id.
    """

    def __init__(self, clusters: Sequence[Cluster],
                 source: Optional[ScenarioSet] = None) -> None:
        self.clusters = sorted(clusters, key=lambda cluster: cluster.min_day_id)
        self.source = source

    def __len__(self) -> int:
        return len(self.clusters)

    def __repr__(self) -> str:
        return "Partition(clusters={}, sizes={})".format(
            len(self), [cluster.size for cluster in self.clusters])

    def assignments(self) -> Dict[int, int]:
        """ Maps each day id to the index of its cluster. """
        return {day_id: k for k, cluster in enumerate(self.clusters)
                for day_id in cluster.member_day_ids}

    def validate(self) -> None:
        """ Checks that clusters are non-empty, disjoint and, when the source
        set is known, jointly cover its days.

        Raises:
            repday.exceptions.ProvenanceException: On the first violation.
        """

        seen = set() # type: set
        for k, cluster in enumerate(self.clusters):
            if cluster.size == 0:
                raise ProvenanceException("Cluster {} is empty".format(k))
            overlap = seen & set(cluster.member_day_ids)
            if overlap:
                raise ProvenanceException(
                    "Days {} belong to more than one cluster".format(sorted(overlap)))
            seen |= set(cluster.member_day_ids)
        if self.source is not None and seen != set(self.source.day_ids()):
            raise ProvenanceException(
                "Partition covers {} days but its source holds {}".format(
                    len(seen), len(self.source.day_ids())))

    def to_json(self) -> dict:
        return {"clusters": [{"members": list(cluster.member_day_ids),
                              "weights": list(cluster.member_weights),
                              "mean": cluster.mean_features.tolist(),
                              "weight": cluster.weight}
                             for cluster in self.clusters]}

    @classmethod
    def from_json(cls, doc: dict, source: Optional[ScenarioSet] = None) -> "Partition":
        try:
            clusters = []
            for entry in doc["clusters"]:
                members = [int(day_id) for day_id in entry["members"]]
                weights = entry.get("weights", [1.0] * len(members))
                order = np.argsort(members)
                clusters.append(Cluster(tuple(members[i] for i in order),
                                        tuple(float(weights[i]) for i in order),
                                        np.array(entry["mean"], dtype=float)))
        except (KeyError, TypeError, ValueError) as err:
            raise FormatException("Malformed partition document: {}".format(err))
        return cls(clusters, source)

def _check_full(scenarios: ScenarioSet) -> None:
    if scenarios.kind != ScenarioSet.FULL:
        raise FormatException("Clustering operates on full scenario sets only")

def agglomerate(scenarios: ScenarioSet, k: int) -> Partition:
    """ Agglomerative clustering of the days of a full scenario set with
    `ward_dist()` as the linkage.

    Starting from singletons, the pair of clusters with the smallest
    dissimilarity is merged until `k` clusters remain. Cluster means are
    recomputed from the members after each merge. Among pairs at exactly the
    same dissimilarity the one with the smallest (min day id, second min day
    id) is merged first.

    Args:
        scenarios: A full scenario set.
        k: The number of clusters wanted, between 1 and the number of days.

    Raises:
        repday.exceptions.ClusterCountException: If `k` is out of range.
    """

    _check_full(scenarios)
    n_days = len(scenarios)
    if not 1 <= k <= n_days:
        raise ClusterCountException(
            "Cannot form {} clusters from {} days".format(k, n_days))

    clusters = sorted((make_cluster(scenarios, members)
                       for members in scenarios.provenance),
                      key=lambda cluster: cluster.min_day_id)
    # Upper triangle holds dissimilarities; everything else is +inf so that
    # row-major argmin visits pairs in (min id, second min id) order.
    n = len(clusters)
    dist = np.full((n, n), np.inf)
    for i in range(n):
        for j in range(i + 1, n):
            dist[i, j] = ward_dist(clusters[i], clusters[j])

    while len(clusters) > k:
        flat = int(np.argmin(dist))
        i, j = divmod(flat, len(clusters))
        logger.debug("Merging clusters starting at days %d and %d at %g",
                     clusters[i].min_day_id, clusters[j].min_day_id, dist[i, j])
        merged = make_cluster(scenarios,
                              clusters[i].member_day_ids + clusters[j].member_day_ids)
        # The merged cluster keeps position i since i < j in min id order.
        clusters[i] = merged
        del clusters[j]
        dist = np.delete(np.delete(dist, j, axis=0), j, axis=1)
        for other in range(len(clusters)):
            if other == i:
                continue
            lo, hi = min(i, other), max(i, other)
            dist[lo, hi] = ward_dist(clusters[lo], clusters[hi])

    logger.info("Clustered %d days into %d clusters", n_days, k)
    return Partition(clusters, scenarios)

def make_representatives(partition: Partition) -> ScenarioSet:
    """ Turns each cluster into a representative day whose weight is the sum
    of its members' weights and whose features are their weighted mean. """

    partition.validate()
    weights = [cluster.weight for cluster in partition.clusters]
    features = [cluster.mean_features for cluster in partition.clusters]
    provenance = [cluster.member_day_ids for cluster in partition.clusters]
    return ScenarioSet(ScenarioSet.REDUCED, weights, features, provenance)

def recluster_subset(scenarios: ScenarioSet, day_ids: Iterable[int],
                     k_sub: int) -> Partition:
    """ Runs `agglomerate()` over the selected days only.

    Raises:
        repday.exceptions.ClusterCountException: If no days are selected or
            `k_sub` exceeds their number.
    """

    selected = set(int(day_id) for day_id in day_ids)
    if not selected:
        raise ClusterCountException("Cannot recluster an empty set of days")
    if not 1 <= k_sub <= len(selected):
        raise ClusterCountException(
            "Cannot form {} clusters from {} selected days".format(k_sub, len(selected)))
    return agglomerate(scenarios.restrict(selected), k_sub)

def cluster_days(scenarios: ScenarioSet, k: int) -> Tuple[Partition, ScenarioSet]:
    """ Clusters a full set and returns the partition with its representative
    days. """
    partition = agglomerate(scenarios, k)
    return partition, make_representatives(partition)

def reduced_from_clusters(scenarios: ScenarioSet,
                          groups: Sequence[Iterable[int]]) -> ScenarioSet:
    """ Builds the reduced set for an explicit grouping of the days of a full
    set, keeping the order of `groups`. """

    _check_full(scenarios)
    clusters = [make_cluster(scenarios, group) for group in groups]
    Partition(clusters, scenarios).validate()
    return ScenarioSet(ScenarioSet.REDUCED,
                       [cluster.weight for cluster in clusters],
                       [cluster.mean_features for cluster in clusters],
                       [cluster.member_day_ids for cluster in clusters])

def assigned_features(full: ScenarioSet, reduced: ScenarioSet) -> List[Tuple[int, np.ndarray, np.ndarray]]:
    """ Pairs each day of `full` with its own features and those of the
    representative day it is assigned to in `reduced`.

    Raises:
        repday.exceptions.ProvenanceException: If the provenance of `reduced`
            does not partition the days of `full`.
    """

    check_provenance(full, reduced)
    rd_of_day = reduced.day_index()
    full_index = full.day_index()
    return [(day_id, full.features[full_index[day_id]],
             reduced.features[rd_of_day[day_id]])
            for day_id in full.day_ids()]

def check_provenance(full: ScenarioSet, reduced: ScenarioSet) -> None:
    """ Raises ProvenanceException unless the provenance of `reduced` partitions
    the day ids of `full`. """

    covered = reduced.day_ids()
    if covered != full.day_ids():
        raise ProvenanceException(
            "Reduced set covers {} days, full set holds {}".format(
                len(covered), len(full)))
    if sum(len(members) for members in reduced.provenance) != len(covered):
        raise ProvenanceException("Reduced set provenance sets overlap")
