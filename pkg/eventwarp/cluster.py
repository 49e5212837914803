"""
Clustering of curves by how their clocks are warped.

Two curves are close when their estimated inverse warpings are close in
squared L2 on the common grid. Clusters are found by k-means with medoid
centroids: the centre of a group is the member minimizing the sum of
squared distances to the rest (its Fréchet mean within the group). The
number of clusters is chosen by maximizing the silhouette coefficient.
"""

from __future__ import annotations

from collections.abc import Hashable, Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from loguru import logger
from sklearn.metrics import silhouette_samples

from .curves import CurveId, FloatArray, frozen_array
from .errors import (
    BadK,
    EmptyGroup,
    EmptyRange,
    GridMismatch,
    ShapeMismatch,
    SingleCluster,
)
from .registration import TimedCurve, WarpingEstimate
from .result import Err, Ok, WarpResult

type LabelArray = npt.NDArray[np.intp]

DEFAULT_N_INIT = 20
DEFAULT_MAX_ITER = 100
MAX_DEFAULT_K = 10

SILHOUETTE_BANDS = (
    (0.25, "no substantial structure"),
    (0.51, "weak structure"),
    (0.70, "reasonable structure"),
)


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric matrix of warping distances with a zero diagonal."""

    values: FloatArray
    ids: tuple[CurveId, ...] = ()

    def __post_init__(self) -> None:
        v = self.values
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ShapeMismatch(f"distance matrix must be square, got {v.shape}")
        if self.ids and len(self.ids) != v.shape[0]:
            raise ShapeMismatch(f"{len(self.ids)} ids for {v.shape[0]} rows")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ShapeMismatch("distances must be finite and nonnegative")
        if np.any(np.diag(v) != 0) or not np.array_equal(v, v.T):
            raise ShapeMismatch("distance matrix must be symmetric with a zero diagonal")

    @classmethod
    def of(cls, values: npt.ArrayLike, ids: Sequence[CurveId] = ()) -> DistanceMatrix:
        return cls(frozen_array(values), tuple(ids))

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    def __getitem__(self, index: tuple[int, int]) -> float:
        return float(self.values[index])


@dataclass(frozen=True, eq=False)
class Clustering:
    """
    A partition of the sample into k clusters.

    Labels run from 0 to k-1 in order of first appearance; ``medoids[c]``
    is the index of the centre of cluster c.
    """

    k: int
    labels: LabelArray
    medoids: tuple[int, ...]
    silhouettes: FloatArray
    coefficient: float
    objective: float

    def members(self, label: int) -> list[int]:
        return np.flatnonzero(self.labels == label).tolist()


@dataclass(frozen=True, eq=False)
class KSelection:
    """Outcome of the silhouette scan over candidate cluster counts."""

    k: int
    coefficient: float
    scan: tuple[tuple[int, float], ...]
    clustering: Clustering


@dataclass(frozen=True)
class ClusterProfile:
    """Event-timing description of one cluster."""

    label: int
    size: int
    medoid_id: CurveId
    mean_first: float
    mean_last: float
    mean_events: float


def warp_distance(e_i: WarpingEstimate, e_j: WarpingEstimate) -> WarpResult[float]:
    """
    Trapezoidal integral of the squared difference of two gridded estimates.

    Returns:
        Ok(distance), or Err(GridMismatch) when either estimate is not
        gridded or the grids differ.
    """
    if e_i.grid is None or e_i.grid_values is None or e_j.grid_values is None:
        return Err(GridMismatch("both estimates must be interpolated onto a grid"))
    if e_j.grid is None or not np.array_equal(e_i.grid, e_j.grid):
        return Err(GridMismatch(f"estimates {e_i.curve_id!r} and {e_j.curve_id!r} use different grids"))
    return Ok(float(np.trapezoid((e_i.grid_values - e_j.grid_values) ** 2, e_i.grid)))


def distance_matrix(estimates: Sequence[WarpingEstimate]) -> WarpResult[DistanceMatrix]:
    """Warping distance between every pair of estimates, filled symmetrically."""
    n = len(estimates)
    values = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i + 1, n):
            found = warp_distance(estimates[i], estimates[j])
            if found.is_err():
                return Err(found.unwrap_err(), _skip_logging=True)
            values[i, j] = values[j, i] = found.unwrap()
    return Ok(DistanceMatrix.of(values, [e.curve_id for e in estimates]))


def frechet_medoid(members: Sequence[int], D: DistanceMatrix) -> WarpResult[int]:
    """
    Member minimizing the sum of squared distances to all members.

    Ties go to the smallest index.

    Examples:
        >>> D = DistanceMatrix.of([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
        >>> frechet_medoid([0, 1, 2], D).unwrap()
        1
    """
    if len(members) == 0:
        return Err(EmptyGroup("cannot take the medoid of an empty group"))
    idx = np.array(sorted(members), dtype=np.intp)
    costs = (D.values[np.ix_(idx, idx)] ** 2).sum(axis=1)
    return Ok(int(idx[int(np.argmin(costs))]))


def _medoid(members: LabelArray, D: FloatArray) -> int:
    costs = (D[np.ix_(members, members)] ** 2).sum(axis=1)
    return int(members[int(np.argmin(costs))])


def _initial_medoids(D: FloatArray, k: int, rng: np.random.Generator) -> list[int]:
    """Sequential sampling with probability proportional to squared distance."""
    n = D.shape[0]
    chosen = [int(rng.integers(n))]
    while len(chosen) < k:
        weights = np.min(D[:, chosen] ** 2, axis=1)
        weights[chosen] = 0.0
        total = weights.sum()
        if total > 0:
            chosen.append(int(rng.choice(n, p=weights / total)))
        else:
            rest = np.setdiff1d(np.arange(n), chosen)
            chosen.append(int(rng.choice(rest)))
    return chosen


def _assign(D: FloatArray, medoids: list[int]) -> LabelArray:
    labels = np.argmin(D[:, medoids], axis=1).astype(np.intp)
    labels[medoids] = np.arange(len(medoids))
    return labels


def _objective(D: FloatArray, medoids: list[int], labels: LabelArray) -> float:
    return float(np.sum(D[np.arange(D.shape[0]), np.asarray(medoids)[labels]] ** 2))


def _run_once(
    D: FloatArray, k: int, rng: np.random.Generator, max_iter: int
) -> tuple[list[int], LabelArray, float]:
    medoids = _initial_medoids(D, k, rng)
    labels = _assign(D, medoids)
    for _ in range(max_iter):
        updated = [_medoid(np.flatnonzero(labels == c), D) for c in range(k)]
        if updated == medoids:
            break
        medoids = updated
        labels = _assign(D, medoids)
    return medoids, labels, _objective(D, medoids, labels)


def _canonical(labels: LabelArray, medoids: list[int]) -> tuple[LabelArray, tuple[int, ...]]:
    """Relabel clusters in order of first appearance."""
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    relabel = np.empty_like(order)
    relabel[order] = np.arange(order.size)
    return relabel[labels], tuple(medoids[c] for c in order)


def kmedoids(
    D: DistanceMatrix,
    k: int,
    seed: int = 0,
    max_iter: int = DEFAULT_MAX_ITER,
    n_init: int = DEFAULT_N_INIT,
) -> WarpResult[Clustering]:
    """
    k-means on a distance matrix with Fréchet medoid centroids.

    Each of ``n_init`` restarts seeds k medoids by squared-distance
    sampling, then alternates nearest-medoid assignment (by d) and medoid
    update (by sum of d squared) until the medoids stop changing or
    ``max_iter`` is reached. The restart with the lowest total within
    cluster sum of d squared is kept; earlier restarts win ties.

    Returns:
        Ok(Clustering), or Err(BadK) unless 2 <= k <= n.
    """
    n = D.n
    if not 2 <= k <= n:
        return Err(BadK(f"k must lie in [2, {n}], got {k}"))
    if n_init < 1 or max_iter < 1:
        return Err(BadK(f"n_init and max_iter must be >= 1, got {n_init}, {max_iter}"))

    rng = np.random.default_rng(seed)
    best: tuple[list[int], LabelArray, float] | None = None
    for restart in range(n_init):
        medoids, labels, objective = _run_once(D.values, k, rng, max_iter)
        logger.debug(f"k={k} restart {restart}: objective {objective:.6g}")
        if best is None or objective < best[2]:
            best = (medoids, labels, objective)
    assert best is not None

    medoids, labels, objective = best
    labels, ordered = _canonical(labels, medoids)
    return silhouette(D, labels).map(
        lambda found: Clustering(
            k=k,
            labels=labels,
            medoids=ordered,
            silhouettes=found[0],
            coefficient=found[1],
            objective=objective,
        )
    )


def silhouette(
    D: DistanceMatrix, labels: Sequence[Hashable] | npt.ArrayLike
) -> WarpResult[tuple[FloatArray, float]]:
    """
    Per-point silhouettes and their mean.

    For point i, a is the mean distance to the rest of its cluster and b
    the smallest mean distance to another cluster; s = (b - a) / max(a, b).
    Scores come from scikit-learn on the precomputed matrix. Members of
    singleton clusters get s = 0, including the k = n partition that
    scikit-learn rejects.

    Returns:
        Ok((silhouettes, coefficient)), Err(SingleCluster) with fewer than
        two clusters, or Err(ShapeMismatch).

    Examples:
        >>> D = DistanceMatrix.of([[0, 1, 10, 10], [1, 0, 10, 10],
        ...                        [10, 10, 0, 1], [10, 10, 1, 0]])
        >>> round(silhouette(D, [0, 0, 1, 1]).unwrap()[1], 12)
        0.9
    """
    groups = np.asarray(labels)
    if groups.shape != (D.n,):
        return Err(ShapeMismatch(f"{groups.size} labels for {D.n} points"))
    clusters = np.unique(groups)
    if clusters.size < 2:
        return Err(SingleCluster(f"silhouette needs at least 2 clusters, got {clusters.size}"))

    if clusters.size == D.n:
        s = np.zeros(D.n, dtype=np.float64)
    else:
        s = silhouette_samples(D.values, groups, metric="precomputed")
    return Ok((frozen_array(s), float(np.mean(s))))


def select_k(
    D: DistanceMatrix,
    k_range: Sequence[int] | None = None,
    seed: int = 0,
    max_iter: int = DEFAULT_MAX_ITER,
    n_init: int = DEFAULT_N_INIT,
) -> WarpResult[KSelection]:
    """
    Cluster count with the largest silhouette coefficient.

    Args:
        D: Distance matrix.
        k_range: Candidates, each within [2, n-1]. Defaults to
            2..min(10, n-1).
        seed: Seed shared by every candidate's kmedoids run.

    Returns:
        Ok(KSelection); ties go to the smaller k. Err(EmptyRange) when
        there is no candidate, Err(BadK) for a candidate outside [2, n-1].
    """
    n = D.n
    candidates = (
        list(range(2, min(MAX_DEFAULT_K, n - 1) + 1))
        if k_range is None
        else sorted(set(k_range))
    )
    if not candidates:
        return Err(EmptyRange(f"no admissible cluster count for n={n}"))
    outside = [k for k in candidates if not 2 <= k <= n - 1]
    if outside:
        return Err(BadK(f"cluster counts {outside} outside [2, {n - 1}]"))

    best: Clustering | None = None
    scan: list[tuple[int, float]] = []
    for k in candidates:
        found = kmedoids(D, k, seed=seed, max_iter=max_iter, n_init=n_init)
        if found.is_err():
            return Err(found.unwrap_err(), _skip_logging=True)
        clustering = found.unwrap()
        scan.append((k, clustering.coefficient))
        if best is None or clustering.coefficient > best.coefficient:
            best = clustering
    assert best is not None

    logger.info(
        f"chose k={best.k} with silhouette {best.coefficient:.3f} "
        f"({interpret_silhouette(best.coefficient)})"
    )
    return Ok(KSelection(best.k, best.coefficient, tuple(scan), best))


def interpret_silhouette(coefficient: float) -> str:
    """
    Conventional reading of a silhouette coefficient.

    Up to 0.25 no substantial structure, up to 0.51 weak, up to 0.70
    reasonable, strong above that.

    Examples:
        >>> interpret_silhouette(0.6)
        'reasonable structure'
    """
    for upper, band in SILHOUETTE_BANDS:
        if coefficient <= upper:
            return band
    return "strong structure"


def cluster_profiles(
    curves: Sequence[TimedCurve], clustering: Clustering
) -> WarpResult[list[ClusterProfile]]:
    """
    Size, medoid and mean event timing of each cluster.

    ``curves`` may be observed or registered curves, in the order the
    clustering was computed on.
    """
    if len(curves) != clustering.labels.size:
        return Err(
            ShapeMismatch(f"{len(curves)} curves for {clustering.labels.size} labels")
        )
    profiles = []
    for label in range(clustering.k):
        group = [curves[i] for i in clustering.members(label)]
        profiles.append(
            ClusterProfile(
                label=label,
                size=len(group),
                medoid_id=curves[clustering.medoids[label]].curve_id,
                mean_first=float(np.mean([c.event_times[0] for c in group])),
                mean_last=float(np.mean([c.event_times[-1] for c in group])),
                mean_events=float(np.mean([c.n_events for c in group])),
            )
        )
    return Ok(profiles)
