"""
Pairwise synchronization maps from a DTW alignment.

An alignment says which points of two curves correspond but not where in
time the matched points belong. For a source curve with times t and a
target with times s, each source point k is sent to the time of the first
target point it is aligned with, s[alpha[k]]. When a run of H source
points shares one target point they are spread around that target time
instead of collapsing onto it, on an interval of half-width

    l = delta * (t[k+H-1] - t[k]) / 2,

so the map has slope delta across the run and stays strictly increasing.
A run sitting on an anchor of the target is spread inward from the domain
endpoint instead. If a spread still collides with a neighbour its
half-width is halved until the order is strict; what remains is separated
by the tie-breaking nudge of the domain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .curves import CurveId, EventCurve, FloatArray, enforce_strict, frozen_array
from .dtw import Alignment, Metric, absolute_difference, align
from .errors import NonPositiveDelta, ShapeMismatch
from .result import Err, Ok, WarpResult

type IndexArray = npt.NDArray[np.intp]

DEFAULT_DELTA = 0.05
MAX_HALVINGS = 64


@dataclass(frozen=True, eq=False)
class PairwiseWarp:
    """Discrete samples of the map from a source curve's clock to a target's.

    ``mapped_times[k]`` is where source event ``source_times[k]`` lands on
    the target's time axis.
    """

    source_id: CurveId
    target_id: CurveId
    source_times: FloatArray
    mapped_times: FloatArray
    delta: float

    def __len__(self) -> int:
        return int(self.source_times.size)

    def is_strictly_increasing(self) -> bool:
        return bool(np.all(np.diff(self.mapped_times) > 0))


def extract_correspondence(alignment: Alignment) -> tuple[IndexArray, IndexArray]:
    """
    First matched target index per source point, and vice versa.

    Returns:
        (alpha, beta): alpha[i] is the first column the path visits in row
        i, beta[j] the first row it visits in column j. Both are 0-based and
        nondecreasing.

    Examples:
        >>> path = Alignment(((1, 1), (1, 0), (1, 0), (1, 1), (1, 1), (0, 1)))
        >>> alpha, beta = extract_correspondence(path)
        >>> alpha.tolist(), beta.tolist()
        ([0, 0, 0, 1, 2], [0, 3, 4, 4])
    """
    n_a, n_b = alignment.shape
    alpha = np.full(n_a, -1, dtype=np.intp)
    beta = np.full(n_b, -1, dtype=np.intp)
    for i, j in alignment.cells:
        if alpha[i] < 0:
            alpha[i] = j
        if beta[j] < 0:
            beta[j] = i
    return alpha, beta


def _runs(index: IndexArray) -> list[tuple[int, int]]:
    """Maximal [start, stop) runs of equal entries."""
    breaks = np.flatnonzero(np.diff(index)) + 1
    edges = [0, *breaks.tolist(), int(index.size)]
    return list(zip(edges[:-1], edges[1:], strict=False))


def _place(
    index: IndexArray,
    s: FloatArray,
    runs: list[tuple[int, int]],
    half: FloatArray,
    pinned: bool,
) -> FloatArray:
    x = s[index].astype(np.float64)
    last_target = s.size - 1
    for r, (start, stop) in enumerate(runs):
        size = stop - start
        if size < 2:
            continue
        centre = s[index[start]]
        spacing = 2 * half[r] / (size - 1)
        h = np.arange(size, dtype=np.float64)
        if pinned and index[start] == 0:
            x[start:stop] = centre + spacing * h
        elif pinned and index[start] == last_target:
            x[start:stop] = centre - spacing * (size - 1 - h)
        else:
            x[start:stop] = centre - half[r] + spacing * h
    return x


def _colliding(
    x: FloatArray, runs: list[tuple[int, int]], lower: float, upper: float
) -> set[int]:
    spread = [r for r, (start, stop) in enumerate(runs) if stop - start > 1]
    bad: set[int] = set()
    for r in spread:
        start, stop = runs[r]
        if x[start] < lower or x[stop - 1] > upper:
            bad.add(r)
    for r in range(1, len(runs)):
        boundary = runs[r][0]
        if x[boundary] <= x[boundary - 1]:
            bad.update(q for q in (r - 1, r) if q in spread)
    return bad


def spread_times(
    index: npt.ArrayLike,
    t: npt.ArrayLike,
    s: npt.ArrayLike,
    delta: float,
    lower: float,
    upper: float,
    pinned: bool = True,
) -> FloatArray:
    """
    Array-level mapping of source times ``t`` onto target times ``s``.

    Args:
        index: Target index per source point (alpha or beta).
        t: Source times.
        s: Target times.
        delta: Slope of the map across a many-to-one run.
        lower: Domain start.
        upper: Domain end.
        pinned: Both curves are anchored; the first and last source points
            are mapped exactly onto ``lower`` and ``upper``.

    Examples:
        >>> spread_times([0, 1, 1, 1, 2], [0, 2, 3, 4, 20], [0, 10, 20], 0.1, 0, 20)
        array([ 0. ,  9.9, 10. , 10.1, 20. ])
    """
    idx = np.asarray(index, dtype=np.intp)
    tv = np.asarray(t, dtype=np.float64)
    sv = np.asarray(s, dtype=np.float64)
    runs = _runs(idx)
    half = np.array(
        [delta * (tv[stop - 1] - tv[start]) / 2 for start, stop in runs],
        dtype=np.float64,
    )

    x = _place(idx, sv, runs, half, pinned)
    for _ in range(MAX_HALVINGS):
        bad = _colliding(x, runs, lower, upper)
        if not bad:
            break
        for r in bad:
            half[r] /= 2
        x = _place(idx, sv, runs, half, pinned)

    if pinned:
        x[0], x[-1] = lower, upper
    eps = 1e-9 * (upper - lower)
    if np.any(np.diff(x) <= 0) or x[0] < lower or x[-1] > upper:
        x = enforce_strict(x, eps, lower=lower, upper=upper)
    return x


def warp_times(
    index: npt.ArrayLike,
    source: EventCurve,
    target: EventCurve,
    delta: float = DEFAULT_DELTA,
) -> WarpResult[PairwiseWarp]:
    """
    Map every point of ``source`` onto ``target``'s time axis.

    Returns:
        Ok(PairwiseWarp), or Err(NonPositiveDelta).
    """
    if not delta > 0:
        return Err(NonPositiveDelta(f"delta must be > 0, got {delta}"))
    domain = target.domain
    mapped = spread_times(
        index,
        source.times,
        target.times,
        delta,
        domain.t_min,
        domain.t_max,
        pinned=source.anchored and target.anchored,
    )
    return Ok(
        PairwiseWarp(
            source_id=source.id,
            target_id=target.id,
            source_times=source.times,
            mapped_times=frozen_array(mapped),
            delta=delta,
        )
    )


def warps_from_alignment(
    alignment: Alignment,
    a: EventCurve,
    b: EventCurve,
    delta: float = DEFAULT_DELTA,
) -> WarpResult[tuple[PairwiseWarp, PairwiseWarp]]:
    """Both directional maps read off an existing alignment of ``a`` with ``b``."""
    if alignment.shape != (a.times.size, b.times.size):
        return Err(
            ShapeMismatch(
                f"alignment of shape {alignment.shape} does not fit curves "
                f"{a.id!r} ({a.times.size}) and {b.id!r} ({b.times.size})"
            )
        )
    alpha, beta = extract_correspondence(alignment)
    return warp_times(alpha, a, b, delta).then(
        lambda forward: warp_times(beta, b, a, delta).map(
            lambda backward: (forward, backward)
        )
    )


def warp_pair(
    a: EventCurve,
    b: EventCurve,
    delta: float = DEFAULT_DELTA,
    metric: Metric = absolute_difference,
    force_last_event: bool = False,
) -> WarpResult[tuple[PairwiseWarp, PairwiseWarp]]:
    """
    Both directional maps between two anchored curves from one alignment.

    Returns:
        Ok((a onto b, b onto a)), or the first Err from validation or
        alignment.

    Examples:
        >>> from eventwarp.curves import Domain, prepare_curve
        >>> c = prepare_curve("c", [1.0, 2.0], Domain(0.0, 3.0)).unwrap()
        >>> forward, backward = warp_pair(c, c).unwrap()
        >>> forward.mapped_times.tolist()
        [0.0, 1.0, 2.0, 3.0]
    """
    if not delta > 0:
        return Err(NonPositiveDelta(f"delta must be > 0, got {delta}"))
    return align(a, b, metric, force_last_event=force_last_event).then(
        lambda found: warps_from_alignment(found[0], a, b, delta)
    )
