"""
Registration of a sample of event curves onto a common internal clock.

Every pair of curves is aligned once. The map sending curve i's event
times onto curve j's clock is averaged over all partners j to estimate the
inverse warping of curve i,

    h_inv_i(t_k) = 1/(n-1) * sum_{j != i} g_ji(t_k),

and the registered curve keeps its values while its event times are
replaced by h_inv_i(t_k). Estimates are then interpolated onto a uniform
grid of the domain for comparison and clustering.
"""

from __future__ import annotations

import os
import time
from collections.abc import Hashable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from itertools import combinations
from typing import Protocol

import numpy as np
from loguru import logger

from .config import PipelineConfig, get_pipeline_config
from .curves import (
    CurveId,
    Domain,
    EventCurve,
    FloatArray,
    WarpingFunction,
    check_sample,
    frozen_array,
)
from .dtw import Metric, absolute_difference
from .errors import (
    EmptyGroup,
    IdMismatch,
    ShapeMismatch,
    TooFewCurves,
    UnanchoredInput,
)
from .pairwise import DEFAULT_DELTA, PairwiseWarp, warp_pair
from .result import Err, Ok, Result, WarpResult

DEFAULT_GRID_SIZE = 101


class TimedCurve(Protocol):
    """Anything with event times and values on a domain."""

    @property
    def times(self) -> FloatArray: ...
    @property
    def values(self) -> FloatArray: ...
    @property
    def domain(self) -> Domain: ...
    @property
    def anchored(self) -> bool: ...
    @property
    def event_times(self) -> FloatArray: ...
    @property
    def n_events(self) -> int: ...
    @property
    def curve_id(self) -> CurveId: ...


@dataclass(frozen=True, eq=False)
class WarpingEstimate:
    """Estimated inverse warping of one curve.

    ``h_inv_values[k]`` is the estimate at ``event_times[k]``; the grid
    fields are filled by to_common_grid.
    """

    curve_id: CurveId
    event_times: FloatArray
    h_inv_values: FloatArray
    domain: Domain
    grid: FloatArray | None = None
    grid_values: FloatArray | None = None

    @property
    def on_grid(self) -> bool:
        return self.grid is not None and self.grid_values is not None

    def as_function(self) -> WarpingFunction:
        """The gridded estimate as a WarpingFunction.

        Raises:
            ShapeMismatch: if the estimate has not been gridded.
        """
        if self.grid is None or self.grid_values is None:
            raise ShapeMismatch(f"estimate {self.curve_id!r} is not on a grid")
        return WarpingFunction(self.grid, self.grid_values)

    @classmethod
    def identity(cls, curve: EventCurve) -> WarpingEstimate:
        return cls(curve.id, curve.times, curve.times, curve.domain)


@dataclass(frozen=True, eq=False)
class RegisteredCurve:
    """A curve whose event times have been moved onto the common clock."""

    curve_id: CurveId
    times: FloatArray
    values: FloatArray
    domain: Domain
    n_events: int
    anchored: bool

    @property
    def event_times(self) -> FloatArray:
        first = 1 if self.anchored else 0
        return self.times[first : first + self.n_events]

    @property
    def event_values(self) -> FloatArray:
        first = 1 if self.anchored else 0
        return self.values[first : first + self.n_events]


@dataclass(frozen=True, eq=False)
class MeanCurve:
    """Pointwise mean of a group of curves on a grid."""

    grid: FloatArray
    mean_values: FloatArray
    group: Hashable | None = None
    size: int = 0


@dataclass(frozen=True)
class EventSummary:
    """Mean first and last true event time across a sample."""

    n: int
    mean_first: float
    mean_last: float


@dataclass(frozen=True, eq=False)
class RegistrationRun:
    """Output of register_sample."""

    estimates: list[WarpingEstimate]
    registered: list[RegisteredCurve]
    pairs_aligned: int
    grid: FloatArray
    seconds: float = 0.0


def _pair_worker(
    args: tuple[EventCurve, EventCurve, float, Metric, bool],
) -> WarpResult[tuple[PairwiseWarp, PairwiseWarp]]:
    """Top-level picklable worker for ProcessPoolExecutor."""
    a, b, delta, metric, force_last_event = args
    return warp_pair(a, b, delta, metric, force_last_event)


def _worker_count(threads: int, tasks: int) -> int:
    wanted = (os.cpu_count() or 1) if threads == 0 else threads
    return max(1, min(wanted, tasks))


def _pairwise_phase(
    curves: Sequence[EventCurve],
    delta: float,
    metric: Metric,
    force_last_event: bool,
    threads: int,
) -> WarpResult[tuple[list[list[FloatArray | None]], int]]:
    n = len(curves)
    pairs = list(combinations(range(n), 2))
    tasks = [(curves[i], curves[j], delta, metric, force_last_event) for i, j in pairs]

    workers = _worker_count(threads, len(tasks))
    if workers == 1:
        outcomes = [_pair_worker(task) for task in tasks]
    else:
        logger.debug(f"aligning {len(tasks)} pairs on {workers} processes")
        with ProcessPoolExecutor(max_workers=workers) as ex:
            # map preserves task order, so the reduction below is worker-independent
            chunk = max(1, len(tasks) // (4 * workers))
            outcomes = list(ex.map(_pair_worker, tasks, chunksize=chunk))

    maps: list[list[FloatArray | None]] = [[None] * n for _ in range(n)]
    for (i, j), outcome in zip(pairs, outcomes, strict=True):
        if outcome.is_err():
            return Err(outcome.unwrap_err(), _skip_logging=True)
        forward, backward = outcome.unwrap()
        maps[i][j] = forward.mapped_times
        maps[j][i] = backward.mapped_times
    return Ok((maps, len(pairs)))


def _validate_sample(curves: Sequence[EventCurve]) -> WarpResult[Domain]:
    if len(curves) < 2:
        return Err(TooFewCurves(f"registration needs at least 2 curves, got {len(curves)}"))
    unanchored = [c.id for c in curves if not c.anchored]
    if unanchored:
        return Err(UnanchoredInput(f"curves {unanchored[:5]} are not anchored"))
    ids = [c.id for c in curves]
    if len(set(ids)) != len(ids):
        return Err(IdMismatch("curve ids must be unique within a sample"))
    return check_sample(curves)


def _estimate(
    curves: Sequence[EventCurve],
    delta: float,
    metric: Metric,
    force_last_event: bool,
    threads: int,
) -> WarpResult[tuple[list[WarpingEstimate], int]]:
    def _average(
        found: tuple[list[list[FloatArray | None]], int],
    ) -> tuple[list[WarpingEstimate], int]:
        maps, pairs = found
        n = len(curves)
        estimates = []
        for i, curve in enumerate(curves):
            stack = np.stack([m for j, m in enumerate(maps[i]) if j != i and m is not None])
            h_inv = np.sum(stack, axis=0) / (n - 1)
            h_inv[0], h_inv[-1] = curve.domain.t_min, curve.domain.t_max
            estimates.append(
                WarpingEstimate(
                    curve_id=curve.id,
                    event_times=curve.times,
                    h_inv_values=frozen_array(h_inv),
                    domain=curve.domain,
                )
            )
        return estimates, pairs

    return (
        _validate_sample(curves)
        .then(lambda _: _pairwise_phase(curves, delta, metric, force_last_event, threads))
        .map(_average)
    )


def estimate_warpings(
    curves: Sequence[EventCurve],
    delta: float = DEFAULT_DELTA,
    metric: Metric = absolute_difference,
    force_last_event: bool = False,
    threads: int = 1,
) -> WarpResult[list[WarpingEstimate]]:
    """
    Estimate the inverse warping of every curve from all pairwise maps.

    Args:
        curves: At least two anchored curves on one domain, unique ids.
        delta: Spreading slope for many-to-one runs.
        metric: Value distance used by the alignment.
        force_last_event: Force every pair's last true events together.
        threads: Worker processes for the pairwise phase; 0 uses every
            core, 1 runs in-process. The result does not depend on it.

    Returns:
        Ok(estimates) in input order, or Err(TooFewCurves | UnanchoredInput
        | IdMismatch | DomainMismatch) or any alignment error.
    """
    return _estimate(curves, delta, metric, force_last_event, threads).map(
        lambda found: found[0]
    )


def to_common_grid(
    estimate: WarpingEstimate, grid_size: int = DEFAULT_GRID_SIZE
) -> WarpingEstimate:
    """
    Interpolate an estimate linearly onto a uniform grid of the domain.

    The estimate is pinned to (t_min, t_min) and (t_max, t_max) before
    interpolating.

    Examples:
        >>> est = WarpingEstimate(1, np.array([5.0]), np.array([6.0]), Domain(0.0, 10.0))
        >>> float(to_common_grid(est, 21).grid_values[5])
        3.0
    """
    domain = estimate.domain
    xp = np.asarray(estimate.event_times, dtype=np.float64)
    fp = np.asarray(estimate.h_inv_values, dtype=np.float64)
    if xp[0] > domain.t_min:
        xp, fp = np.concatenate(([domain.t_min], xp)), np.concatenate(([domain.t_min], fp))
    if xp[-1] < domain.t_max:
        xp, fp = np.concatenate((xp, [domain.t_max])), np.concatenate((fp, [domain.t_max]))

    grid = domain.grid(grid_size)
    values = np.interp(grid, xp, fp)
    values[0], values[-1] = domain.t_min, domain.t_max
    return replace(estimate, grid=grid, grid_values=frozen_array(values))


def register(curve: EventCurve, estimate: WarpingEstimate) -> WarpResult[RegisteredCurve]:
    """
    Move ``curve``'s event times onto the common clock.

    Returns:
        Ok(RegisteredCurve) with values untouched, or Err(IdMismatch) when
        the estimate belongs to another curve or another event grid.
    """
    if estimate.curve_id != curve.id:
        return Err(IdMismatch(f"estimate for {estimate.curve_id!r} applied to {curve.id!r}"))
    if estimate.h_inv_values.shape != curve.times.shape:
        return Err(
            IdMismatch(
                f"estimate for {curve.id!r} has {estimate.h_inv_values.size} points, "
                f"curve has {curve.times.size}"
            )
        )
    return Ok(
        RegisteredCurve(
            curve_id=curve.id,
            times=estimate.h_inv_values,
            values=curve.values,
            domain=curve.domain,
            n_events=curve.n_events,
            anchored=curve.anchored,
        )
    )


def curve_on_grid(curve: TimedCurve, grid: FloatArray) -> FloatArray:
    """Linear interpolation of a curve through its anchored points."""
    times, values = curve.times, curve.values
    if not curve.anchored:
        domain = curve.domain
        times = np.concatenate(([domain.t_min], times, [domain.t_max]))
        values = np.concatenate(([0.0], values, [values[-1]]))
    return np.interp(grid, times, values)


def mean_curve(
    curves: Sequence[TimedCurve],
    grid_size: int = DEFAULT_GRID_SIZE,
    group: Hashable | None = None,
) -> WarpResult[MeanCurve]:
    """
    Pointwise mean of curves interpolated onto the grid.

    Accepts EventCurves (the mean before registration) as well as
    RegisteredCurves.

    Returns:
        Ok(MeanCurve), or Err(EmptyGroup).
    """
    if not curves:
        return Err(EmptyGroup(f"group {group!r} has no curves"))
    grid = curves[0].domain.grid(grid_size)
    stack = np.stack([curve_on_grid(c, grid) for c in curves])
    return Ok(
        MeanCurve(
            grid=grid,
            mean_values=frozen_array(np.sum(stack, axis=0) / len(curves)),
            group=group,
            size=len(curves),
        )
    )


def group_means(
    curves: Sequence[TimedCurve],
    labels: Sequence[Hashable],
    grid_size: int = DEFAULT_GRID_SIZE,
) -> WarpResult[list[MeanCurve]]:
    """
    One mean curve per distinct label, in sorted label order.

    Returns:
        Ok(list of MeanCurve), Err(EmptyGroup) for an empty sample or
        Err(ShapeMismatch) when labels and curves differ in length.
    """
    if len(labels) != len(curves):
        return Err(ShapeMismatch(f"{len(labels)} labels for {len(curves)} curves"))
    if not curves:
        return Err(EmptyGroup("no curves to group"))
    groups = sorted(set(labels), key=lambda g: (type(g).__name__, g))  # type: ignore[arg-type]
    return Result.traverse(
        groups,
        lambda g: mean_curve(
            [c for c, label in zip(curves, labels, strict=True) if label == g],
            grid_size,
            group=g,
        ),
    )


def recenter(estimates: Sequence[WarpingEstimate]) -> WarpResult[list[WarpingEstimate]]:
    """
    Shift gridded estimates so their sample average is the identity.

    The offset (mean - identity) is subtracted on the grid and, through
    linear interpolation, at the event times.

    Returns:
        Ok(recentered estimates), Err(ShapeMismatch) when an estimate is
        not gridded, grids differ, or recentering breaks strict
        monotonicity.
    """
    if not estimates:
        return Ok([])
    grid = estimates[0].grid
    if grid is None or any(
        e.grid is None or e.grid_values is None or not np.array_equal(e.grid, grid)
        for e in estimates
    ):
        return Err(ShapeMismatch("recentering needs estimates on one common grid"))

    stack = np.stack([e.grid_values for e in estimates if e.grid_values is not None])
    offset = np.sum(stack, axis=0) / len(estimates) - grid
    offset[0] = offset[-1] = 0.0

    shifted = []
    for e, values in zip(estimates, stack, strict=True):
        grid_values = values - offset
        h_inv = e.h_inv_values - np.interp(e.event_times, grid, offset)
        if np.any(np.diff(grid_values) <= 0) or np.any(np.diff(h_inv) <= 0):
            return Err(
                ShapeMismatch(f"recentering makes estimate {e.curve_id!r} non-monotone")
            )
        shifted.append(
            replace(e, grid_values=frozen_array(grid_values), h_inv_values=frozen_array(h_inv))
        )
    return Ok(shifted)


def register_sample(
    curves: Sequence[EventCurve],
    config: PipelineConfig | None = None,
    metric: Metric = absolute_difference,
) -> WarpResult[RegistrationRun]:
    """
    Estimate, grid, optionally recenter and apply warpings for a sample.

    Settings not passed in ``config`` come from the current pipeline
    defaults.

    Examples:
        >>> from eventwarp.curves import Domain, prepare_curve
        >>> dom = Domain(0.0, 10.0)
        >>> pair = [prepare_curve(i, [2.0, 5.0], dom).unwrap() for i in (1, 2)]
        >>> register_sample(pair).unwrap().pairs_aligned
        1
    """
    cfg = config if config is not None else get_pipeline_config()
    started = time.perf_counter()

    def _apply(found: tuple[list[WarpingEstimate], int]) -> WarpResult[RegistrationRun]:
        raw, pairs = found
        gridded = [to_common_grid(e, cfg.grid_size) for e in raw]
        centred = recenter(gridded) if cfg.recenter else Ok(gridded)

        def _finish(estimates: list[WarpingEstimate]) -> WarpResult[RegistrationRun]:
            registered = Result.traverse(
                list(zip(curves, estimates, strict=True)), lambda ce: register(*ce)
            )
            elapsed = time.perf_counter() - started
            logger.info(
                f"registered {len(curves)} curves from {pairs} alignments in {elapsed:.2f}s"
            )
            return registered.map(
                lambda regs: RegistrationRun(
                    estimates=estimates,
                    registered=regs,
                    pairs_aligned=pairs,
                    grid=estimates[0].as_function().grid,
                    seconds=elapsed,
                )
            )

        return centred.then(_finish)

    validated = cfg.validate()
    if validated.is_err():
        return Err(validated.unwrap_err(), _skip_logging=True)
    return _estimate(
        curves, cfg.delta, metric, cfg.force_last_event, cfg.threads
    ).then(_apply)


def event_time_summary(curves: Sequence[TimedCurve]) -> WarpResult[EventSummary]:
    """
    Mean first and mean last true event time of a sample.

    Comparing the summary of the observed curves with that of their
    registered versions shows how far the cross-sectional mean misplaces
    the typical first and last event.

    Returns:
        Ok(EventSummary), or Err(EmptyGroup).
    """
    if not curves:
        return Err(EmptyGroup("no curves to summarize"))
    firsts = np.array([c.event_times[0] for c in curves])
    lasts = np.array([c.event_times[-1] for c in curves])
    return Ok(
        EventSummary(
            n=len(curves),
            mean_first=float(np.mean(firsts)),
            mean_last=float(np.mean(lasts)),
        )
    )
