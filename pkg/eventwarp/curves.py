"""
Event curves: the data types every other module works on.

An EventCurve is one subject's ordered event times together with the
cumulative curve value at each event, either standardized (k/n) or as a
raw count (k). Curves are immutable; anchoring returns a new curve with the
domain endpoints added as pseudo-events.

Ties in event times (twins, coarse recording) are broken by nudging the later
duplicate forward by ``Domain.eps_dup``, a billionth of the domain width.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt
from loguru import logger

from .config import CurveMode
from .errors import (
    AlreadyAnchored,
    DomainMismatch,
    EmptyCurve,
    InvalidDomain,
    OutOfDomain,
    ShapeMismatch,
)
from .result import Err, Ok, WarpResult

type FloatArray = npt.NDArray[np.float64]
type CurveId = int | str

DUP_FRACTION = 1e-9


def frozen_array(values: Any) -> FloatArray:
    """Copy ``values`` into a read-only float64 array."""
    array = np.array(values, dtype=np.float64)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Domain:
    """Closed observation window [t_min, t_max].

    Half-open windows such as [0, 168) are treated as closed; an event at
    t_max is moved inward when the curve is anchored.

    Examples:
        >>> Domain(0.0, 10.0).width
        10.0
    """

    t_min: float
    t_max: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.t_min) and np.isfinite(self.t_max)):
            raise InvalidDomain(f"non-finite bounds [{self.t_min}, {self.t_max}]")
        if not self.t_min < self.t_max:
            raise InvalidDomain(f"t_min must be < t_max, got [{self.t_min}, {self.t_max}]")

    @classmethod
    def checked(cls, t_min: float, t_max: float) -> WarpResult[Domain]:
        """Build a Domain, reporting bad bounds as Err(InvalidDomain)."""
        try:
            return Ok(cls(float(t_min), float(t_max)))
        except InvalidDomain as e:
            return Err(e)

    @property
    def width(self) -> float:
        return self.t_max - self.t_min

    @property
    def eps_dup(self) -> float:
        """Tie-breaking perturbation for coincident times."""
        return DUP_FRACTION * self.width

    def contains(self, times: npt.ArrayLike) -> bool:
        arr = np.asarray(times, dtype=np.float64)
        return bool(np.all((arr >= self.t_min) & (arr <= self.t_max)))

    def grid(self, size: int) -> FloatArray:
        """Uniform grid of ``size`` points spanning the domain, endpoints exact."""
        points = np.linspace(self.t_min, self.t_max, size)
        points[0], points[-1] = self.t_min, self.t_max
        return frozen_array(points)


def enforce_strict(
    values: npt.ArrayLike,
    eps: float,
    lower: float | None = None,
    upper: float | None = None,
) -> FloatArray:
    """Make a sequence strictly increasing by minimal ``eps`` nudges.

    A forward sweep lifts every value that does not exceed its predecessor
    (starting from ``lower`` if given); a backward sweep then pushes values
    below ``upper`` and below their successor.

    Examples:
        >>> enforce_strict([1.0, 1.0, 4.0], 0.5).tolist()
        [1.0, 1.5, 4.0]
    """
    x = np.array(values, dtype=np.float64)
    if x.size == 0:
        return x
    if lower is not None and x[0] < lower:
        x[0] = lower
    for k in range(1, x.size):
        if x[k] <= x[k - 1]:
            x[k] = x[k - 1] + eps
    if upper is not None:
        x[-1] = min(x[-1], upper)
        for k in range(x.size - 2, -1, -1):
            if x[k] >= x[k + 1]:
                x[k] = x[k + 1] - eps
    return x


@dataclass(frozen=True, eq=False)
class EventCurve:
    """One subject's event times and cumulative values.

    Attributes:
        id: Subject identifier.
        times: Strictly increasing event times (anchors included once anchored).
        values: Nondecreasing curve values at ``times``.
        domain: Observation window shared by the sample.
        mode: ``"standardized"`` (k/n) or ``"raw"`` (k).
        n_events: Number of true events, anchors excluded.
        anchored: Whether (t_min, 0) and (t_max, last value) were added.
    """

    id: CurveId
    times: FloatArray
    values: FloatArray
    domain: Domain
    mode: CurveMode = "standardized"
    n_events: int = 0
    anchored: bool = False

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def curve_id(self) -> CurveId:
        return self.id

    @property
    def first_event_index(self) -> int:
        """Index of the first true event within ``times``."""
        return 1 if self.anchored else 0

    @property
    def last_event_index(self) -> int:
        """Index of the last true event within ``times``."""
        return self.n_events if self.anchored else self.n_events - 1

    @property
    def event_slice(self) -> slice:
        return slice(self.first_event_index, self.last_event_index + 1)

    @property
    def event_times(self) -> FloatArray:
        """True event times, anchors excluded."""
        return self.times[self.event_slice]

    @property
    def event_values(self) -> FloatArray:
        return self.values[self.event_slice]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, EventCurve)
            and self.id == other.id
            and self.domain == other.domain
            and self.mode == other.mode
            and self.anchored == other.anchored
            and np.array_equal(self.times, other.times)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None  # type: ignore[assignment]


def build_curve(
    id: CurveId,
    raw_event_times: Sequence[float] | npt.ArrayLike,
    domain: Domain,
    mode: CurveMode = "standardized",
    values: Sequence[float] | npt.ArrayLike | None = None,
) -> WarpResult[EventCurve]:
    """
    Build a curve from unordered event times.

    Values follow the cumulative count of events: (k+1)/n in standardized
    mode, k+1 in raw mode. ``values`` overrides the computed values (kept
    aligned with their times through the sort) and must be nondecreasing.
    Standardized and raw curves must not be mixed in one sample.

    Returns:
        Ok(EventCurve), or Err(EmptyCurve | OutOfDomain | ShapeMismatch).

    Examples:
        >>> curve = build_curve(1, [2.0, 1.0, 3.0], Domain(0.0, 10.0)).unwrap()
        >>> curve.times.tolist()
        [1.0, 2.0, 3.0]
    """
    times = np.asarray(raw_event_times, dtype=np.float64).ravel()
    if times.size == 0:
        return Err(EmptyCurve(f"curve {id!r} has no events"))
    if not np.all(np.isfinite(times)) or not domain.contains(times):
        outside = times[~((times >= domain.t_min) & (times <= domain.t_max))]
        return Err(
            OutOfDomain(
                f"curve {id!r} has times {outside.tolist()} outside "
                f"[{domain.t_min}, {domain.t_max}]"
            )
        )

    order = np.argsort(times, kind="stable")
    times = times[order]
    n = times.size

    if values is None:
        counts = np.arange(1, n + 1, dtype=np.float64)
        curve_values = counts / n if mode == "standardized" else counts
    else:
        given = np.asarray(values, dtype=np.float64).ravel()
        if given.size != n:
            return Err(
                ShapeMismatch(f"curve {id!r}: {given.size} values for {n} events")
            )
        curve_values = given[order]
        if np.any(np.diff(curve_values) < 0):
            return Err(ShapeMismatch(f"curve {id!r}: values must be nondecreasing"))

    if np.any(np.diff(times) <= 0):
        logger.debug(f"curve {id!r}: separating tied event times")
        times = enforce_strict(times, domain.eps_dup, upper=domain.t_max)

    return Ok(
        EventCurve(
            id=id,
            times=frozen_array(times),
            values=frozen_array(curve_values),
            domain=domain,
            mode=mode,
            n_events=n,
        )
    )


def anchor_curve(
    curve: EventCurve, domain: Domain | None = None
) -> WarpResult[EventCurve]:
    """
    Add (t_min, 0) and (t_max, last value) pseudo-events.

    Events lying on a domain endpoint are moved inward by ``eps_dup`` (and
    neighbours re-separated) so the anchors stay strictly outside the event
    range; this is logged at WARNING.

    Returns:
        Ok(anchored curve), Err(AlreadyAnchored) or Err(DomainMismatch).

    Examples:
        >>> base = build_curve(1, [1.0, 2.0, 3.0], Domain(0.0, 10.0)).unwrap()
        >>> anchor_curve(base).unwrap().times.tolist()
        [0.0, 1.0, 2.0, 3.0, 10.0]
    """
    if curve.anchored:
        return Err(AlreadyAnchored(f"curve {curve.id!r} is already anchored"))
    dom = curve.domain if domain is None else domain
    if dom != curve.domain:
        return Err(
            DomainMismatch(f"curve {curve.id!r} lives on {curve.domain}, not {dom}")
        )

    times = curve.times
    eps = dom.eps_dup
    if times[0] <= dom.t_min or times[-1] >= dom.t_max:
        logger.warning(
            f"curve {curve.id!r}: event on a domain endpoint, moved inward by {eps:.3g}"
        )
        times = enforce_strict(times, eps, lower=dom.t_min + eps, upper=dom.t_max - eps)

    return Ok(
        EventCurve(
            id=curve.id,
            times=frozen_array(np.concatenate(([dom.t_min], times, [dom.t_max]))),
            values=frozen_array(
                np.concatenate(([0.0], curve.values, [curve.values[-1]]))
            ),
            domain=dom,
            mode=curve.mode,
            n_events=curve.n_events,
            anchored=True,
        )
    )


def prepare_curve(
    id: CurveId,
    raw_event_times: Sequence[float] | npt.ArrayLike,
    domain: Domain,
    mode: CurveMode = "standardized",
    values: Sequence[float] | npt.ArrayLike | None = None,
) -> WarpResult[EventCurve]:
    """build_curve followed by anchor_curve."""
    return build_curve(id, raw_event_times, domain, mode, values).then(anchor_curve)


@dataclass(frozen=True, eq=False)
class WarpingFunction:
    """Strictly increasing, endpoint-fixing time map sampled on a grid.

    Evaluation and inversion interpolate linearly between samples.
    """

    grid: FloatArray
    values: FloatArray

    def __post_init__(self) -> None:
        if self.grid.shape != self.values.shape or self.grid.size < 2:
            raise ShapeMismatch("grid and values must have equal length >= 2")
        if np.any(np.diff(self.values) <= 0):
            raise ShapeMismatch("warping values must be strictly increasing")

    @property
    def domain(self) -> Domain:
        return Domain(float(self.grid[0]), float(self.grid[-1]))

    def __call__(self, t: npt.ArrayLike) -> FloatArray:
        return np.interp(np.asarray(t, dtype=np.float64), self.grid, self.values)

    def inverse(self, t: npt.ArrayLike) -> FloatArray:
        return np.interp(np.asarray(t, dtype=np.float64), self.values, self.grid)

    def fixes_endpoints(self, tol: float = 0.0) -> bool:
        return bool(
            abs(self.values[0] - self.grid[0]) <= tol
            and abs(self.values[-1] - self.grid[-1]) <= tol
        )


def check_sample(curves: Sequence[EventCurve]) -> WarpResult[Domain]:
    """Shared domain of a nonempty sample, or Err(DomainMismatch)."""
    domains = {c.domain for c in curves}
    if len(domains) != 1:
        return Err(DomainMismatch(f"sample spans {len(domains)} domains: {domains}"))
    return Ok(domains.pop())
