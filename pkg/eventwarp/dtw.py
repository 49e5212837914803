"""
Discrete dynamic time warping between two event sequences.

An alignment is a lattice path from the first pair of points to the last,
built from diagonal (1,1), vertical (1,0) and horizontal (0,1) steps. The
first step is always the diagonal that pairs the two first points. Each step
is weighted by half the time it spans on both curves,

    w(k) = (t[L_k] - t[L_{k-1}] + s[M_k] - s[M_{k-1}]) / 2,

so the first step weighs zero, and the alignment cost is the weighted sum of
value distances along the path. A vertical step may not be followed by a
horizontal one or vice versa: once several points of one curve have been
mapped onto a single point of the other, that point cannot fan out again.

The optimizer keeps one DP layer per arrival step so the move restriction is
enforced exactly; forbidden transitions carry ``inf`` and lose every
comparison. Ties prefer the diagonal, then vertical, then horizontal step.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import numpy.typing as npt
from loguru import logger

from .curves import EventCurve
from .errors import (
    InvalidForcedPair,
    ShapeMismatch,
    TooLarge,
    UnanchoredInput,
)
from .result import Err, Ok, WarpResult

type Step = tuple[int, int]
type Cell = tuple[int, int]
type Metric = Callable[[float, float], float]

DIAGONAL: Step = (1, 1)
VERTICAL: Step = (1, 0)
HORIZONTAL: Step = (0, 1)

# layer index == tie-break rank
STEPS: tuple[Step, Step, Step] = (DIAGONAL, VERTICAL, HORIZONTAL)
_D, _V, _H = 0, 1, 2
# layers allowed to precede each layer
_PREDECESSORS = ((_D, _V, _H), (_D, _V), (_D, _H))

ENUMERATION_LIMIT = 8


def absolute_difference(x: float, y: float) -> float:
    """Euclidean distance on the real line."""
    return abs(x - y)


@dataclass(frozen=True)
class Alignment:
    """A monotone lattice path, stored as its step sequence.

    Examples:
        >>> path = Alignment(((1, 1), (1, 0), (1, 1)))
        >>> path.shape
        (3, 2)
        >>> path.cells
        ((0, 0), (1, 0), (2, 1))
    """

    steps: tuple[Step, ...]

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[Step]:
        return iter(self.steps)

    @cached_property
    def shape(self) -> tuple[int, int]:
        """(ℓ, m): the sum of all steps."""
        return (sum(s[0] for s in self.steps), sum(s[1] for s in self.steps))

    @cached_property
    def cells(self) -> tuple[Cell, ...]:
        """0-based (i, j) index pairs visited by the path."""
        i = j = 0
        visited = []
        for di, dj in self.steps:
            i += di
            j += dj
            visited.append((i - 1, j - 1))
        return tuple(visited)

    def adjacency_violations(self) -> int:
        """Number of vertical/horizontal steps directly following each other."""
        return sum(
            1
            for prev, step in zip(self.steps, self.steps[1:], strict=False)
            if {prev, step} == {VERTICAL, HORIZONTAL}
        )

    def is_valid(self) -> bool:
        """Starts with the diagonal and uses only lattice steps."""
        return bool(self.steps) and self.steps[0] == DIAGONAL and all(
            step in STEPS for step in self.steps
        )

    def transpose(self) -> Alignment:
        """The same path with the roles of the two sequences swapped."""
        return Alignment(tuple((dj, di) for di, dj in self.steps))

    @classmethod
    def diagonal(cls, length: int) -> Alignment:
        return cls((DIAGONAL,) * length)

    def __str__(self) -> str:
        return "{" + ",".join(f"({di},{dj})" for di, dj in self.steps) + "}"


@dataclass(frozen=True, order=True)
class AlignmentCost:
    """Weighted alignment distance, always >= 0 for a nonnegative metric."""

    total: float


def _weights(
    alignment: Alignment, t: Sequence[float], s: Sequence[float]
) -> Iterator[tuple[Cell, float]]:
    prev: Cell | None = None
    for cell in alignment.cells:
        if prev is None:
            yield cell, 0.0
        else:
            dt = t[cell[0]] - t[prev[0]]
            ds = s[cell[1]] - s[prev[1]]
            yield cell, (dt + ds) / 2
        prev = cell


def path_cost(
    alignment: Alignment,
    a: Sequence[float] | npt.ArrayLike,
    t: Sequence[float] | npt.ArrayLike,
    b: Sequence[float] | npt.ArrayLike,
    s: Sequence[float] | npt.ArrayLike,
    metric: Metric = absolute_difference,
) -> WarpResult[AlignmentCost]:
    """Weighted cost of ``alignment`` on raw value/time arrays.

    Returns:
        Ok(AlignmentCost), or Err(ShapeMismatch) if the path does not span
        exactly (len(a), len(b)).
    """
    av, tv, bv, sv = (np.asarray(x, dtype=np.float64).tolist() for x in (a, t, b, s))
    if len(av) != len(tv) or len(bv) != len(sv):
        return Err(ShapeMismatch("values and times must have equal length"))
    if not alignment.is_valid() or alignment.shape != (len(av), len(bv)):
        return Err(
            ShapeMismatch(
                f"alignment spans {alignment.shape}, sequences are {(len(av), len(bv))}"
            )
        )
    total = 0.0
    for (i, j), w in _weights(alignment, tv, sv):
        total += w * metric(av[i], bv[j])
    return Ok(AlignmentCost(total))


def alignment_cost(
    alignment: Alignment,
    a: EventCurve,
    b: EventCurve,
    metric: Metric = absolute_difference,
) -> WarpResult[AlignmentCost]:
    """Weighted cost of ``alignment`` between two curves."""
    return path_cost(alignment, a.values, a.times, b.values, b.times, metric)


def _solve(
    a: list[float],
    t: list[float],
    b: list[float],
    s: list[float],
    metric: Metric,
    end_diagonal: bool,
) -> tuple[list[Step], float]:
    """Layered DP on one rectangle; the first cell is the forced start."""
    n_a, n_b = len(a), len(b)
    inf = math.inf
    cost = [[[inf] * n_b for _ in range(n_a)] for _ in STEPS]
    back = [[[-1] * n_b for _ in range(n_a)] for _ in STEPS]
    cost[_D][0][0] = 0.0

    for i in range(n_a):
        for j in range(n_b):
            if i == 0 and j == 0:
                continue
            d = metric(a[i], b[j])
            for layer, (di, dj) in enumerate(STEPS):
                pi, pj = i - di, j - dj
                if pi < 0 or pj < 0:
                    continue
                best, best_layer = inf, -1
                for prev_layer in _PREDECESSORS[layer]:
                    candidate = cost[prev_layer][pi][pj]
                    if candidate < best:
                        best, best_layer = candidate, prev_layer
                if best_layer < 0:
                    continue
                w = ((t[i] - t[pi]) + (s[j] - s[pj])) / 2
                cost[layer][i][j] = best + w * d
                back[layer][i][j] = best_layer

    i, j = n_a - 1, n_b - 1
    candidates = (_D,) if end_diagonal else (_D, _V, _H)
    layer = min(candidates, key=lambda lay: (cost[lay][i][j], lay))
    total = cost[layer][i][j]

    steps: list[Step] = []
    while (i, j) != (0, 0):
        di, dj = STEPS[layer]
        steps.append((di, dj))
        layer = back[layer][i][j]
        i, j = i - di, j - dj
    steps.append(DIAGONAL)
    steps.reverse()
    return steps, total


def _check_forced(
    pairs: Sequence[Cell], shape: tuple[int, int]
) -> WarpResult[list[Cell]]:
    checked: list[Cell] = []
    prev: Cell = (0, 0)
    for i, j in sorted({(int(p[0]), int(p[1])) for p in pairs}):
        pair = (i, j)
        if not (0 <= i < shape[0] and 0 <= j < shape[1]):
            return Err(InvalidForcedPair(f"forced pair {pair} outside {shape}"))
        if pair == (0, 0):
            continue
        if i - prev[0] < 1 or j - prev[1] < 1:
            return Err(
                InvalidForcedPair(
                    f"forced pair {pair} cannot be entered diagonally after {prev}"
                )
            )
        checked.append(pair)
        prev = pair
    return Ok(checked)


def align_sequences(
    a: Sequence[float] | npt.ArrayLike,
    t: Sequence[float] | npt.ArrayLike,
    b: Sequence[float] | npt.ArrayLike,
    s: Sequence[float] | npt.ArrayLike,
    metric: Metric = absolute_difference,
    forced_pairs: Sequence[Cell] = (),
) -> WarpResult[tuple[Alignment, AlignmentCost]]:
    """
    Optimal alignment of values ``a`` (at times ``t``) with ``b`` (at ``s``).

    Forced pairs (0-based index pairs) are entered by a diagonal step; the
    problem is solved on the sub-rectangles between consecutive pairs and
    the pieces are concatenated.

    Returns:
        Ok((Alignment, AlignmentCost)), Err(ShapeMismatch) for empty or
        ragged inputs, Err(InvalidForcedPair).

    Examples:
        >>> path, cost = align_sequences([0, 1], [0, 1], [0, 1], [0, 1]).unwrap()
        >>> str(path), cost.total
        ('{(1,1),(1,1)}', 0.0)
    """
    av, tv, bv, sv = (np.asarray(x, dtype=np.float64).tolist() for x in (a, t, b, s))
    if not av or not bv or len(av) != len(tv) or len(bv) != len(sv):
        return Err(ShapeMismatch("sequences must be nonempty with one time per value"))

    checked = _check_forced(forced_pairs, (len(av), len(bv)))
    if checked.is_err():
        return Err(checked.unwrap_err(), _skip_logging=True)

    forced = checked.unwrap()
    end = (len(av) - 1, len(bv) - 1)
    corners = [(0, 0), *forced] + ([] if forced and forced[-1] == end else [end])
    steps: list[Step] = []
    for k, ((i0, j0), (i1, j1)) in enumerate(zip(corners, corners[1:], strict=False)):
        piece, _ = _solve(
            av[i0 : i1 + 1],
            tv[i0 : i1 + 1],
            bv[j0 : j1 + 1],
            sv[j0 : j1 + 1],
            metric,
            end_diagonal=k < len(forced),
        )
        steps.extend(piece if not steps else piece[1:])
    if not steps:
        steps = [DIAGONAL]

    alignment = Alignment(tuple(steps))
    return path_cost(alignment, av, tv, bv, sv, metric).map(
        lambda cost: (alignment, cost)
    )


def align(
    a: EventCurve,
    b: EventCurve,
    metric: Metric = absolute_difference,
    forced_pairs: Sequence[Cell] = (),
    force_last_event: bool = False,
) -> WarpResult[tuple[Alignment, AlignmentCost]]:
    """
    Optimal alignment of two anchored curves on the same domain.

    Args:
        a: Source curve (rows of the lattice).
        b: Target curve (columns).
        metric: Distance between curve values.
        forced_pairs: 0-based (i, j) pairs the path must pass through.
        force_last_event: Also force the last true events to be aligned.

    Returns:
        Ok((Alignment, AlignmentCost)) or Err(UnanchoredInput |
        InvalidForcedPair).
    """
    if not (a.anchored and b.anchored):
        return Err(UnanchoredInput(f"curves {a.id!r}, {b.id!r} must both be anchored"))
    if a.domain != b.domain:
        return Err(UnanchoredInput(f"curves {a.id!r}, {b.id!r} anchored on different domains"))

    pairs = list(forced_pairs)
    if force_last_event:
        pairs.append((a.last_event_index, b.last_event_index))
    result = align_sequences(a.values, a.times, b.values, b.times, metric, pairs)
    if result.is_ok():
        path, cost = result.unwrap()
        logger.debug(
            f"aligned {a.id!r}~{b.id!r}: {len(path)} steps, cost {cost.total:.6g}"
        )
    return result


def _paths(n_a: int, n_b: int) -> Iterator[tuple[Step, ...]]:
    def extend(i: int, j: int, last: Step, acc: list[Step]) -> Iterator[tuple[Step, ...]]:
        if (i, j) == (n_a, n_b):
            yield tuple(acc)
            return
        for step in STEPS:
            if {last, step} == {VERTICAL, HORIZONTAL}:
                continue
            ni, nj = i + step[0], j + step[1]
            if ni <= n_a and nj <= n_b:
                acc.append(step)
                yield from extend(ni, nj, step, acc)
                acc.pop()

    yield from extend(1, 1, DIAGONAL, [DIAGONAL])


def enumerate_alignments(n_a: int, n_b: int) -> WarpResult[list[Alignment]]:
    """
    Every admissible alignment of sequences of lengths ``n_a`` and ``n_b``.

    Used as a brute-force oracle for the DP; guarded at 8 points per side.

    Examples:
        >>> [str(p) for p in enumerate_alignments(2, 2).unwrap()]
        ['{(1,1),(1,1)}']
    """
    if not (1 <= n_a <= ENUMERATION_LIMIT and 1 <= n_b <= ENUMERATION_LIMIT):
        return Err(
            TooLarge(
                f"enumeration limited to 1..{ENUMERATION_LIMIT} points, got {(n_a, n_b)}"
            )
        )
    return Ok([Alignment(steps) for steps in _paths(n_a, n_b)])


def render_alignment(
    alignment: Alignment, a_label: str = "a", b_label: str = "b"
) -> str:
    """
    Text correspondence diagram, one line per group of linked points.

    Labels are 1-based for display.

    Examples:
        >>> path = Alignment(((1, 1), (1, 0), (1, 0), (1, 1), (1, 1), (0, 1)))
        >>> print(render_alignment(path))
        a1 a2 a3 -- b1
        a4 -- b2
        a5 -- b3 b4
    """
    groups: list[tuple[list[int], list[int]]] = []
    for step, (i, j) in zip(alignment.steps, alignment.cells, strict=True):
        if step == DIAGONAL or not groups:
            groups.append(([i], [j]))
        elif step == VERTICAL:
            groups[-1][0].append(i)
        else:
            groups[-1][1].append(j)
    return "\n".join(
        " ".join(f"{a_label}{i + 1}" for i in rows)
        + " -- "
        + " ".join(f"{b_label}{j + 1}" for j in cols)
        for rows, cols in groups
    )
