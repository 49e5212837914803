"""
CSV ingestion and the tabular outputs of the pipeline.

Input is long format, one row per event:

    curve_id,event_time[,value]

Rows of one curve need not be contiguous or sorted; curves keep the order
in which their ids first appear. Every output is a pandas DataFrame with a
header row, written without an index.
"""

from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

import numpy as np
import pandas as pd
from loguru import logger

from .cluster import ClusterProfile, Clustering, KSelection
from .config import CurveMode
from .curves import CurveId, Domain, EventCurve, FloatArray, prepare_curve
from .errors import ParseError
from .pairwise import PairwiseWarp
from .registration import EventSummary, MeanCurve, RegisteredCurve, WarpingEstimate
from .result import Err, Ok, Result, WarpResult
from .synth import SyntheticSample

ID_COLUMN = "curve_id"
TIME_COLUMN = "event_time"
VALUE_COLUMN = "value"


def _plain(value: object) -> CurveId:
    """numpy scalars to Python ints/strs so ids compare and print cleanly."""
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, int | str):
        return value
    return str(value)


def read_events(
    path: str | Path, domain: Domain, mode: CurveMode = "standardized"
) -> WarpResult[list[EventCurve]]:
    """
    Read an event CSV into anchored curves.

    Returns:
        Ok(curves) in order of first appearance, Err(ParseError) for a
        missing file, missing columns or non-numeric times, or any curve
        construction error.
    """
    source = Path(path)
    if not source.exists():
        return Err(ParseError(f"input file not found: {source}"))

    loaded = Result.of(lambda: pd.read_csv(source)).map_err(
        lambda e: ParseError(f"cannot read {source}: {e}")
    )
    if loaded.is_err():
        return Err(loaded.unwrap_err(), _skip_logging=True)
    frame = loaded.unwrap()

    missing = [c for c in (ID_COLUMN, TIME_COLUMN) if c not in frame.columns]
    if missing:
        return Err(ParseError(f"{source} lacks columns {missing}"))
    times = pd.to_numeric(frame[TIME_COLUMN], errors="coerce")
    if times.isna().any():
        bad = frame.index[times.isna()].tolist()[:5]
        return Err(ParseError(f"{source}: non-numeric event times in rows {bad}"))
    frame = frame.assign(**{TIME_COLUMN: times})

    has_values = VALUE_COLUMN in frame.columns
    groups = frame.groupby(ID_COLUMN, sort=False)
    logger.info(f"read {len(frame)} events for {groups.ngroups} curves from {source}")
    return Result.traverse(
        list(groups),
        lambda item: prepare_curve(
            _plain(item[0]),
            item[1][TIME_COLUMN].to_numpy(),
            domain,
            mode,
            item[1][VALUE_COLUMN].to_numpy() if has_values else None,
        ),
    )


def write_frame(frame: pd.DataFrame, path: str | Path) -> Path:
    """Write ``frame`` as CSV, creating parent directories."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(target, index=False)
    logger.debug(f"wrote {len(frame)} rows to {target}")
    return target


def events_frame(curves: Sequence[EventCurve]) -> pd.DataFrame:
    """True events of each curve in ingestion format."""
    return pd.DataFrame(
        {
            ID_COLUMN: [c.id for c in curves for _ in range(c.n_events)],
            TIME_COLUMN: np.concatenate([c.event_times for c in curves]),
        }
    )


def warpings_frame(
    curves: Sequence[EventCurve], estimates: Sequence[WarpingEstimate]
) -> pd.DataFrame:
    """Estimated inverse warping at every true event."""
    return pd.DataFrame(
        {
            ID_COLUMN: [c.id for c in curves for _ in range(c.n_events)],
            TIME_COLUMN: np.concatenate([c.event_times for c in curves]),
            "h_inv": np.concatenate(
                [e.h_inv_values[c.event_slice] for c, e in zip(curves, estimates, strict=True)]
            ),
        }
    )


def registered_frame(registered: Sequence[RegisteredCurve]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            ID_COLUMN: [r.curve_id for r in registered for _ in range(r.n_events)],
            "registered_time": np.concatenate([r.event_times for r in registered]),
            VALUE_COLUMN: np.concatenate([r.event_values for r in registered]),
        }
    )


def mean_frame(before: MeanCurve, after: MeanCurve) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "grid_t": before.grid,
            "mean_before": before.mean_values,
            "mean_after": after.mean_values,
        }
    )


def group_means_frame(means: Sequence[MeanCurve]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "group": [m.group for m in means for _ in range(m.grid.size)],
            "grid_t": np.concatenate([m.grid for m in means]),
            "mean": np.concatenate([m.mean_values for m in means]),
        }
    )


def event_summary_frame(before: EventSummary, after: EventSummary) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "stage": ["observed", "registered"],
            "mean_first": [before.mean_first, after.mean_first],
            "mean_last": [before.mean_last, after.mean_last],
        }
    )


def clusters_frame(ids: Sequence[CurveId], clustering: Clustering) -> pd.DataFrame:
    return pd.DataFrame(
        {
            ID_COLUMN: list(ids),
            "label": clustering.labels,
            "silhouette": clustering.silhouettes,
        }
    )


def scan_frame(selection: KSelection) -> pd.DataFrame:
    return pd.DataFrame(list(selection.scan), columns=["k", "coefficient"])


def profiles_frame(profiles: Sequence[ClusterProfile]) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "label": p.label,
                "size": p.size,
                "medoid_id": p.medoid_id,
                "mean_first": p.mean_first,
                "mean_last": p.mean_last,
                "mean_events": p.mean_events,
            }
            for p in profiles
        ]
    )


def truth_frame(sample: SyntheticSample, grid: FloatArray) -> pd.DataFrame:
    """True warping h and its inverse on the grid, one block per curve."""
    return pd.DataFrame(
        {
            ID_COLUMN: [c.id for c in sample.curves for _ in range(grid.size)],
            "regime": [r for r in sample.regimes for _ in range(grid.size)],
            "grid_t": np.tile(grid, len(sample.curves)),
            "h": np.concatenate([w(grid) for w in sample.truth]),
            "h_inv": np.concatenate([w.inverse(grid) for w in sample.truth]),
        }
    )


def pairwise_frame(warp: PairwiseWarp) -> pd.DataFrame:
    """The (t_k, t*_k) samples of one directional map."""
    return pd.DataFrame(
        {
            "source_id": warp.source_id,
            "target_id": warp.target_id,
            "source_time": warp.source_times,
            "mapped_time": warp.mapped_times,
        }
    )


def curve_lookup(curves: Sequence[EventCurve], curve_id: str) -> WarpResult[EventCurve]:
    """Find a curve by id as typed on a command line."""
    for c in curves:
        if str(c.id) == curve_id:
            return Ok(c)
    return Err(ParseError(f"curve id {curve_id!r} not found in input"))
