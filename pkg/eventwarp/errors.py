"""
Error hierarchy for eventwarp.

Every failure an operation can report is a subclass of WarpError, carried
inside an Err rather than raised. Err.unwrap() re-raises it, so callers who
prefer exceptions can still catch the specific class.
"""

from __future__ import annotations


class WarpError(Exception):
    """Base class for every eventwarp failure."""


# event-model
class InvalidDomain(WarpError):
    """Domain bounds are not finite or t_min >= t_max."""


class EmptyCurve(WarpError):
    """A curve was built from zero events."""


class OutOfDomain(WarpError):
    """An event time lies outside the curve's domain."""


class AlreadyAnchored(WarpError):
    """anchor_curve was applied to an anchored curve."""


# dtw-align
class UnanchoredInput(WarpError):
    """Alignment requires anchored curves on a shared domain."""


class InvalidForcedPair(WarpError):
    """A forced pair is out of range or cannot be entered diagonally."""


class TooLarge(WarpError):
    """Exhaustive enumeration was requested beyond its size guard."""


class ShapeMismatch(WarpError):
    """Array or path shapes do not agree with each other."""


# pairwise-warp / registration
class NonPositiveDelta(WarpError):
    """The spreading slope delta must be strictly positive."""


class TooFewCurves(WarpError):
    """Registration needs at least two curves."""


class DomainMismatch(WarpError):
    """Curves in one sample live on different domains."""


class IdMismatch(WarpError):
    """A warping estimate was applied to a different curve."""


class EmptyGroup(WarpError):
    """A group, cluster or member set has no elements."""


# warp-cluster
class GridMismatch(WarpError):
    """Two warping estimates were interpolated on different grids."""


class BadK(WarpError):
    """The requested number of clusters is outside [2, n]."""


class SingleCluster(WarpError):
    """Silhouettes need at least two non-empty clusters."""


class EmptyRange(WarpError):
    """No admissible k remains in the requested range."""


# synth
class BadAmplitude(WarpError):
    """Sine-family amplitudes too large to keep warps strictly increasing."""


# ambient
class ParseError(WarpError):
    """Input file could not be read as event CSV."""


class ConfigError(WarpError):
    """Configuration value or file is invalid."""
