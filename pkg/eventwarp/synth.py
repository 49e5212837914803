"""
Synthetic samples from the time-warping model with known warpings.

Each subject has a latent event sequence drawn from a common cumulative
shape mu on the domain, and a random warping h_i carrying its internal
clock to calendar time. The observed event times are h_i applied to the
latent times. On normalized time u in [0, 1] the warpings are

    h(u) = u + sum_c a_c * sin(pi * c * u),   a_c = A * z_c / c,  z_c ~ U(-1, 1)

which fixes both endpoints, has mean identity, and is strictly increasing
whenever pi * A * C < 1.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import numpy.typing as npt

from .config import CurveMode
from .curves import Domain, EventCurve, FloatArray, WarpingFunction, frozen_array, prepare_curve
from .errors import BadAmplitude, ConfigError
from .result import Err, Ok, Result, WarpResult

type MuShape = Literal["linear", "exponential"]
type LatentLaw = Literal["quantile", "iid"]

TRUTH_GRID_POINTS = 1001
BISECTION_STEPS = 64
EXPONENTIAL_RATE = 3.0


@dataclass(frozen=True)
class SineFamily:
    """
    Warpings u + sum_c a_c sin(pi c u).

    With ``fixed`` every warp is u + amplitude * sin(pi u), the same for
    each subject; otherwise coefficients are drawn as amplitude * z_c / c.
    """

    amplitude: float = 0.08
    components: int = 3
    fixed: bool = False

    @property
    def slope_bound(self) -> float:
        """Upper bound on |h'(u) - 1|."""
        return math.pi * abs(self.amplitude) * (1 if self.fixed else self.components)

    def coefficients(self, rng: np.random.Generator) -> FloatArray:
        if self.fixed:
            coeff = np.zeros(max(self.components, 1))
            coeff[0] = self.amplitude
            return coeff
        z = rng.uniform(-1.0, 1.0, self.components)
        return self.amplitude * z / np.arange(1, self.components + 1)


@dataclass(frozen=True)
class WarpScenario:
    """Everything needed to draw a synthetic sample reproducibly.

    Curve i uses ``families[i * len(families) // n]``, so with several
    families the sample is split into consecutive equal blocks (regimes).
    """

    n: int = 50
    events_min: int = 5
    events_max: int = 15
    domain: Domain = Domain(0.0, 1.0)
    mu: MuShape = "linear"
    latent: LatentLaw = "quantile"
    families: tuple[SineFamily, ...] = field(default_factory=lambda: (SineFamily(),))
    mode: CurveMode = "standardized"
    seed: int = 0

    @classmethod
    def two_regime(
        cls,
        n: int = 50,
        late_amplitude: float = 0.3,
        jitter: float = 0.02,
        seed: int = 0,
        **kwargs: object,
    ) -> WarpScenario:
        """Half the sample warped late by one fixed sine, half near identity."""
        families = (
            SineFamily(amplitude=late_amplitude, components=1, fixed=True),
            SineFamily(amplitude=jitter, components=3),
        )
        return cls(n=n, families=families, seed=seed, **kwargs)  # type: ignore[arg-type]

    def regime(self, i: int) -> int:
        return i * len(self.families) // self.n

    def validate(self) -> WarpResult[WarpScenario]:
        if self.n < 1:
            return Err(ConfigError(f"n must be >= 1, got {self.n}"))
        if not 1 <= self.events_min <= self.events_max:
            return Err(
                ConfigError(
                    f"event counts must satisfy 1 <= min <= max, "
                    f"got {self.events_min}..{self.events_max}"
                )
            )
        if not self.families:
            return Err(ConfigError("scenario needs at least one warp family"))
        for family in self.families:
            if family.components < 1:
                return Err(ConfigError(f"components must be >= 1, got {family.components}"))
            if family.slope_bound >= 1:
                return Err(
                    BadAmplitude(
                        f"amplitude {family.amplitude} with {family.components} "
                        f"components can break monotonicity (pi*A*C = {family.slope_bound:.3f})"
                    )
                )
        return Ok(self)


@dataclass(frozen=True, eq=False)
class SineWarp(WarpingFunction):
    """A sine-perturbed warping, evaluated and inverted exactly.

    ``grid``/``values`` hold a dense sampling for plotting and export;
    calls go through the closed form and inversion through bisection.
    """

    coefficients: FloatArray = field(default_factory=lambda: frozen_array([]))

    @classmethod
    def build(cls, coefficients: npt.ArrayLike, domain: Domain) -> SineWarp:
        coeff = frozen_array(coefficients)
        grid = domain.grid(TRUTH_GRID_POINTS)
        return cls(grid, frozen_array(_sine(coeff, grid, domain)), coeff)

    def __call__(self, t: npt.ArrayLike) -> FloatArray:
        return _sine(self.coefficients, np.asarray(t, dtype=np.float64), self.domain)

    def inverse(self, t: npt.ArrayLike) -> FloatArray:
        """Monotone bisection on [t_min, t_max]."""
        target = np.asarray(t, dtype=np.float64)
        domain = self.domain
        lo = np.full(target.shape, domain.t_min)
        hi = np.full(target.shape, domain.t_max)
        for _ in range(BISECTION_STEPS):
            mid = (lo + hi) / 2
            below = self(mid) < target
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        out = (lo + hi) / 2
        out = np.where(target <= domain.t_min, domain.t_min, out)
        return np.where(target >= domain.t_max, domain.t_max, out)


def _sine(coefficients: FloatArray, t: FloatArray, domain: Domain) -> FloatArray:
    u = (t - domain.t_min) / domain.width
    c = np.arange(1, coefficients.size + 1)
    shift = np.sin(np.pi * np.multiply.outer(u, c)) @ coefficients if c.size else 0.0
    h = domain.t_min + domain.width * (u + shift)
    h = np.where(u <= 0, domain.t_min, h)
    return np.where(u >= 1, domain.t_max, h)


@dataclass(frozen=True, eq=False)
class SyntheticSample:
    """Curves, their true warpings, latent times and regime labels."""

    curves: list[EventCurve]
    truth: list[SineWarp]
    latent_times: list[FloatArray]
    regimes: list[int]
    scenario: WarpScenario


def _streams(seed: int, i: int) -> tuple[np.random.Generator, np.random.Generator]:
    warp_seq, event_seq = np.random.SeedSequence([seed, i]).spawn(2)
    return np.random.default_rng(warp_seq), np.random.default_rng(event_seq)


def mu_inverse(levels: npt.ArrayLike, shape: MuShape) -> FloatArray:
    """
    Quantile function of the base shape on [0, 1].

    Examples:
        >>> mu_inverse([0.25, 0.5], "linear").tolist()
        [0.25, 0.5]
    """
    p = np.asarray(levels, dtype=np.float64)
    if shape == "linear":
        return p
    rate = EXPONENTIAL_RATE
    return np.log1p(p * math.expm1(rate)) / rate


def sample_warping(scenario: WarpScenario, i: int) -> WarpResult[SineWarp]:
    """
    The true warping of curve ``i``; depends only on the seed and ``i``.

    Returns:
        Ok(SineWarp), or Err(BadAmplitude | ConfigError) for an invalid
        scenario.
    """

    def _draw(valid: WarpScenario) -> SineWarp:
        family = valid.families[valid.regime(i)]
        warp_rng, _ = _streams(valid.seed, i)
        return SineWarp.build(family.coefficients(warp_rng), valid.domain)

    return scenario.validate().map(_draw)


def _latent(scenario: WarpScenario, rng: np.random.Generator) -> FloatArray:
    count = int(rng.integers(scenario.events_min, scenario.events_max + 1))
    if scenario.latent == "quantile":
        levels = np.arange(1, count + 1) / (count + 1)
    else:
        levels = np.sort(rng.uniform(0.0, 1.0, count))
    domain = scenario.domain
    return domain.t_min + domain.width * mu_inverse(levels, scenario.mu)


def simulate_sample(scenario: WarpScenario) -> WarpResult[SyntheticSample]:
    """
    Draw a sample: per curve an event count, latent times, and a warping.

    Returns:
        Ok(SyntheticSample) with anchored curves, bit-for-bit reproducible
        from the scenario seed.

    Examples:
        >>> scenario = WarpScenario(n=2, events_min=3, events_max=3,
        ...                         families=(SineFamily(amplitude=0.0),))
        >>> sample = simulate_sample(scenario).unwrap()
        >>> sample.curves[0].event_times.tolist()
        [0.25, 0.5, 0.75]
    """

    def _curve(valid: WarpScenario, i: int) -> WarpResult[tuple[EventCurve, SineWarp, FloatArray]]:
        _, event_rng = _streams(valid.seed, i)
        latent = _latent(valid, event_rng)

        def _observe(warp: SineWarp) -> WarpResult[tuple[EventCurve, SineWarp, FloatArray]]:
            return prepare_curve(i, warp(latent), valid.domain, valid.mode).map(
                lambda curve: (curve, warp, frozen_array(latent))
            )

        return sample_warping(valid, i).then(_observe)

    def _all(valid: WarpScenario) -> WarpResult[SyntheticSample]:
        drawn = Result.traverse(range(valid.n), lambda i: _curve(valid, i))
        return drawn.map(
            lambda rows: SyntheticSample(
                curves=[r[0] for r in rows],
                truth=[r[1] for r in rows],
                latent_times=[r[2] for r in rows],
                regimes=[valid.regime(i) for i in range(valid.n)],
                scenario=valid,
            )
        )

    return scenario.validate().then(_all)


def truth_on_grid(warps: Sequence[WarpingFunction], grid: FloatArray) -> FloatArray:
    """Inverse warpings evaluated on a grid, one row per curve."""
    return np.stack([w.inverse(grid) for w in warps])
