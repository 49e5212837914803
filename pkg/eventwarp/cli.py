"""
Command-line entry point: ``eventwarp align|register|cluster|simulate``.

Every command reads or writes CSV. Failures reported by the library exit
with code 2 and a one-line message; anything unexpected exits with 1.
"""

from __future__ import annotations

import functools
import sys
from collections.abc import Callable
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Annotated, Any, Literal

import pandas as pd
import typer
from loguru import logger
from rich.console import Console
from rich.table import Table

from . import __version__
from .cluster import (
    Clustering,
    KSelection,
    cluster_profiles,
    distance_matrix,
    interpret_silhouette,
    kmedoids,
    select_k,
)
from .config import CurveMode, PipelineConfig, get_pipeline_config, load_config
from .curves import Domain, EventCurve
from .dtw import align, render_alignment
from .errors import BadK, ConfigError, WarpError
from .io import (
    clusters_frame,
    curve_lookup,
    event_summary_frame,
    events_frame,
    group_means_frame,
    mean_frame,
    pairwise_frame,
    profiles_frame,
    read_events,
    registered_frame,
    scan_frame,
    truth_frame,
    warpings_frame,
    write_frame,
)
from .pairwise import warps_from_alignment
from .registration import (
    RegistrationRun,
    event_time_summary,
    group_means,
    mean_curve,
    register_sample,
)
from .result import Err, Ok, Result, WarpResult
from .synth import LatentLaw, MuShape, SineFamily, WarpScenario, simulate_sample

app = typer.Typer(
    name="eventwarp",
    help="Register event-time curves by pairwise time warping, and cluster them.",
    add_completion=False,
    no_args_is_help=True,
)

console = Console(legacy_windows=False)

DEFAULT_OUT_DIR = Path("eventwarp-out")

InputOpt = Annotated[Path, typer.Option("--input", "-i", help="Event CSV: curve_id,event_time[,value]")]
DomainMinOpt = Annotated[float, typer.Option("--domain-min", help="Start of the observation window")]
DomainMaxOpt = Annotated[float, typer.Option("--domain-max", help="End of the observation window")]
ModeOpt = Annotated[str | None, typer.Option("--mode", help="standardized or raw curve values")]
DeltaOpt = Annotated[float | None, typer.Option("--delta", help="Spreading slope for many-to-one runs")]
GridOpt = Annotated[int | None, typer.Option("--grid", help="Points on the common grid")]
ForceOpt = Annotated[
    bool | None,
    typer.Option("--force-last-event/--no-force-last-event", help="Align last true events together"),
]
SeedOpt = Annotated[int | None, typer.Option("--seed", help="Random seed")]
ThreadsOpt = Annotated[int | None, typer.Option("--threads", help="Worker processes, 0 = all cores")]
OutOpt = Annotated[Path, typer.Option("--out-dir", "-o", help="Directory for CSV outputs")]
ConfigOpt = Annotated[Path | None, typer.Option("--config", help="confection .cfg with [logging]/[pipeline]")]
LogLevelOpt = Annotated[str, typer.Option("--log-level", help="loguru level for stderr")]


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings of one command invocation."""

    command: Literal["align", "register", "cluster", "simulate"]
    input: Path | None
    domain: Domain
    pipeline: PipelineConfig
    k: int | None = None
    k_range: tuple[int, int] | None = None
    out_dir: Path = DEFAULT_OUT_DIR

    def validate(self) -> WarpResult[RunConfig]:
        checked = self.pipeline.validate()
        if checked.is_err():
            return Err(checked.unwrap_err(), _skip_logging=True)
        if self.k is not None and self.k < 2:
            return Err(BadK(f"--k must be >= 2, got {self.k}"))
        if self.k_range is not None and not 2 <= self.k_range[0] <= self.k_range[1]:
            return Err(BadK(f"--k-range must satisfy 2 <= A <= B, got {self.k_range}"))
        if self.input is not None and not self.input.exists():
            return Err(ConfigError(f"input file not found: {self.input}"))
        return Ok(self)


def _setup_logging(level: str) -> None:
    logger.remove()
    logger.add(sys.stderr, level=level.upper(), format="<level>{level: <8}</level> {message}")


def _exit_on_err[T](result: Result[T, Any]) -> T:
    if result.is_ok():
        return result.unwrap()
    error = result.unwrap_err()
    console.print(f"[red]error:[/red] {type(error).__name__}: {error}", highlight=False)
    raise typer.Exit(2 if isinstance(error, WarpError) else 1)


def _guarded[**P](command: Callable[P, None]) -> Callable[P, None]:
    """Map unexpected exceptions to exit code 1."""

    @functools.wraps(command)
    def wrapper(*args: P.args, **kwargs: P.kwargs) -> None:
        try:
            command(*args, **kwargs)
        except typer.Exit:
            raise
        except WarpError as e:
            console.print(f"[red]error:[/red] {type(e).__name__}: {e}", highlight=False)
            raise typer.Exit(2) from e
        except Exception as e:
            logger.exception("internal error")
            console.print(f"[red]internal error:[/red] {e}", highlight=False)
            raise typer.Exit(1) from e

    return wrapper


def parse_k_range(text: str) -> WarpResult[tuple[int, int]]:
    """
    Parse ``A..B`` into an inclusive pair.

    Examples:
        >>> parse_k_range("2..6").unwrap()
        (2, 6)
    """
    lo, sep, hi = text.partition("..")
    if not sep or not lo.strip().isdigit() or not hi.strip().isdigit():
        return Err(ConfigError(f"--k-range expects A..B, got {text!r}"))
    return Ok((int(lo), int(hi)))


def _pipeline(
    config: Path | None,
    mode: str | None = None,
    delta: float | None = None,
    grid: int | None = None,
    force_last_event: bool | None = None,
    seed: int | None = None,
    n_init: int | None = None,
    threads: int | None = None,
) -> Result[PipelineConfig, ConfigError]:
    """File settings first, explicit flags on top."""
    base: Result[PipelineConfig, ConfigError] = (
        load_config(config) if config is not None else Ok(get_pipeline_config())
    )
    flags = {
        "mode": mode,
        "delta": delta,
        "grid_size": grid,
        "force_last_event": force_last_event,
        "seed": seed,
        "n_init": n_init,
        "threads": threads,
    }
    overrides = {name: value for name, value in flags.items() if value is not None}
    return base.map(lambda cfg: replace(cfg, **overrides))


def _resolve(
    command: Literal["align", "register", "cluster", "simulate"],
    input: Path | None,
    domain_min: float,
    domain_max: float,
    pipeline: Result[PipelineConfig, ConfigError],
    out_dir: Path,
    k: int | None = None,
    k_range: str | None = None,
) -> RunConfig:
    cfg = _exit_on_err(pipeline)
    span = _exit_on_err(parse_k_range(k_range)) if k_range is not None else None
    domain = _exit_on_err(Domain.checked(domain_min, domain_max))
    run = RunConfig(command, input, domain, cfg, k, span, out_dir)
    return _exit_on_err(run.validate())


def _load(run: RunConfig) -> list[EventCurve]:
    assert run.input is not None
    mode: CurveMode = run.pipeline.mode
    return _exit_on_err(read_events(run.input, run.domain, mode))


def _register(run: RunConfig, curves: list[EventCurve]) -> RegistrationRun:
    return _exit_on_err(register_sample(curves, run.pipeline))


def _write_registration(
    run: RunConfig, curves: list[EventCurve], registration: RegistrationRun
) -> None:
    grid = run.pipeline.grid_size
    before = _exit_on_err(mean_curve(curves, grid))
    after = _exit_on_err(mean_curve(registration.registered, grid))
    by_count = _exit_on_err(
        group_means(registration.registered, [c.n_events for c in curves], grid)
    )
    summary_before = _exit_on_err(event_time_summary(curves))
    summary_after = _exit_on_err(event_time_summary(registration.registered))

    out = run.out_dir
    write_frame(warpings_frame(curves, registration.estimates), out / "warpings.csv")
    write_frame(registered_frame(registration.registered), out / "registered.csv")
    write_frame(mean_frame(before, after), out / "mean_curve.csv")
    write_frame(group_means_frame(by_count), out / "group_means.csv")
    write_frame(event_summary_frame(summary_before, summary_after), out / "event_summary.csv")


@app.callback(invoke_without_command=True)
def main(
    version: Annotated[bool, typer.Option("--version", help="Show version and exit")] = False,
) -> None:
    """Register event-time curves by pairwise time warping, and cluster them."""
    if version:
        console.print(f"eventwarp {__version__}", highlight=False)
        raise typer.Exit(0)


@app.command("align")
@_guarded
def cmd_align(
    first: Annotated[str, typer.Argument(help="Id of the source curve")],
    second: Annotated[str, typer.Argument(help="Id of the target curve")],
    input: InputOpt,
    domain_min: DomainMinOpt,
    domain_max: DomainMaxOpt,
    mode: ModeOpt = None,
    delta: DeltaOpt = None,
    force_last_event: ForceOpt = None,
    out_dir: OutOpt = DEFAULT_OUT_DIR,
    config: ConfigOpt = None,
    log_level: LogLevelOpt = "WARNING",
) -> None:
    """Align two curves and report the path, its cost and the pairwise maps."""
    _setup_logging(log_level)
    run = _resolve(
        "align",
        input,
        domain_min,
        domain_max,
        _pipeline(config, mode=mode, delta=delta, force_last_event=force_last_event),
        out_dir,
    )
    curves = _load(run)
    a = _exit_on_err(curve_lookup(curves, first))
    b = _exit_on_err(curve_lookup(curves, second))

    force = run.pipeline.force_last_event
    path, cost = _exit_on_err(align(a, b, force_last_event=force))
    forward, backward = _exit_on_err(
        warps_from_alignment(path, a, b, run.pipeline.delta)
    )

    console.print(f"steps: {path}", markup=False, highlight=False)
    console.print(f"cost: {cost.total:.12g}", markup=False, highlight=False)
    console.print(render_alignment(path), markup=False, highlight=False)

    target = run.out_dir / f"pairwise_{a.id}_{b.id}.csv"
    write_frame(pd.concat([pairwise_frame(forward), pairwise_frame(backward)]), target)
    console.print(f"wrote {target}", markup=False, highlight=False)


@app.command("register")
@_guarded
def cmd_register(
    input: InputOpt,
    domain_min: DomainMinOpt,
    domain_max: DomainMaxOpt,
    mode: ModeOpt = None,
    delta: DeltaOpt = None,
    grid: GridOpt = None,
    force_last_event: ForceOpt = None,
    threads: ThreadsOpt = None,
    out_dir: OutOpt = DEFAULT_OUT_DIR,
    config: ConfigOpt = None,
    log_level: LogLevelOpt = "WARNING",
) -> None:
    """Estimate warpings, register every curve and write the mean curves."""
    _setup_logging(log_level)
    run = _resolve(
        "register",
        input,
        domain_min,
        domain_max,
        _pipeline(
            config,
            mode=mode,
            delta=delta,
            grid=grid,
            force_last_event=force_last_event,
            threads=threads,
        ),
        out_dir,
    )
    curves = _load(run)
    registration = _register(run, curves)
    _write_registration(run, curves, registration)

    mean_events = sum(c.n_events for c in curves) / len(curves)
    console.print(
        f"registered n={len(curves)} curves, mean events {mean_events:.2f}, "
        f"{registration.pairs_aligned} alignments in {registration.seconds:.2f}s",
        markup=False,
        highlight=False,
    )


def _report_selection(selection: KSelection | None, clustering: Clustering) -> None:
    table = Table(title="Clusters")
    table.add_column("label")
    table.add_column("size")
    for label in range(clustering.k):
        table.add_row(str(label), str(len(clustering.members(label))))
    console.print(table)
    if selection is not None:
        console.print(
            "silhouette scan: "
            + ", ".join(f"k={k}: {c:.3f}" for k, c in selection.scan),
            markup=False,
            highlight=False,
        )
    console.print(
        f"k = {clustering.k}, silhouette {clustering.coefficient:.3f} "
        f"({interpret_silhouette(clustering.coefficient)})",
        markup=False,
        highlight=False,
    )


@app.command("cluster")
@_guarded
def cmd_cluster(
    input: InputOpt,
    domain_min: DomainMinOpt,
    domain_max: DomainMaxOpt,
    k: Annotated[int | None, typer.Option("--k", help="Fixed number of clusters")] = None,
    k_range: Annotated[str | None, typer.Option("--k-range", help="Candidate k as A..B")] = None,
    mode: ModeOpt = None,
    delta: DeltaOpt = None,
    grid: GridOpt = None,
    force_last_event: ForceOpt = None,
    seed: SeedOpt = None,
    n_init: Annotated[int | None, typer.Option("--n-init", help="k-medoids restarts")] = None,
    threads: ThreadsOpt = None,
    out_dir: OutOpt = DEFAULT_OUT_DIR,
    config: ConfigOpt = None,
    log_level: LogLevelOpt = "WARNING",
) -> None:
    """Register the sample, then cluster the warping estimates."""
    _setup_logging(log_level)
    run = _resolve(
        "cluster",
        input,
        domain_min,
        domain_max,
        _pipeline(
            config,
            mode=mode,
            delta=delta,
            grid=grid,
            force_last_event=force_last_event,
            seed=seed,
            n_init=n_init,
            threads=threads,
        ),
        out_dir,
        k=k,
        k_range=k_range,
    )
    curves = _load(run)
    if len(curves) < 3:
        _exit_on_err(
            Err(BadK(f"clustering needs at least 3 curves, got {len(curves)}"))
        )
    registration = _register(run, curves)
    D = _exit_on_err(distance_matrix(registration.estimates))

    cfg = run.pipeline
    selection: KSelection | None = None
    if run.k is not None:
        clustering = _exit_on_err(
            kmedoids(D, run.k, seed=cfg.seed, max_iter=cfg.max_iter, n_init=cfg.n_init)
        )
    else:
        candidates = (
            list(range(run.k_range[0], run.k_range[1] + 1)) if run.k_range else None
        )
        selection = _exit_on_err(
            select_k(D, candidates, seed=cfg.seed, max_iter=cfg.max_iter, n_init=cfg.n_init)
        )
        clustering = selection.clustering

    labels = clustering.labels.tolist()
    profiles = _exit_on_err(cluster_profiles(registration.registered, clustering))
    by_cluster = _exit_on_err(
        group_means(registration.registered, labels, cfg.grid_size)
    )

    out = run.out_dir
    write_frame(clusters_frame([c.id for c in curves], clustering), out / "clusters.csv")
    if selection is not None:
        write_frame(scan_frame(selection), out / "silhouette_scan.csv")
    write_frame(profiles_frame(profiles), out / "cluster_profiles.csv")
    write_frame(group_means_frame(by_cluster), out / "cluster_means.csv")
    _report_selection(selection, clustering)


@app.command("simulate")
@_guarded
def cmd_simulate(
    n: Annotated[int, typer.Option("--n", help="Number of curves")] = 50,
    events_min: Annotated[int, typer.Option("--events-min")] = 5,
    events_max: Annotated[int, typer.Option("--events-max")] = 15,
    amplitude: Annotated[float, typer.Option("--amplitude", help="Sine warp amplitude A")] = 0.08,
    components: Annotated[int, typer.Option("--components", help="Sine components C")] = 3,
    mu: Annotated[str, typer.Option("--mu", help="linear or exponential")] = "linear",
    latent: Annotated[str, typer.Option("--latent", help="quantile or iid")] = "quantile",
    two_regime: Annotated[
        bool, typer.Option("--two-regime", help="Half late-warped, half near identity")
    ] = False,
    domain_min: DomainMinOpt = 0.0,
    domain_max: DomainMaxOpt = 1.0,
    mode: ModeOpt = None,
    grid: GridOpt = None,
    seed: SeedOpt = None,
    out_dir: OutOpt = DEFAULT_OUT_DIR,
    config: ConfigOpt = None,
    log_level: LogLevelOpt = "WARNING",
) -> None:
    """Write a synthetic event CSV and the true warpings behind it."""
    _setup_logging(log_level)
    run = _resolve(
        "simulate",
        None,
        domain_min,
        domain_max,
        _pipeline(config, mode=mode, grid=grid, seed=seed),
        out_dir,
    )
    if mu not in ("linear", "exponential") or latent not in ("quantile", "iid"):
        _exit_on_err(Err(ConfigError(f"unknown --mu {mu!r} or --latent {latent!r}")))
    shape: MuShape = "linear" if mu == "linear" else "exponential"
    law: LatentLaw = "quantile" if latent == "quantile" else "iid"

    cfg = run.pipeline
    common: dict[str, Any] = {
        "events_min": events_min,
        "events_max": events_max,
        "domain": run.domain,
        "mu": shape,
        "latent": law,
        "mode": cfg.mode,
    }
    scenario = (
        WarpScenario.two_regime(n=n, seed=cfg.seed, **common)
        if two_regime
        else WarpScenario(
            n=n,
            families=(SineFamily(amplitude=amplitude, components=components),),
            seed=cfg.seed,
            **common,
        )
    )
    sample = _exit_on_err(simulate_sample(scenario))

    events = write_frame(events_frame(sample.curves), run.out_dir / "events.csv")
    truth = write_frame(
        truth_frame(sample, run.domain.grid(cfg.grid_size)), run.out_dir / "truth_warps.csv"
    )
    console.print(
        f"simulated n={len(sample.curves)} curves: {events}, {truth}",
        markup=False,
        highlight=False,
    )


if __name__ == "__main__":
    app()
