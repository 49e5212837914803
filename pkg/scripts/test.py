#!/usr/bin/env python3
"""
Test runner for eventwarp.

Unit tests and doctests are fast; the integration suite (brute-force DTW
oracle, synthetic recovery, two-regime clustering, timing and determinism)
takes minutes and only runs with ``integration`` or ``all``.
"""

import shutil
import subprocess
from pathlib import Path

import typer
from rich.console import Console
from rich.panel import Panel
from rich.status import Status

app = typer.Typer(
    name="test",
    help="Testing management for eventwarp",
    add_completion=False,
)

console = Console(legacy_windows=False)

PROJECT_ROOT = Path(__file__).parent.parent
PACKAGE = "eventwarp"
COVERAGE_ARGS = [
    f"--cov={PACKAGE}",
    "--cov-report=term",
    "--cov-report=xml",
    "--cov-report=html",
]
DOCTEST_ARGS = ["--doctest-modules", PACKAGE, "--doctest-glob=*.md", "README.md", "docs/"]

CoverageOpt = typer.Option(True, "--coverage/--no-coverage", help="Generate coverage report")
VerboseOpt = typer.Option(False, "--verbose", "-v", help="Verbose output")


def run_pytest(title: str, args: list[str], coverage: bool, verbose: bool) -> None:
    """Run pytest from the project root, exiting 1 on failure."""
    console.print(Panel.fit(title, style="blue"))
    cmd = ["pytest", *args]
    if verbose:
        cmd.append("-v")
    if coverage:
        cmd.extend(COVERAGE_ARGS)

    with Status(f"{title}...", console=console, spinner="dots"):
        completed = subprocess.run(cmd, cwd=PROJECT_ROOT)
    if completed.returncode != 0:
        console.print(f"[red]❌ {' '.join(cmd)} failed[/red]")
        raise typer.Exit(1)
    console.print(f"[green]✅ {title} passed[/green]")


@app.command()
def unit(
    coverage: bool = CoverageOpt,
    verbose: bool = VerboseOpt,
    fail_fast: bool = typer.Option(False, "--fail-fast", "-x", help="Stop on first failure"),
) -> None:
    """Run unit tests."""
    args = ["tests/unit", "-m", "unit"]
    if fail_fast:
        args.append("-x")
    run_pytest("Unit tests", args, coverage, verbose)


@app.command()
def integration(coverage: bool = CoverageOpt, verbose: bool = VerboseOpt) -> None:
    """Run the slow end-to-end suite."""
    run_pytest(
        "Integration tests",
        ["tests/integration", "--run-integration", "-m", "integration"],
        coverage,
        verbose,
    )


@app.command()
def fast(coverage: bool = CoverageOpt, verbose: bool = VerboseOpt) -> None:
    """Unit tests plus doctests, skipping anything marked slow."""
    run_pytest(
        "Fast tests",
        ["tests/", *DOCTEST_ARGS, "-m", "not slow"],
        coverage,
        verbose,
    )


@app.command("all")
def run_all(coverage: bool = CoverageOpt, verbose: bool = VerboseOpt) -> None:
    """Every test, doctest and integration check."""
    run_pytest(
        "All tests",
        ["tests/", "--run-integration", *DOCTEST_ARGS],
        coverage,
        verbose,
    )


@app.command()
def clean() -> None:
    """Remove coverage reports, pytest cache and bytecode."""
    removed = []
    for name in ("htmlcov", ".pytest_cache", ".hypothesis"):
        path = PROJECT_ROOT / name
        if path.is_dir():
            shutil.rmtree(path)
            removed.append(name)
    for name in (".coverage", "coverage.xml"):
        path = PROJECT_ROOT / name
        if path.exists():
            path.unlink()
            removed.append(name)
    for cache in PROJECT_ROOT.rglob("__pycache__"):
        shutil.rmtree(cache)
        removed.append(str(cache.relative_to(PROJECT_ROOT)))

    if removed:
        console.print("[green]✅ Removed:[/green]")
        for item in removed:
            console.print(f"  • {item}")
    else:
        console.print("[yellow]⚠️ Nothing to clean[/yellow]")


if __name__ == "__main__":
    app()
