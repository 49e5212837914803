#!/usr/bin/env python3
"""Code quality checks for eventwarp: mypy, ruff lint and ruff format."""

import subprocess
import sys
from pathlib import Path

import typer
from rich.console import Console
from rich.panel import Panel
from rich.status import Status
from rich.table import Table

app = typer.Typer(help="Code quality management for eventwarp")
console = Console(legacy_windows=False)

PROJECT_ROOT = Path(__file__).parent.parent
PACKAGE = "eventwarp"
SOURCE_DIRS = [PACKAGE, "tests", "scripts"]

CHECKS = {
    "Type Check": ["mypy", PACKAGE],
    "Linting": ["ruff", "check", *SOURCE_DIRS],
    "Formatting": ["ruff", "format", "--check", *SOURCE_DIRS],
}


def run_command(cmd: list[str]) -> int:
    console.print(f"Running: [bold cyan]{' '.join(cmd)}[/bold cyan]")
    return subprocess.run(cmd, cwd=PROJECT_ROOT).returncode


@app.command()
def lint(fix: bool = typer.Option(False, help="Automatically fix issues")) -> None:
    """Run ruff lint."""
    console.print(Panel("Running linting checks", style="bold blue"))
    sys.exit(run_command(["ruff", "check", *SOURCE_DIRS, *(["--fix"] if fix else [])]))


@app.command("format")
def format_code(
    check: bool = typer.Option(False, help="Check formatting without making changes"),
) -> None:
    """Format code, or only check it."""
    console.print(Panel("Checking code" if check else "Formatting code", style="bold blue"))
    sys.exit(run_command(["ruff", "format", *(["--check"] if check else []), *SOURCE_DIRS]))


@app.command()
def typecheck() -> None:
    """Run mypy (strict settings come from pyproject.toml)."""
    console.print(Panel("Running type checks", style="bold blue"))
    sys.exit(run_command(CHECKS["Type Check"]))


@app.command()
def check() -> None:
    """Run every check and summarize the results in a table."""
    console.print(Panel.fit("🔍 Running All Code Quality Checks", style="blue"))

    table = Table(title="Quality Check Results", show_header=True, header_style="bold magenta")
    table.add_column("Check", style="cyan")
    table.add_column("Result", justify="center")

    failed = False
    for name, cmd in CHECKS.items():
        with Status(f"{name}...", console=console, spinner="dots"):
            ok = run_command(cmd) == 0
        failed |= not ok
        table.add_row(name, "✅ Pass" if ok else "❌ Fail")
    console.print(table)

    if failed:
        console.print("\n[red]❌ Some quality checks failed[/red]")
        raise typer.Exit(1)
    console.print("\n[green]✅ All quality checks passed![/green]")


@app.command()
def fix() -> None:
    """Auto-fix what ruff can (format, then lint --fix)."""
    with Status("Fixing...", console=console, spinner="dots"):
        run_command(["ruff", "format", *SOURCE_DIRS])
        run_command(["ruff", "check", "--fix", *SOURCE_DIRS])
    console.print("[green]✅ Auto-fix completed![/green]")
    console.print("[yellow]💡 Run 'pixi run quality check' to verify[/yellow]")


if __name__ == "__main__":
    if len(sys.argv) == 1:
        check()
    else:
        app()
