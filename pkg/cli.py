#!/usr/bin/env python3
"""CLI for the adjoint Bergman projection toolkit."""

import csv
import json
import sqlite3
import sys
from pathlib import Path
from typing import Literal, Optional

import typer
from pydantic import BaseModel, ConfigDict, ValidationError
from rich.console import Console
from rich.table import Table

from config import settings
from src.database import ResultsDatabase
from src.diskquad import QuadratureSpec
from src.extremal import (
    LemmaBoundViolation,
    SearchConfig,
    search,
    write_history,
    write_result,
)
from src.funcspace import (
    CompactMonomial,
    DiskDomainError,
    eval_deriv,
    eval_pderiv,
    eval_value,
)
from src.function_specs import load_function_spec
from src.norms import (
    UndefinedRatioError,
    besov_seminorm,
    bloch_seminorm,
    functional_P,
    lemma5_ratio,
)
from src.operators import (
    AdjointForm,
    adjoint_quad,
    adjoint_radius,
    adjoint_series,
    project,
    project_monomial_closed,
)
from src.reports import aggregate_passed, print_reports, write_reports
from src.verify import DEFAULT_TOLERANCES, VerifyConfig, fitted_slope, growth_table, run_all


app = typer.Typer(
    name="pstar",
    help="Compute and verify the adjoint Bergman projection P* and its norm bounds",
    add_completion=False,
)
console = Console(stderr=True)

EXIT_FAILURE = 1
EXIT_USAGE = 2

QUERIES = ("value", "deriv", "pderiv", "bloch", "P", "lemma5", "adjoint", "besov")


class RunConfig(BaseModel):
    """Run configuration file; command-line flags override its values."""
    model_config = ConfigDict(extra="forbid")

    function_spec_path: Optional[Path] = None
    tolerances: dict[str, float] = {}
    only: Optional[list[str]] = None
    output_path: Optional[Path] = None
    format: Literal["structured", "csv"] = "structured"
    seed: Optional[int] = None
    alpha: Optional[float] = None
    beta: float = 2.0


def _usage_error(message: str):
    console.print(f"[red]{message}[/red]")
    raise typer.Exit(EXIT_USAGE)


def _load_config(path: Optional[Path]) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        return RunConfig.model_validate_json(path.read_text(encoding="utf-8"))
    except OSError as e:
        _usage_error(f"Cannot read config {path}: {e}")
    except ValidationError as e:
        _usage_error(f"Invalid config {path}:\n{e}")


def _parse_tolerances(items: list[str]) -> dict[str, float]:
    tolerances = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep:
            _usage_error(f"Tolerance override must look like name=value, got {item!r}")
        try:
            tolerances[name.strip()] = float(value)
        except ValueError:
            _usage_error(f"Tolerance {name!r} is not a number: {value!r}")
    return tolerances


def _parse_point(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        _usage_error(f"Cannot parse point {text!r}; use forms like 0.5 or 0.3+0.2j")


def _pair(value: complex) -> list[float]:
    value = complex(value)
    return [value.real, value.imag]


@app.command()
def verify(
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Write the report to this file"),
    fmt: Optional[str] = typer.Option(None, "--format", "-f", help="structured (JSON) or csv"),
    tol: list[str] = typer.Option([], "--tol", help="Tolerance override name=value (repeatable)"),
    only: list[str] = typer.Option([], "--only", help="Run only this check (repeatable)"),
    alpha: list[float] = typer.Option([], "--alpha", help="Weight exponent(s) for the growth check"),
    strict_gzn: bool = typer.Option(False, "--strict-gzn", help="Let the g_z^n Bloch check gate the verdict"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed for random test functions"),
    record: bool = typer.Option(False, "--record", help="Store the run in the results database"),
    timings: bool = typer.Option(False, "--timings", help="Include runtimes in the output file"),
    config_path: Optional[Path] = typer.Option(None, "--config", "-c", help="JSON run configuration"),
):
    """
    Run the verification suite.

    Exit status is 0 when every gating check passes and 1 otherwise.
    """
    run_config = _load_config(config_path)
    fmt = fmt or run_config.format
    if fmt not in ("structured", "csv"):
        _usage_error(f"Invalid format: {fmt}. Choose structured or csv")

    tolerances = {**run_config.tolerances, **_parse_tolerances(tol)}
    selection = list(only) if only else run_config.only
    alphas = list(alpha) or ([run_config.alpha] if run_config.alpha is not None else None)

    options = {"tolerances": tolerances, "only": selection, "strict_gzn": strict_gzn}
    if alphas:
        options["alphas"] = alphas
    if seed is not None or run_config.seed is not None:
        options["seed"] = seed if seed is not None else run_config.seed

    try:
        verify_config = VerifyConfig(**options)
    except ValidationError as e:
        _usage_error(f"Invalid verification settings:\n{e}")

    reports = run_all(verify_config)
    print_reports(reports)

    destination = out or run_config.output_path
    if destination:
        try:
            write_reports(reports, destination, fmt=fmt, timings=timings)
        except OSError as e:
            _usage_error(f"Cannot write report to {destination}: {e}")
        console.print(f"[green]✓ Report written to {destination}[/green]")

    if record:
        try:
            run_id = ResultsDatabase(settings.results_db_path).record_verification(
                reports, verify_config.model_dump()
            )
        except sqlite3.Error as e:
            _usage_error(f"Cannot record run in {settings.results_db_path}: {e}")
        console.print(f"[blue]Recorded as run {run_id}[/blue]")

    if not aggregate_passed(reports):
        console.print("[red]Verification failed[/red]")
        raise typer.Exit(EXIT_FAILURE)
    console.print(f"[green]✓ {len(reports)} checks passed[/green]")


@app.command(name="eval")
def evaluate(
    spec_path: Optional[Path] = typer.Option(None, "--spec", "-s", help="Function-spec JSON file"),
    query: list[str] = typer.Option(["value"], "--query", "-q", help=f"One of {', '.join(QUERIES)} (repeatable)"),
    z: str = typer.Option("0", "--z", help="Evaluation point, e.g. 0.3+0.2j"),
    beta: Optional[float] = typer.Option(None, "--beta", help="Prefactor exponent for the adjoint query"),
    p: float = typer.Option(2.0, "--p", help="Exponent for the besov query"),
    config_path: Optional[Path] = typer.Option(None, "--config", "-c", help="JSON run configuration"),
):
    """
    Evaluate quantities of one function and print them as JSON.
    """
    run_config = _load_config(config_path)
    spec_path = spec_path or run_config.function_spec_path
    if spec_path is None:
        _usage_error("A function spec is required (--spec)")

    unknown = [q for q in query if q not in QUERIES]
    if unknown:
        _usage_error(f"Unknown query {unknown[0]!r}. Choose from: {', '.join(QUERIES)}")

    try:
        f = load_function_spec(spec_path)
    except OSError as e:
        _usage_error(f"Cannot read function spec {spec_path}: {e}")
    except ValidationError as e:
        _usage_error(f"Malformed function spec {spec_path}:\n{e}")
    except ValueError as e:
        _usage_error(f"Invalid function spec {spec_path}: {e}")

    point = _parse_point(z)
    form_beta = beta if beta is not None else run_config.beta
    results: dict = {"z": _pair(point)}

    try:
        for q in query:
            if q == "value":
                results[q] = _pair(eval_value(f, point))
            elif q == "deriv":
                results[q] = _pair(eval_deriv(f, point))
            elif q == "pderiv":
                results[q] = _pair(eval_pderiv(f, point))
            elif q == "bloch":
                results[q] = bloch_seminorm(f).value
            elif q == "P":
                estimate = functional_P(f)
                results[q] = estimate.value
                results["P_argmax"] = _pair(estimate.argmax)
            elif q == "lemma5":
                results[q] = lemma5_ratio(f)
            elif q == "adjoint":
                form = AdjointForm(form_beta)
                results["adjoint_series"] = _pair(adjoint_series(f, form, point))
                radius = adjoint_radius(f, point)
                quad = adjoint_quad(f, form, point, QuadratureSpec.from_settings(outer_radius=radius))
                results["adjoint_quad"] = _pair(quad.value)
                results["adjoint_quad_converged"] = quad.converged
            elif q == "besov":
                results[q] = besov_seminorm(f, p)
    except (DiskDomainError, UndefinedRatioError, ValueError) as e:
        _usage_error(f"Cannot evaluate: {e}")

    typer.echo(json.dumps(results, indent=2))


@app.command()
def growth(
    alpha: Optional[float] = typer.Option(None, "--alpha", "-a", help="Weight exponent in (-2, -1] (default -1)"),
    n_min: int = typer.Option(64, "--n-min", help="Smallest n, at least 2 (grid doubles from here)"),
    n_max: int = typer.Option(8192, "--n-max", help="Largest n, at most 1e5"),
    window: Optional[float] = typer.Option(None, "--window", help="Allowed slope deviation"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="CSV destination (default stdout)"),
    config_path: Optional[Path] = typer.Option(None, "--config", "-c", help="JSON run configuration"),
):
    """
    Tabulate |P* g_{z_n}^n(z_n)| and fit its growth exponent.

    CSV columns: n, value, fitted_slope.
    """
    run_config = _load_config(config_path)
    alpha = alpha if alpha is not None else (run_config.alpha if run_config.alpha is not None else -1.0)
    window = window if window is not None else run_config.tolerances.get("growth", DEFAULT_TOLERANCES["growth"])
    out = out or run_config.output_path

    if not -2.0 < alpha <= -1.0:
        _usage_error(f"alpha = {alpha} must lie in (-2, -1]")
    if n_max > 100_000:
        _usage_error(f"n_max = {n_max} exceeds the closed-form range 1e5")
    if not 2 <= n_min <= n_max:
        _usage_error("Need 2 <= n_min <= n_max")

    grid = []
    n = n_min
    while n <= n_max:
        grid.append(n)
        n *= 2

    try:
        table = growth_table(alpha, grid)
    except ValueError as e:
        _usage_error(f"{e}; widen --n-min/--n-max")
    slope = fitted_slope(table)

    try:
        handle = out.open("w", newline="", encoding="utf-8") if out else sys.stdout
    except OSError as e:
        _usage_error(f"Cannot write {out}: {e}")
    try:
        writer = csv.writer(handle)
        writer.writerow(["n", "value", "fitted_slope"])
        writer.writerows((n, repr(value), repr(slope)) for n, value in table)
    finally:
        if out:
            handle.close()

    expected = 2.0 + alpha
    if abs(slope - expected) <= window:
        console.print(f"[green]✓ slope {slope:.4f} within {expected} ± {window}[/green]")
    else:
        console.print(f"[red]slope {slope:.4f} outside {expected} ± {window}[/red]")
        raise typer.Exit(EXIT_FAILURE)


@app.command()
def extremal(
    degree: Optional[int] = typer.Option(None, "--degree", "-d", help="Polynomial degree (or Möbius atom count)"),
    family: str = typer.Option("polynomial", "--family", help="polynomial or mobius"),
    restarts: Optional[int] = typer.Option(None, "--restarts", help="Random restarts besides the warm starts"),
    iterations: Optional[int] = typer.Option(None, "--iterations", help="Simplex iterations per restart"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed for random starts"),
    workers: Optional[int] = typer.Option(None, "--workers", help="Threads running restarts"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Write the search result JSON here"),
    history: Optional[Path] = typer.Option(None, "--history", help="Write the history CSV here"),
    record: bool = typer.Option(False, "--record", help="Store the search in the results database"),
    config_path: Optional[Path] = typer.Option(None, "--config", "-c", help="JSON run configuration"),
):
    """
    Search for functions maximizing 𝒫(f) / Bloch seminorm.
    """
    run_config = _load_config(config_path)
    seed = seed if seed is not None else run_config.seed
    out = out or run_config.output_path

    try:
        config = SearchConfig.from_settings(
            family=family, degree=degree, restarts=restarts,
            iterations=iterations, seed=seed, workers=workers,
        )
    except ValueError as e:
        _usage_error(f"Invalid search settings: {e}")

    try:
        result = search(config)
    except LemmaBoundViolation as e:
        console.print(f"[red]Bound violated: {e}[/red]")
        raise typer.Exit(EXIT_FAILURE)

    try:
        if out:
            write_result(result, config, out)
        if history:
            write_history(result, history)
    except OSError as e:
        _usage_error(f"Cannot write search output: {e}")

    if record:
        try:
            search_id = ResultsDatabase(settings.results_db_path).record_search(config, result)
        except sqlite3.Error as e:
            _usage_error(f"Cannot record search in {settings.results_db_path}: {e}")
        console.print(f"[blue]Recorded as search {search_id}[/blue]")

    console.print(
        f"[green]Best ratio {result.best_value:.6f} over {result.restarts_run} starts "
        f"(witness z = {result.witness_point:.4f})[/green]"
    )
    for note in result.notes:
        console.print(f"[dim]{note}[/dim]")
    if not out:
        typer.echo(json.dumps(result.to_record(config), indent=2))


@app.command(name="project")
def project_cmd(
    a: int = typer.Option(..., "--a", help="Power of conj(w)"),
    b: int = typer.Option(..., "--b", help="Power of w"),
    radius: float = typer.Option(0.9, "--radius", "-r", help="Support radius in (0, 1)"),
    z: str = typer.Option("0", "--z", help="Evaluation point"),
):
    """
    Bergman projection of conj(w)^a w^b on a disk: closed form and quadrature.
    """
    point = _parse_point(z)
    try:
        f = CompactMonomial(a, b, radius)
        closed = project_monomial_closed(a, b, radius, point)
        quad = project(f, point)
    except ValueError as e:
        _usage_error(str(e))

    typer.echo(json.dumps({
        "a": a,
        "b": b,
        "radius": radius,
        "z": _pair(point),
        "closed": _pair(closed),
        "quadrature": _pair(quad.value),
        "error_estimate": quad.error_estimate,
        "converged": quad.converged,
    }, indent=2))


@app.command(name="history")
def history_cmd(
    limit: int = typer.Option(10, "--limit", "-n", help="Rows to show"),
    check: Optional[str] = typer.Option(None, "--check", help="Show the history of one check"),
):
    """
    Show recorded verification runs and searches.
    """
    try:
        db = ResultsDatabase(settings.results_db_path)
        if check:
            rows = db.get_check_history(check)
        else:
            runs = db.get_recent_runs(limit)
            searches = db.get_search_history(limit)
    except sqlite3.Error as e:
        _usage_error(f"Cannot read results database {settings.results_db_path}: {e}")

    if check:
        if not rows:
            console.print(f"[yellow]No recorded results for {check}.[/yellow]")
            return
        table = Table(title=f"History of {check}")
        table.add_column("Run", justify="right")
        table.add_column("Started", style="cyan")
        table.add_column("Status")
        table.add_column("Runtime (s)", justify="right")
        for row in rows:
            status = "[green]pass[/green]" if row["passed"] else "[red]fail[/red]"
            table.add_row(str(row["run_id"]), row["started_at"], status, f"{row['runtime']:.2f}")
        console.print(table)
        return

    table = Table(title="Verification Runs")
    table.add_column("Run", justify="right")
    table.add_column("Started", style="cyan")
    table.add_column("Checks", justify="right")
    table.add_column("Status")
    for run in runs:
        status = "[green]pass[/green]" if run.passed else "[red]fail[/red]"
        table.add_row(str(run.id), run.started_at.strftime("%Y-%m-%d %H:%M"), str(run.check_count), status)
    console.print(table)

    table = Table(title="Extremal Searches")
    table.add_column("Id", justify="right")
    table.add_column("Started", style="cyan")
    table.add_column("Family")
    table.add_column("Degree", justify="right")
    table.add_column("Seed", justify="right")
    table.add_column("Best ratio", justify="right", style="green")
    for row in searches:
        table.add_row(
            str(row["id"]), row["started_at"], row["family"], str(row["degree"]),
            str(row["seed"]), f"{row['best_value']:.6f}",
        )
    console.print(table)


if __name__ == "__main__":
    app()
