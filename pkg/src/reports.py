"""Check reports: records, console tables, and structured / CSV output."""

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

from rich.console import Console
from rich.table import Table


console = Console(stderr=True)

ReportFormat = Literal["structured", "csv"]


@dataclass
class CheckReport:
    """Result of one named verification check."""
    name: str
    anchor: str
    computed: list
    expected: list
    tolerance: float
    passed: bool
    runtime: float = 0.0
    labels: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    informational: bool = False

    @property
    def gates(self) -> bool:
        """Whether this report counts against the aggregate verdict."""
        return not self.informational

    @property
    def status(self) -> str:
        if self.passed:
            return "pass"
        return "info" if self.informational else "FAIL"

    def metric_label(self, index: int) -> str:
        if index < len(self.labels):
            return self.labels[index]
        return f"computed[{index}]"

    def to_record(self, timings: bool = False) -> dict:
        """Convert to a JSON-ready dict; complex numbers become [re, im]."""
        record = {
            "name": self.name,
            "anchor": self.anchor,
            "computed": _encode(self.computed),
            "expected": _encode(self.expected),
            "labels": list(self.labels),
            "tolerance": self.tolerance,
            "pass": self.passed,
            "informational": self.informational,
            "notes": list(self.notes),
        }
        if timings:
            record["runtime"] = self.runtime
        return record


def _encode(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (list, tuple)):
        return [_encode(v) for v in value]
    if hasattr(value, "item"):
        return _encode(value.item())
    return value


def aggregate_passed(reports: list[CheckReport]) -> bool:
    """True when every gating report passed; an empty selection passes."""
    return all(r.passed for r in reports if r.gates)


def metric_rows(reports: list[CheckReport]) -> list[tuple[str, str, str]]:
    """Flatten reports into (check, metric, value) rows."""
    rows = []
    for report in reports:
        for i, value in enumerate(report.computed):
            rows.append((report.name, report.metric_label(i), _format_value(value)))
        rows.append((report.name, "pass", str(report.passed).lower()))
    return rows


def _format_value(value) -> str:
    if isinstance(value, complex):
        return f"{value.real!r}{value.imag:+}j"
    if isinstance(value, (list, tuple)):
        return ";".join(_format_value(v) for v in value)
    return repr(value) if isinstance(value, float) else str(value)


def write_reports(
    reports: list[CheckReport],
    path: Path,
    fmt: ReportFormat = "structured",
    timings: bool = False,
) -> Path:
    """
    Write reports to ``path``.

    Args:
        reports: Reports in check order
        path: Destination file (parent directories are created)
        fmt: "structured" for JSON, "csv" for the flat (check, metric, value) table
        timings: Include wall-clock runtimes; off by default so reruns are byte-identical

    Returns:
        The written path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    if fmt == "csv":
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["check", "metric", "value"])
            writer.writerows(metric_rows(reports))
            if timings:
                writer.writerows((r.name, "runtime", repr(r.runtime)) for r in reports)
    else:
        document = {
            "passed": aggregate_passed(reports),
            "checks": [r.to_record(timings=timings) for r in reports],
        }
        path.write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")
    return path


def _summarize(report: CheckReport, limit: int = 3) -> str:
    parts = [
        f"{report.metric_label(i)}={_short(v)}"
        for i, v in enumerate(report.computed[:limit])
    ]
    if len(report.computed) > limit:
        parts.append(f"... ({len(report.computed)} values)")
    return ", ".join(parts)


def _short(value) -> str:
    if isinstance(value, complex):
        return f"{value.real:.6g}{value.imag:+.6g}j"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def print_reports(reports: list[CheckReport]):
    """Print a formatted verification table to the console."""
    if not reports:
        console.print("[yellow]No checks selected.[/yellow]")
        return

    table = Table(title="Verification Report")
    table.add_column("Check", style="cyan")
    table.add_column("Status")
    table.add_column("Computed", overflow="fold")
    table.add_column("Tolerance", justify="right")
    table.add_column("Runtime (s)", justify="right")

    for report in reports:
        style = "green" if report.passed else "yellow" if report.informational else "red"
        table.add_row(
            report.name,
            f"[{style}]{report.status}[/{style}]",
            _summarize(report),
            f"{report.tolerance:.0e}",
            f"{report.runtime:.2f}",
        )

    console.print(table)
    for report in reports:
        for note in report.notes:
            console.print(f"  [dim]{report.name}: {note}[/dim]")
