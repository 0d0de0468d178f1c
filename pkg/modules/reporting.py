#!/usr/bin/env python3
"""
Reporting Module for the Bidegree Toolkit

This module provides run reports for the command-line interface and the
rich rendering around them. Data (TSV, JSON, tables) goes to stdout;
banners, error panels and progress go to stderr.
"""

import json
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence

import typer
from rich.console import Console
from rich.panel import Panel
from rich.progress import BarColumn, Progress, SpinnerColumn, TaskProgressColumn, TextColumn
from rich.table import Table

from errors import BidegreeError, DegenerateSequenceError
from sequences import BidegreeSequence, GraphVariant, is_graphical, sparsity_diagnostic


class OutputFormat(Enum):
    TSV = "tsv"
    JSON = "json"
    TABLE = "table"


@dataclass
class SequenceSummary:
    """Size and sparsity figures of the input sequence."""
    N: int
    S: int
    d_max: int
    effective_tau: Optional[float] = None
    condition_A1: Optional[int] = None
    graphical: bool = True

    @classmethod
    def from_sequence(cls, seq: BidegreeSequence,
                      variant: GraphVariant = GraphVariant.DIRECTED_LOOPS) -> "SequenceSummary":
        summary = cls(N=seq.N, S=seq.S, d_max=seq.d_max,
                      graphical=seq.is_balanced and is_graphical(seq, variant))
        try:
            diagnostic = sparsity_diagnostic(seq)
        except DegenerateSequenceError:
            return summary
        summary.effective_tau = diagnostic.effective_tau
        summary.condition_A1 = diagnostic.condition_A1
        return summary


@dataclass
class MethodResult:
    """One method's output; relative_error is set only when the exact count is known."""
    method: str
    order: Optional[int] = None
    log_estimate: Optional[float] = None
    estimate: Optional[float] = None
    relative_error: Optional[float] = None
    seconds: Optional[float] = None


@dataclass
class RunReport:
    label: str
    summary: SequenceSummary
    exact: Optional[int] = None
    exact_seconds: Optional[float] = None
    results: List[MethodResult] = field(default_factory=list)

    def add_estimate(self, method: str, order: Optional[int], log_value: float,
                     seconds: Optional[float] = None) -> MethodResult:
        result = MethodResult(method=method, order=order, log_estimate=log_value,
                              estimate=_safe_exp(log_value), seconds=seconds)
        if self.exact:
            result.relative_error = math.expm1(log_value - math.log(self.exact))
        self.results.append(result)
        return result

    def column(self, method: str, order: Optional[int]) -> Optional[MethodResult]:
        for result in self.results:
            if result.method == method and result.order == order:
                return result
        return None

    def to_dict(self) -> Dict[str, Any]:
        data = {"label": self.label, "summary": asdict(self.summary),
                "exact": str(self.exact) if self.exact is not None else None,
                "exact_seconds": self.exact_seconds,
                "results": [asdict(r) for r in self.results]}
        if self.exact is None:
            for result in data["results"]:
                result.pop("relative_error")
        return data


def _safe_exp(value: float) -> float:
    try:
        return math.exp(value)
    except OverflowError:
        return math.inf


def format_number(value: Optional[float]) -> str:
    if value is None:
        return ""
    if math.isinf(value):
        return "inf"
    return f"{value:.6g}"


def format_seconds(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.4f}"


def method_name(result: MethodResult) -> str:
    return result.method if result.order is None else f"{result.method}-{result.order}"


def report_json(reports: Sequence[RunReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True)


def estimate_tsv(report: RunReport) -> List[str]:
    lines = ["method\torder\tlog_estimate\testimate\trelative_error\tseconds"]
    for result in report.results:
        lines.append("\t".join([
            result.method, "" if result.order is None else str(result.order),
            f"{result.log_estimate:.12g}", format_number(result.estimate),
            format_number(result.relative_error), format_seconds(result.seconds)]))
    return lines


def compare_tsv(reports: Sequence[RunReport], methods: Sequence[str]) -> List[str]:
    """Comparison table: one row per report, estimates then relative errors then runtimes."""
    header = (["label", "N", "S", "exact"] + list(methods)
              + [f"err_{m}" for m in methods] + ["sec_exact"] + [f"sec_{m}" for m in methods])
    lines = ["\t".join(header)]
    for report in reports:
        by_name = {method_name(r): r for r in report.results}
        picked = [by_name.get(m) for m in methods]
        row = [report.label, str(report.summary.N), str(report.summary.S),
               "" if report.exact is None else str(report.exact)]
        row += [format_number(r.estimate) if r else "" for r in picked]
        row += [format_number(r.relative_error) if r else "" for r in picked]
        row += [format_seconds(report.exact_seconds)]
        row += [format_seconds(r.seconds) if r else "" for r in picked]
        lines.append("\t".join(row))
    return lines


class BidegreeUI:
    """Console rendering for the command-line interface."""

    def __init__(self, quiet: bool = False):
        self.console = Console()
        self.err_console = Console(stderr=True)
        self.quiet = quiet

    def emit(self, text: str):
        typer.echo(text)

    def emit_lines(self, lines: Sequence[str]):
        for line in lines:
            self.emit(line)

    def show_error(self, title: str, error: BidegreeError):
        details = ""
        if error.details:
            details = "\n" + "\n".join(f"[dim]{k}:[/dim] {v}" for k, v in error.details.items())
        panel = Panel(
            f"[red]{error}[/red]{details}",
            title=f"{title} ({error.error_code})",
            border_style="red",
            padding=(0, 1),
        )
        self.err_console.print(panel)

    def show_sparsity_banner(self, summary: SequenceSummary):
        """One-panel overview of where the sequence sits relative to the sparse regime."""
        if self.quiet:
            return
        if summary.effective_tau is None:
            text = f"N={summary.N}  S={summary.S}  d_max={summary.d_max}  (too small for a sparsity diagnostic)"
            style = "yellow"
        else:
            in_regime = summary.effective_tau > 0
            text = (f"N={summary.N}  S={summary.S}  d_max={summary.d_max}  "
                    f"effective tau={summary.effective_tau:.3f}  A1 bound={summary.condition_A1}")
            if not in_regime:
                text += "\n[yellow]d_max is at least sqrt(S): estimates are outside the sparse regime[/yellow]"
            style = "blue" if in_regime else "yellow"
        if not summary.graphical:
            text += "\n[red]sequence is not graphical[/red]"
        self.err_console.print(Panel(text, title="Sequence", border_style=style, padding=(0, 1)))

    def render_estimates(self, report: RunReport):
        table = Table(title=f"Estimates for {report.label}", show_header=True,
                      header_style="bold magenta")
        table.add_column("Method", style="cyan", no_wrap=True)
        table.add_column("Order", style="green")
        table.add_column("log estimate", style="yellow")
        table.add_column("Estimate", style="bold")
        if report.exact is not None:
            table.add_column("Rel. error", style="red")
        table.add_column("Seconds", style="blue")
        if report.exact is not None:
            table.add_row("exact", "", f"{math.log(report.exact):.6f}" if report.exact else "-inf",
                          str(report.exact), "0", format_seconds(report.exact_seconds))
        for result in report.results:
            row = [result.method, "" if result.order is None else str(result.order),
                   f"{result.log_estimate:.6f}", format_number(result.estimate)]
            if report.exact is not None:
                row.append(format_number(result.relative_error))
            row.append(format_seconds(result.seconds))
            table.add_row(*row)
        self.console.print(table)

    def render_comparison(self, reports: Sequence[RunReport], methods: Sequence[str]):
        table = Table(title="Exact versus asymptotic counts", show_header=True,
                      header_style="bold magenta")
        table.add_column("Label", style="cyan", no_wrap=True)
        table.add_column("N", style="green")
        table.add_column("Exact", style="bold")
        for m in methods:
            table.add_column(m, style="yellow")
            table.add_column(f"err {m}", style="red")
        for report in reports:
            by_name = {method_name(r): r for r in report.results}
            row = [report.label, str(report.summary.N),
                   "" if report.exact is None else str(report.exact)]
            for m in methods:
                r = by_name.get(m)
                row += [format_number(r.estimate) if r else "",
                        format_number(r.relative_error) if r else ""]
            table.add_row(*row)
        self.console.print(table)

    def render_rows(self, title: str, header: Sequence[str], rows: Sequence[Sequence[str]]):
        table = Table(title=title, show_header=True, header_style="bold magenta")
        for name in header:
            table.add_column(name)
        for row in rows:
            table.add_row(*row)
        self.console.print(table)

    def progress(self) -> Progress:
        """Progress display on stderr; disabled when quiet."""
        return Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            TaskProgressColumn(),
            console=self.err_console,
            transient=True,
            disable=self.quiet,
        )
