#!/usr/bin/env python3
"""
Command-line entry point for the Bidegree Toolkit.

Counts, estimates, expands and samples directed graphs with a prescribed
bidegree sequence. Node indices on the command line are 1-based; the
library and all printed edge lists use 0-based labels.
"""

import json
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from pathlib import Path
from typing import Callable, Iterator, List, Optional, Tuple

import typer

# Add modules directory to path
sys.path.append(str(Path(__file__).parent / "modules"))

from config import APP_NAME, VERSION, get_settings, reset_settings
from errors import BadKError, BadShapeError, BidegreeError, ExitCode, TooLargeError
from logger import BidegreeLogger, LogCategory, configure_logger, create_progress_callback
from sequences import GraphVariant, Side, load_sequence, transpose, validate
from exact_count import count_closed_form, count_exact, ratio_exact, ratio_two_term
from asymptotics import ORDERS, count_estimate_closed, ratio_estimate, telescope_count
from patterns import (
    R,
    Convention,
    ExpansionMode,
    check_identity,
    describe_pattern,
    expand_distinct,
    expand_with_initial_equality,
    format_polynomial,
)
from sampler import (
    DEFAULT_BURN_IN,
    DEFAULT_THIN,
    estimate_ratio_empirical,
    edge_list,
    graph_to_json,
    sample_uniform,
    uniformity_check,
)
from reporting import (
    BidegreeUI,
    OutputFormat,
    RunReport,
    SequenceSummary,
    compare_tsv,
    estimate_tsv,
    format_number,
    report_json,
)

MAX_EXPAND_K = 3
MAX_CHECK_NODES = 6
COMPARE_METHODS = ["closed"] + [f"telescope-{k}" for k in ORDERS]

app = typer.Typer(
    name="bidegree",
    help="Bidegree Toolkit - count, estimate and sample directed graphs with given degrees",
    add_completion=False
)

LOG_DIR_OPTION = typer.Option(None, "--log-dir", help="Write session logs to this directory")
VERBOSE_OPTION = typer.Option(False, "--verbose", "-v", help="Echo debug logging to stderr")
FORMAT_OPTION = typer.Option("tsv", "--format", help="Output format: tsv, json or table")
VARIANT_OPTION = typer.Option("directed-loops", "--variant",
                              help="directed-loops, directed-noloops or undirected")


@contextmanager
def _session(command: str, log_dir: Optional[Path], verbose: bool,
             ui: BidegreeUI) -> Iterator[BidegreeLogger]:
    """Set up settings and logging for one command and map toolkit errors to exit codes."""
    reset_settings()
    settings = get_settings()
    logger = configure_logger(log_dir or settings.log_dir, verbose=verbose)
    logger.log_info(LogCategory.CLI, command, f"{APP_NAME} {VERSION}: {command}")
    try:
        yield logger
    except BidegreeError as e:
        ui.show_error(f"{command} failed", e)
        logger.log_error(LogCategory.CLI, command, str(e), e.details, error_code=e.error_code)
        logger.finalize_session(False)
        raise typer.Exit(e.exit_code)
    except ValueError as e:
        ui.err_console.print(f"[red]{command} failed:[/red] {e}")
        logger.log_error(LogCategory.CLI, command, str(e), error_code="VALUE_ERROR")
        logger.finalize_session(False)
        raise typer.Exit(ExitCode.PARSE)
    logger.finalize_session(True)


def _format(value: str) -> OutputFormat:
    try:
        return OutputFormat(value.strip().lower())
    except ValueError:
        raise typer.BadParameter(f"format must be tsv, json or table, got {value!r}")


def _timed(logger: BidegreeLogger, category: LogCategory, name: str,
           fn: Callable[[], object]) -> Tuple[object, float]:
    with logger.track(category, name) as operation:
        value = fn()
    return value, operation.duration_ms / 1000.0


def _node(index: int, N: int, flag: str) -> int:
    if not 1 <= index <= N:
        raise typer.BadParameter(f"{flag} must be between 1 and {N}, got {index}")
    return index - 1


@app.command()
def count(
    input: Path = typer.Option(..., "--input", help="Sequence file (.json or .csv)"),
    variant: str = VARIANT_OPTION,
    mode: str = typer.Option("exact", "--mode", help="exact or closed-form"),
    format: str = FORMAT_OPTION,
    log_dir: Optional[Path] = LOG_DIR_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """
    Count the realizations of a bidegree sequence.

    The exact count is printed as a full decimal integer. The closed-form
    mode applies only to sequences with a known product formula.
    """
    ui = BidegreeUI()
    output = _format(format)
    with _session("count", log_dir, verbose, ui) as logger:
        seq = load_sequence(input)
        graph_variant = GraphVariant.parse(variant)
        if mode == "exact":
            value, seconds = _timed(logger, LogCategory.EXACT, "count",
                                    lambda: count_exact(seq, graph_variant))
        elif mode == "closed-form":
            value, seconds = _timed(logger, LogCategory.EXACT, "count",
                                    lambda: count_closed_form(seq, graph_variant))
        else:
            raise typer.BadParameter(f"mode must be exact or closed-form, got {mode!r}")

        if output is OutputFormat.JSON:
            ui.emit(json.dumps({"count": str(value), "mode": mode, "variant": graph_variant.value,
                                "sequence": seq.to_dict(), "seconds": seconds}, sort_keys=True))
        elif output is OutputFormat.TABLE:
            ui.render_rows(f"Realizations of {input.name}", ["Variant", "Mode", "Count"],
                           [[graph_variant.value, mode, str(value)]])
        else:
            ui.emit(str(value))


@app.command()
def estimate(
    input: Path = typer.Option(..., "--input", help="Sequence file (.json or .csv)"),
    order: int = typer.Option(1, "--order", min=1, max=4, help="Ratio order for telescoping (1-4)"),
    format: str = FORMAT_OPTION,
    log_dir: Optional[Path] = LOG_DIR_OPTION,
    verbose: bool = VERBOSE_OPTION,
    quiet: bool = typer.Option(False, "--quiet", "-q", help="Suppress the sparsity banner"),
):
    """
    Estimate the number of realizations asymptotically.

    Prints the closed-form estimate and the telescoping estimate at the
    requested order, both as natural logs and as plain numbers.
    """
    ui = BidegreeUI(quiet=quiet)
    output = _format(format)
    with _session("estimate", log_dir, verbose, ui) as logger:
        seq = load_sequence(input)
        report = RunReport(label=input.stem, summary=SequenceSummary.from_sequence(seq))
        closed, closed_seconds = _timed(logger, LogCategory.ASYMPTOTIC, "closed",
                                        lambda: count_estimate_closed(seq))
        ui.show_sparsity_banner(report.summary)
        tele, tele_seconds = _timed(logger, LogCategory.ASYMPTOTIC, f"telescope-{order}",
                                    lambda: telescope_count(seq, order))
        report.add_estimate("closed", None, closed.log_value, closed_seconds)
        report.add_estimate("telescope", order, tele.log_value, tele_seconds)
        _emit_report(ui, output, report)


def _emit_report(ui: BidegreeUI, output: OutputFormat, report: RunReport):
    if output is OutputFormat.JSON:
        ui.emit(report_json([report]))
    elif output is OutputFormat.TABLE:
        ui.render_estimates(report)
    else:
        ui.emit_lines(estimate_tsv(report))


def _evaluate(label: str, seq, logger: BidegreeLogger) -> RunReport:
    report = RunReport(label=label, summary=SequenceSummary.from_sequence(seq))
    report.exact, report.exact_seconds = _timed(logger, LogCategory.EXACT, "exact",
                                                lambda: count_exact(seq))
    closed, seconds = _timed(logger, LogCategory.ASYMPTOTIC, "closed",
                             lambda: count_estimate_closed(seq))
    report.add_estimate("closed", None, closed.log_value, seconds)
    for k in ORDERS:
        tele, seconds = _timed(logger, LogCategory.ASYMPTOTIC, f"telescope-{k}",
                               lambda: telescope_count(seq, k))
        report.add_estimate("telescope", k, tele.log_value, seconds)
    return report


def _parse_sizes(sizes: str) -> List[int]:
    try:
        return [int(part) for part in sizes.replace(" ", "").split(",") if part]
    except ValueError:
        raise typer.BadParameter(f"sizes must be a comma-separated list of integers, got {sizes!r}")


@app.command()
def compare(
    family: str = typer.Option("reg2", "--family", help="reg2 (a=b=[2]*N) or custom"),
    sizes: str = typer.Option("4,6,8,10", "--sizes", help="Comma-separated N values for reg2"),
    input: Optional[List[Path]] = typer.Option(None, "--input", help="Sequence files for custom"),
    workers: int = typer.Option(1, "--workers", min=1, help="Sequences evaluated concurrently"),
    format: str = FORMAT_OPTION,
    log_dir: Optional[Path] = LOG_DIR_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """
    Compare exact counts with every asymptotic estimate.

    One row per sequence: exact count, closed-form and telescoping
    estimates of orders 1-4, relative errors and runtimes. Rows keep the
    input order.
    """
    ui = BidegreeUI()
    output = _format(format)
    with _session("compare", log_dir, verbose, ui) as logger:
        settings = get_settings()
        if family == "reg2":
            cases = [(f"reg2-{n}", validate([2] * n, [2] * n)) for n in _parse_sizes(sizes)]
        elif family == "custom":
            cases = [(path.stem, load_sequence(path)) for path in (input or [])]
        else:
            raise typer.BadParameter(f"family must be reg2 or custom, got {family!r}")

        for label, seq in cases:
            if seq.N > settings.max_nodes:
                raise TooLargeError(f"{label}: N={seq.N} exceeds the exact-count limit "
                                    f"of {settings.max_nodes} nodes", {"label": label})

        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda case: _evaluate(case[0], case[1], logger), cases))

        if output is OutputFormat.JSON:
            ui.emit(report_json(reports))
        elif output is OutputFormat.TABLE:
            ui.render_comparison(reports, COMPARE_METHODS)
        else:
            ui.emit_lines(compare_tsv(reports, COMPARE_METHODS))


@app.command()
def expand(
    k: int = typer.Option(2, "--k", help="Free the first 2k indices (1-3)"),
    weighted: bool = typer.Option(False, "--weighted", help="Start from x1 = x2 with g on x1"),
    mode: str = typer.Option("truncated", "--mode", help="exact or truncated"),
    convention: Optional[str] = typer.Option(
        None, "--convention",
        help="exact or published (default: published when truncated, exact otherwise)"),
    r: str = typer.Option("r", "--r", help="Tuple length: the symbol r or an integer"),
    check: bool = typer.Option(True, "--check/--no-check",
                               help="Verify the exact expansion against brute force"),
    format: str = FORMAT_OPTION,
    log_dir: Optional[Path] = LOG_DIR_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """
    Expand a sum over distinct indices into equality patterns.

    One line per term: coefficient polynomial in r, blocks, free indices and
    the distinct suffix.
    """
    ui = BidegreeUI()
    output = _format(format)
    with _session("expand", log_dir, verbose, ui):
        if not 1 <= k <= MAX_EXPAND_K:
            raise BadKError(f"k must be between 1 and {MAX_EXPAND_K}, got {k}", {"k": k})
        expansion_mode = ExpansionMode.parse(mode)
        if convention is None:
            convention = "published" if expansion_mode is ExpansionMode.TRUNCATED else "exact"
        length = R if r.strip() == "r" else int(r)
        expander = expand_with_initial_equality if weighted else expand_distinct
        expansion = expander(length, k, expansion_mode, Convention.parse(convention))

        identity = None
        if check:
            identity = check_identity(k, weighted)
            message = "matches" if identity else "DOES NOT match"
            ui.err_console.print(f"[dim]exact expansion {message} brute force (k={k}, r={2 * k + 1})[/dim]")

        if output is OutputFormat.JSON:
            ui.emit(json.dumps({
                "k": k, "weighted": weighted, "mode": expansion_mode.value,
                "convention": expansion.convention.value, "identity_check": identity,
                "terms": [{"coefficient": format_polynomial(c), "pattern": describe_pattern(p),
                           "weight": p.weight} for c, p in expansion.terms],
            }, indent=2))
        elif output is OutputFormat.TABLE:
            ui.render_rows(f"Expansion k={k}{' (weighted)' if weighted else ''}",
                           ["Coefficient", "Pattern", "Weight"],
                           [[format_polynomial(c), describe_pattern(p), str(p.weight)]
                            for c, p in expansion.terms])
        else:
            ui.emit_lines(expansion.lines())


@app.command()
def sample(
    input: Path = typer.Option(..., "--input", help="Sequence file (.json or .csv)"),
    variant: str = VARIANT_OPTION,
    samples: int = typer.Option(1, "--samples", min=0, help="Number of graphs"),
    burn_in: int = typer.Option(DEFAULT_BURN_IN, "--burn-in", min=1, help="Steps before the first sample"),
    thin: int = typer.Option(DEFAULT_THIN, "--thin", min=1, help="Steps between samples"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed (default: BIDEGREE_SEED)"),
    triangles: Optional[bool] = typer.Option(None, "--triangles/--no-triangles",
                                             help="Mix in 3-cycle reversals (default: on for directed-noloops)"),
    output_dir: Optional[Path] = typer.Option(None, "--output-dir", help="Write one file per sample"),
    check: bool = typer.Option(False, "--check", help="Chi-square test against all realizations"),
    format: str = FORMAT_OPTION,
    log_dir: Optional[Path] = LOG_DIR_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """
    Sample realizations with the degree-preserving switch chain.

    Edge lists ("u v" per line, 0-based) are separated by blank lines; the
    json format adds the degree margins.
    """
    ui = BidegreeUI()
    output = _format(format)
    with _session("sample", log_dir, verbose, ui) as logger:
        seq = load_sequence(input)
        graph_variant = GraphVariant.parse(variant)
        rng_seed = seed if seed is not None else get_settings().default_seed
        log_progress = create_progress_callback(logger, "sample_uniform")

        with ui.progress() as progress:
            task = progress.add_task("Sampling realizations...", total=max(samples, 1))

            def on_progress(done: int, total: int):
                log_progress(done, total)
                progress.update(task, completed=done)

            graphs = sample_uniform(seq, graph_variant, burn_in, thin, samples, rng_seed,
                                    triangles=triangles, progress=on_progress)

        if output_dir is not None:
            output_dir.mkdir(parents=True, exist_ok=True)
            for number, g in enumerate(graphs, start=1):
                if output is OutputFormat.JSON:
                    path = output_dir / f"sample_{number:04d}.json"
                    path.write_text(json.dumps(graph_to_json(g)))
                else:
                    path = output_dir / f"sample_{number:04d}.txt"
                    path.write_text(edge_list(g) + "\n")
                ui.emit(str(path))
        elif output is OutputFormat.JSON:
            ui.emit(json.dumps([graph_to_json(g) for g in graphs]))
        else:
            ui.emit("\n\n".join(edge_list(g) for g in graphs))

        if check:
            if seq.N > MAX_CHECK_NODES:
                ui.err_console.print(f"[yellow]--check skipped: N={seq.N} exceeds {MAX_CHECK_NODES}[/yellow]")
            else:
                result = uniformity_check(graphs, seq, graph_variant)
                ui.err_console.print(
                    f"uniformity: {result.observed}/{result.realizations} realizations seen, "
                    f"chi-square={result.statistic:.3f}, p={result.p_value:.4f}")


@app.command()
def ratio(
    input: Path = typer.Option(..., "--input", help="Ratio-form sequence file"),
    i: int = typer.Option(..., "--i", help="Numerator node (1-based)"),
    j: int = typer.Option(..., "--j", help="Denominator node (1-based)"),
    side: str = typer.Option("in", "--side", help="Decremented side: in or out"),
    exact: bool = typer.Option(True, "--exact/--no-exact", help="Include the exact ratio"),
    samples: int = typer.Option(0, "--samples", min=0, help="Samples for the empirical estimate"),
    burn_in: int = typer.Option(DEFAULT_BURN_IN, "--burn-in", min=1),
    thin: int = typer.Option(DEFAULT_THIN, "--thin", min=1),
    seed: Optional[int] = typer.Option(None, "--seed"),
    format: str = FORMAT_OPTION,
    log_dir: Optional[Path] = LOG_DIR_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """
    Compare exact, asymptotic and empirical values of |G_{d-i}| / |G_{d-j}|.
    """
    ui = BidegreeUI()
    output = _format(format)
    with _session("ratio", log_dir, verbose, ui):
        seq = load_sequence(input)
        decremented = Side.parse(side)
        a = _node(i, seq.N, "--i")
        b = _node(j, seq.N, "--j")
        if a == b:
            raise BadShapeError(f"--i and --j must name different nodes, got {i} twice", {"i": i, "j": j})

        rows: List[Tuple[str, str, str, str]] = []
        if exact:
            value = ratio_exact(seq, a, b, decremented)
            rows.append(("exact", "", format_number(float(value)), str(value)))
            if decremented is Side.IN:
                two_term = ratio_two_term(seq, a, b)
                rows.append(("two-term", "", format_number(float(two_term)), str(two_term)))
        for order in ORDERS:
            rows.append(("estimate", str(order),
                         format_number(ratio_estimate(seq, a, b, order, decremented)), ""))
        if samples > 0:
            oriented = seq if decremented is Side.IN else transpose(seq)
            rng_seed = seed if seed is not None else get_settings().default_seed
            empirical = estimate_ratio_empirical(oriented, a, b, samples, rng_seed, burn_in, thin)
            rows.append(("empirical", "", format_number(empirical.estimate),
                         format_number(empirical.standard_error)))

        if output is OutputFormat.JSON:
            ui.emit(json.dumps([{"method": m, "order": int(o) if o else None, "value": v,
                                 "detail": d} for m, o, v, d in rows], indent=2))
        elif output is OutputFormat.TABLE:
            ui.render_rows(f"Ratio for nodes {i} and {j} ({decremented.value})",
                           ["Method", "Order", "Value", "Detail"], [list(row) for row in rows])
        else:
            ui.emit("method\torder\tvalue\tdetail")
            ui.emit_lines(["\t".join(row) for row in rows])


@app.command()
def version():
    """Show version information."""
    ui = BidegreeUI()
    ui.console.print(f"[bold blue]{APP_NAME}[/bold blue]")
    ui.console.print(f"Version: {VERSION}")
    ui.console.print("Exact counts, asymptotic estimates and uniform samples of directed graphs "
                     "with a given bidegree sequence")


if __name__ == "__main__":
    app()
