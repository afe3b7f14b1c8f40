"""
fkglab command-line front end.

Every command prints line-oriented text (or a RunReport as JSON with
--json) and exits 0 when the checked property holds, 1 when it is
violated and 2 on invalid input or capacity errors.
"""
import logging
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, List, Optional, Tuple

import typer
from pydantic import ValidationError

from fkglab import __version__
from fkglab.config import settings
from fkglab.exceptions import DimensionMismatchError, FkgLabError
from fkglab.models.rationals import format_decimal, format_rational
from fkglab.models.schemas import InequalityReport, RunReport, TriplePartitionProbs, Verdict
from fkglab.services import degree_sets, file_formats, percolation
from fkglab.services.measures import check_fkg_property, check_positive_association, fixed_point_measure
from fkglab.services.realization import realize, verify_realization
from fkglab.services.strong_inequality import (
    block_masses,
    check_strong_inequality,
    induction_trace,
    verify_induction_step,
)
from fkglab.workflows.property_suite import PropertySuite

logger = logging.getLogger(__name__)

app = typer.Typer(
    name="fkglab",
    help=(
        "Exact verification of FKG-type correlation inequalities on the hypercube.\n\n"
        "Exit codes: 0=holds, 1=violated, 2=invalid input or capacity error."
    ),
    add_completion=False,
    no_args_is_help=True,
)

CommandResult = Tuple[RunReport, List[str]]


@dataclass
class CliOptions:
    json_output: bool = False
    verbose: bool = False
    workers: Optional[int] = None


options = CliOptions()


def _version_callback(value: bool) -> None:
    if value:
        typer.echo(f"{settings.app_name} {__version__}")
        raise typer.Exit()


@app.callback()
def main(
    json_output: bool = typer.Option(False, "--json", help="Print the RunReport as JSON."),
    verbose: bool = typer.Option(False, "--verbose", help="Per-trial lines and debug logging."),
    workers: Optional[int] = typer.Option(
        None, "--workers", min=1, envvar="FKGLAB_WORKERS", help="Worker processes (default 1)."
    ),
    version: bool = typer.Option(
        False, "--version", callback=_version_callback, is_eager=True, help="Show the version and exit."
    ),
) -> None:
    """fkglab: FKG property, strong inequality, realizations, percolation and degree sets."""
    options.json_output = json_output
    options.verbose = verbose
    options.workers = workers
    logging.basicConfig(
        level=logging.DEBUG if verbose else settings.log_level,
        format=settings.log_format,
        stream=sys.stderr,
        force=True,
    )


def _exact(value: Fraction) -> str:
    return format_rational(value)


def _emit(result: CommandResult) -> None:
    report, lines = result
    if options.json_output:
        typer.echo(report.model_dump_json(indent=2))
    else:
        for line in lines:
            typer.echo(line)
        typer.echo(f"verdict: {report.verdict.value}")
    raise typer.Exit(code=report.exit_code)


def _run_safe(command: str, func: Callable[[], CommandResult]) -> None:
    """Run a command body; input errors become an invalid-input report with exit code 2"""
    try:
        result = func()
    except (FkgLabError, ValidationError, OSError) as e:
        logger.error(f"[CLI] {command} rejected its input: {e}")
        result = (RunReport.build(command, Verdict.INVALID_INPUT, error=str(e)), [f"error: {e}"])
    _emit(result)


def _inequality_lines(report: InequalityReport) -> List[str]:
    relation = ">=" if report.holds else "<"
    return [
        f"lhs: {_exact(report.lhs)}",
        f"rhs: {_exact(report.rhs)}",
        f"margin: {_exact(report.margin)}",
        f"{_exact(report.lhs)} {relation} {_exact(report.rhs)}",
    ]


# ==================== MEASURES ====================

@app.command("check-fkg")
def check_fkg(measure_file: Path = typer.Argument(..., help="Measure JSON file.")) -> None:
    """Check the FKG lattice condition μ(a∨b)μ(a∧b) ≥ μ(a)μ(b)."""
    _run_safe("check-fkg", lambda: _check_fkg_impl(measure_file))


def _check_fkg_impl(measure_file: Path) -> CommandResult:
    measure = file_formats.load_measure(measure_file)
    violation = check_fkg_property(measure, options.workers)
    if violation is None:
        return RunReport.build("check-fkg", Verdict.HOLDS), [f"n: {measure.dimension}", "fkg: holds"]
    lines = [
        f"n: {measure.dimension}",
        f"violation: a={violation.a} b={violation.b}",
        f"{_exact(violation.lhs)} < {_exact(violation.rhs)}",
    ]
    return RunReport.build("check-fkg", Verdict.VIOLATED, violation=violation), lines


@app.command("check-pa")
def check_pa(measure_file: Path = typer.Argument(..., help="Measure JSON file.")) -> None:
    """Check positive association over all pairs of upsets (n ≤ 5)."""
    _run_safe("check-pa", lambda: _check_pa_impl(measure_file))


def _check_pa_impl(measure_file: Path) -> CommandResult:
    measure = file_formats.load_measure(measure_file)
    violation = check_positive_association(measure)
    if violation is None:
        return RunReport.build("check-pa", Verdict.HOLDS), [f"n: {measure.dimension}", "positive association: holds"]
    lines = [
        f"E1: {' '.join(violation.e1)}",
        f"E2: {' '.join(violation.e2)}",
        f"gap: {_exact(violation.gap)}",
    ]
    return RunReport.build("check-pa", Verdict.VIOLATED, violation=violation), lines


@app.command("mu-fixed")
def mu_fixed(
    n: int = typer.Argument(..., help="Permutation size."),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Also write the measure JSON here."),
) -> None:
    """Print the fixed-point-set law of a uniform permutation of {1..n}."""
    _run_safe("mu-fixed", lambda: _mu_fixed_impl(n, out))


def _mu_fixed_impl(n: int, out: Optional[Path]) -> CommandResult:
    measure = fixed_point_measure(n)
    if out is not None:
        file_formats.dump_measure(measure, out)
    lines = [f"{point} {_exact(weight)}" for point, weight in file_formats.measure_table(measure)]
    return RunReport.build("mu-fixed", Verdict.HOLDS, measure=file_formats.measure_to_document(measure)), lines


# ==================== STRONG INEQUALITY ====================

@app.command()
def strong(
    measure_file: Path = typer.Argument(..., help="Measure JSON file."),
    partition_file: Path = typer.Argument(..., help="Partition JSON file."),
) -> None:
    """Check μ(A)μ(B) ≥ e2(μ(C_1), ..., μ(C_k))."""
    _run_safe("strong", lambda: _strong_impl(measure_file, partition_file))


def _strong_impl(measure_file: Path, partition_file: Path) -> CommandResult:
    measure = file_formats.load_measure(measure_file)
    partition = file_formats.load_partition(partition_file)
    if measure.dimension != partition.dimension:
        raise DimensionMismatchError(measure.dimension, partition.dimension)
    mass_a, mass_b, mass_c = block_masses(measure, partition)
    report = check_strong_inequality(measure, partition)
    lines = [
        f"mu(A): {_exact(mass_a)}",
        f"mu(B): {_exact(mass_b)}",
        *(f"mu(C{i}): {_exact(m)}" for i, m in enumerate(mass_c, start=1)),
        *_inequality_lines(report),
    ]
    witnesses = {
        "report": report,
        "masses": {"A": _exact(mass_a), "B": _exact(mass_b), "C": [_exact(m) for m in mass_c]},
    }
    return RunReport.build("strong", report.verdict, **witnesses), lines


@app.command()
def trace(
    measure_file: Path = typer.Argument(..., help="Product-measure JSON file."),
    partition_file: Path = typer.Argument(..., help="Partition JSON file."),
) -> None:
    """Run the last-coordinate induction step and check its obligations."""
    _run_safe("trace", lambda: _trace_impl(measure_file, partition_file))


def _trace_impl(measure_file: Path, partition_file: Path) -> CommandResult:
    measure = file_formats.load_measure(measure_file)
    partition = file_formats.load_partition(partition_file)
    step = induction_trace(measure, partition)
    verdict = verify_induction_step(step)
    lines = [
        f"a0: {_exact(step.a0)}",
        f"b0: {_exact(step.b0)}",
        f"d: {_exact(step.d)}",
        f"c+: {' '.join(_exact(x) for x in step.c_plus)}",
        f"co: {' '.join(_exact(x) for x in step.c_circ)}",
        f"c-: {' '.join(_exact(x) for x in step.c_minus)}",
        f"q: {_exact(step.q)}",
        f"orientation: {verdict.orientation}",
    ]
    if verdict.failed:
        lines.append(f"failed: {', '.join(verdict.failed)}")
    return RunReport.build("trace", verdict.verdict, trace=step, obligations=verdict), lines


# ==================== REALIZATIONS ====================

@app.command("realize")
def realize_command(
    measure_file: Path = typer.Argument(..., help="Full-support FKG measure JSON file."),
    out_file: Optional[Path] = typer.Argument(None, help="Where to write the realization JSON."),
) -> None:
    """Compile a measure into independent sources and monotone outputs."""
    _run_safe("realize", lambda: _realize_impl(measure_file, out_file))


def _realize_impl(measure_file: Path, out_file: Optional[Path]) -> CommandResult:
    measure = file_formats.load_measure(measure_file)
    realization = realize(measure)
    if out_file is not None:
        file_formats.dump_realization(realization, out_file)
    lines = [f"m: {realization.m}"]
    lines += [f"{name} {_exact(p)}" for name, p in zip(realization.names, realization.sources)]
    lines += [f"X{i + 1} {realization.table_string(i)}" for i in range(realization.n)]
    verdict = verify_realization(realization, measure, options.workers)
    document = file_formats.realization_to_document(realization)
    return RunReport.build("realize", verdict.verdict, realization=document, verification=verdict), lines


@app.command("verify-realization")
def verify_realization_command(
    realization_file: Path = typer.Argument(..., help="Realization JSON file."),
    measure_file: Path = typer.Argument(..., help="Measure JSON file."),
) -> None:
    """Check monotone truth tables and an exactly matching pushforward."""
    _run_safe("verify-realization", lambda: _verify_realization_impl(realization_file, measure_file))


def _verify_realization_impl(realization_file: Path, measure_file: Path) -> CommandResult:
    realization = file_formats.load_realization(realization_file)
    measure = file_formats.load_measure(measure_file)
    verdict = verify_realization(realization, measure, options.workers)
    lines = [f"pushforward matches: {verdict.pushforward_matches}"]
    if verdict.monotonicity_witness is not None:
        w = verdict.monotonicity_witness
        lines.append(f"non-monotone: output {w.output} at assignment {w.assignment}, bit {w.bit}")
    if verdict.mismatched_points:
        lines.append(f"mismatched points: {' '.join(verdict.mismatched_points)}")
    return RunReport.build("verify-realization", verdict.verdict, verification=verdict), lines


# ==================== APPLICATIONS ====================

@app.command("percolation")
def percolation_command(
    graph_file: Path = typer.Argument(..., help="Graph text file: 'n m' then 'u v p/q' lines."),
    v1: int = typer.Argument(...),
    v2: int = typer.Argument(...),
    v3: int = typer.Argument(...),
    mc: Optional[Tuple[int, int]] = typer.Option(
        None, "--mc", metavar="SAMPLES SEED", help="Monte-Carlo estimate instead of exact enumeration."
    ),
) -> None:
    """Connectivity-class probabilities of three vertices and P(123)P(1|2|3) ≥ e2(...)."""
    _run_safe("percolation", lambda: _percolation_impl(graph_file, (v1, v2, v3), mc))


def _percolation_impl(graph_file: Path, terminals: Tuple[int, int, int],
                      mc: Optional[Tuple[int, int]]) -> CommandResult:
    graph = file_formats.load_graph(graph_file)
    if mc is None:
        probs = percolation.exact_triple_probs(graph, terminals, options.workers)
        report = percolation.check_percolation_inequality(probs)
        lines = [f"P({name}): {_exact(p)}" for name, p in probs.as_dict().items()]
        lines += _inequality_lines(report)
        return RunReport.build("percolation", report.verdict, probabilities=probs, report=report), lines

    samples, seed = mc
    estimate = percolation.mc_triple_probs(graph, terminals, samples, seed, options.workers)
    plug_in = percolation.check_percolation_inequality(
        TriplePartitionProbs(**dict(zip(TriplePartitionProbs.model_fields, estimate.frequencies.values())))
    )
    lines = [
        f"P({name}) ~ {format_decimal(p, settings.decimal_digits)} ± {estimate.half_width:.{settings.decimal_digits}g}"
        for name, p in estimate.frequencies.items()
    ]
    lines += [f"samples: {samples}", f"seed: {seed}", *_inequality_lines(plug_in)]
    return RunReport.build("percolation", plug_in.verdict, estimate=estimate, report=plug_in), lines


@app.command()
def degree(
    n: int = typer.Argument(..., help="The graph has 2n vertices."),
    mc: Optional[Tuple[int, int]] = typer.Option(
        None, "--mc", metavar="SAMPLES SEED", help="Monte-Carlo estimate instead of exact enumeration."
    ),
    force: bool = typer.Option(False, "--force", help="Allow the n = 4 exact enumeration (minutes)."),
) -> None:
    """Distribution of |S| = #{vertices of degree ≥ n} in G(2n, 1/2) and the degree-set corollary."""
    _run_safe("degree", lambda: _degree_impl(n, mc, force))


def _degree_impl(n: int, mc: Optional[Tuple[int, int]], force: bool) -> CommandResult:
    if mc is not None:
        samples, seed = mc
        estimate = degree_sets.mc_degree_distribution(n, samples, seed, options.workers)
        lines = [
            f"{k}  {format_decimal(p, settings.decimal_digits)} ± {estimate.half_width:.{settings.decimal_digits}g}"
            for k, p in estimate.frequencies.items()
        ]
        return RunReport.build("degree", Verdict.HOLDS, estimate=estimate), lines

    dist = degree_sets.exact_degree_distribution(n, force=force, workers=options.workers)
    reports = [degree_sets.check_degree_corollary(dist, k) for k in range(2 * n + 1)]
    central = degree_sets.check_central_bound(dist)
    lines = [f"{k}  {_exact(p)}  {decimal}" for k, p, decimal in degree_sets.distribution_rows(dist)]
    lines += [
        f"k={k}: {_exact(r.lhs)} >= {_exact(r.rhs)} {r.verdict.value}" for k, r in enumerate(reports)
    ]
    lines.append(f"central bound: {central.verdict.value} (cap {central.cap_display}, limit {central.limit_display})")
    holds = all(r.holds for r in reports) and central.verdict == Verdict.HOLDS
    verdict = Verdict.HOLDS if holds else Verdict.VIOLATED
    return RunReport.build("degree", verdict, distribution=dist, corollary=reports, central=central), lines


# ==================== PROPERTY SUITE ====================

@app.command()
def suite(
    seed: int = typer.Argument(settings.suite_seed, help="Base seed."),
    trials: int = typer.Argument(settings.suite_trials, min=1, help="Base trial count; steps scale from it."),
) -> None:
    """Run the seeded property battery; exits 0 only if every step holds."""
    _run_safe("suite", lambda: _suite_impl(seed, trials))


def _suite_impl(seed: int, trials: int) -> CommandResult:
    report = PropertySuite(seed, trials, workers=options.workers, verbose=options.verbose).run()
    lines = []
    for step in report.steps:
        line = f"{step.name}: {step.trials} trials, {step.failures} failures"
        if step.nontrivial is not None:
            line += f", nontrivial {step.nontrivial}/{step.trials} (need {step.min_nontrivial})"
        lines.append(line)
        if step.witness:
            lines.append(f"  first failure: {step.witness}")
        lines.extend(f"  {detail}" for detail in step.details)
    return RunReport.build("suite", report.verdict, suite=report), lines


if __name__ == "__main__":
    app()
