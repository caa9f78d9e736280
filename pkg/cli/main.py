# cli/main.py
"""
riskgraph command-line front end.

stdout carries only the artifact of each command (DOT, matrix text, CSV, JSON,
report); diagnostics and logs go to stderr.
"""
import sys
from enum import IntEnum
from pathlib import Path
from typing import List, Optional

import click

from config.settings import settings
from models.errors import GraphError, RegisterError, RiskGraphError
from services.assessment_engine import prioritize
from services.closure import closure_delta, printed_closure, transitive_closure
from services.exporter import export_csv, render_matrix, report, to_dot
from services.influence_graph import adjacency_matrix, canonical_factor_graph, load_graph_file
from services.risk_register import load_register, read_register_text, validate_register_document
from services.success_predictor import monte_carlo_success, project_success_rate
from utils.logger import setup_logger

logger = setup_logger(__name__)
setup_logger("services")


class ExitCode(IntEnum):
    SUCCESS = 0
    VALIDATION_FAILURE = 1
    INPUT_ERROR = 2
    USAGE_ERROR = 3


register_argument = click.argument('register', type=click.Path(dir_okay=False, path_type=Path))
lenient_option = click.option(
    '--lenient', is_flag=True, default=None,
    help='Ignore unknown keys and fill missing frequencies from the typical-frequency table.',
)
residual_option = click.option('--residual', is_flag=True, help='Use post-mitigation (residual) impacts.')
sample_option = click.option(
    '--sample', is_flag=True,
    help='Add a Monte Carlo check with DEFAULT_TRIALS trials when --trials is not given.',
)


def _estimate(register, trials: Optional[int], seed: Optional[int], residual: bool, sample: bool = False):
    if trials is None and sample:
        trials = settings.DEFAULT_TRIALS
    if trials is None:
        return project_success_rate(register, use_residual=residual)
    seed = settings.DEFAULT_SEED if seed is None else seed
    return monte_carlo_success(register, trials=trials, seed=seed, use_residual=residual)


def _select_graph(graph_file: Optional[Path], paper_literal: bool):
    if graph_file is not None:
        if paper_literal:
            raise click.UsageError("--paper-literal applies only to the canonical graph")
        return load_graph_file(graph_file)
    return canonical_factor_graph(paper_literal=paper_literal)


@click.group()
def cli():
    """Risk register analytics: factor graphs, transitive closure, priorities, success rate."""


@cli.command()
@register_argument
@lenient_option
def validate(register: Path, lenient: Optional[bool]):
    """Print every violation in REGISTER; exit 1 if there are any."""
    issues = validate_register_document(read_register_text(register), lenient=lenient)
    for issue in issues:
        v = issue.violation
        click.echo(f"{issue.risk_id or '-'}\t{v.code.value}\t{v.field or '-'}\t{v.message}")
    if issues:
        logger.warning(f"{register}: {len(issues)} violation(s)")
        return ExitCode.VALIDATION_FAILURE
    logger.info(f"{register}: register is valid")
    return ExitCode.SUCCESS


@cli.command()
@register_argument
@residual_option
@click.option('--csv', 'as_csv', is_flag=True, help='Emit CSV instead of the text report.')
@lenient_option
def assess(register: Path, residual: bool, as_csv: bool, lenient: Optional[bool]):
    """Prioritize the risks in REGISTER."""
    risk_register = load_register(register, lenient=lenient)
    assessments = prioritize(risk_register, use_residual=residual)
    if as_csv:
        click.echo(export_csv(assessments), nl=False)
    else:
        click.echo(report(risk_register, assessments), nl=False)
    return ExitCode.SUCCESS


@cli.command()
@click.option('--register', '--graph-file', 'graph_file', type=click.Path(dir_okay=False, path_type=Path),
              help='Graph-definition file ({"factors": [...], "edges": [...]}), or a risk register; '
                   'a register without "factors" uses the canonical graph.')
@click.option('--canonical', is_flag=True, help='Use the canonical six-factor graph (default).')
@click.option('--closure', is_flag=True, help='Add closure-only pairs as dashed edges.')
@click.option('--paper-literal', is_flag=True, help='Use the printed (archival) edge set.')
@click.option('--dot/--text', 'as_dot', default=True, help='DOT output (default) or matrix text.')
def graph(graph_file: Optional[Path], canonical: bool, closure: bool, paper_literal: bool, as_dot: bool):
    """Emit the factor graph as DOT."""
    if canonical and graph_file is not None:
        raise click.UsageError("--canonical and --register are mutually exclusive")
    factor_graph = _select_graph(graph_file, paper_literal)
    matrix = adjacency_matrix(factor_graph)
    closed = transitive_closure(matrix) if closure else None
    if closure:
        logger.info(f"closure adds {closure_delta(matrix)}")
    if as_dot:
        click.echo(to_dot(factor_graph, highlight_closure=closed), nl=False)
    else:
        click.echo(render_matrix(closed if closed is not None else matrix), nl=False)
    return ExitCode.SUCCESS


@cli.command()
@click.option('--closure', is_flag=True, help='Render the transitive closure M_R*.')
@click.option('--paper-literal', is_flag=True, help='Render the printed (archival) matrix.')
@click.option('--graph-file', type=click.Path(dir_okay=False, path_type=Path),
              help='Graph-definition file instead of the canonical graph.')
def matrix(closure: bool, paper_literal: bool, graph_file: Optional[Path]):
    """Emit the relation matrix as fixed-width text."""
    if closure and paper_literal:
        click.echo("note: printed closure transcription; it is not derivable from the printed matrix", err=True)
        click.echo(render_matrix(printed_closure()), nl=False)
        return ExitCode.SUCCESS

    m = adjacency_matrix(_select_graph(graph_file, paper_literal))
    if closure:
        m = transitive_closure(m)
    click.echo(render_matrix(m), nl=False)
    return ExitCode.SUCCESS


@cli.command()
@register_argument
@click.option('--trials', type=click.IntRange(min=1), default=None, help='Monte Carlo trials.')
@click.option('--seed', type=int, default=None, help='Seed for the PCG64 stream.')
@sample_option
@residual_option
@lenient_option
def predict(
    register: Path, trials: Optional[int], seed: Optional[int], sample: bool, residual: bool, lenient: Optional[bool],
):
    """Print the project success estimate as JSON."""
    risk_register = load_register(register, lenient=lenient)
    estimate = _estimate(risk_register, trials, seed, residual, sample)
    click.echo(estimate.model_dump_json(indent=2))
    return ExitCode.SUCCESS


@cli.command(name='report')
@register_argument
@click.option('--trials', type=click.IntRange(min=1), default=None, help='Add a Monte Carlo check.')
@click.option('--seed', type=int, default=None)
@sample_option
@residual_option
@lenient_option
def report_command(
    register: Path, trials: Optional[int], seed: Optional[int], sample: bool, residual: bool, lenient: Optional[bool],
):
    """Full report: priorities, per-type summary, mitigations, success estimate."""
    risk_register = load_register(register, lenient=lenient)
    assessments = prioritize(risk_register, use_residual=residual)
    estimate = _estimate(risk_register, trials, seed, residual, sample)
    click.echo(report(risk_register, assessments, estimate), nl=False)
    return ExitCode.SUCCESS


def run(argv: Optional[List[str]] = None) -> int:
    """Run one command and map its outcome onto an ExitCode."""
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv:
        click.echo(cli.get_help(click.Context(cli, info_name='riskgraph')), err=True)
        return ExitCode.USAGE_ERROR

    try:
        result = cli.main(args=argv, prog_name='riskgraph', standalone_mode=False)
    except click.UsageError as e:
        if e.ctx is not None:
            click.echo(e.ctx.get_usage(), err=True)
        click.echo(f"Error: {e.format_message()}", err=True)
        return ExitCode.USAGE_ERROR
    except click.exceptions.Abort:
        return ExitCode.USAGE_ERROR
    except (RegisterError, GraphError) as e:
        click.echo(f"Error: {e}", err=True)
        return ExitCode.INPUT_ERROR
    except OSError as e:
        click.echo(f"Error: {e}", err=True)
        return ExitCode.INPUT_ERROR
    except RiskGraphError as e:
        click.echo(f"Error: {e}", err=True)
        return ExitCode.INPUT_ERROR
    except ValueError as e:
        click.echo(f"Error: {e}", err=True)
        return ExitCode.INPUT_ERROR

    if result is None:
        return ExitCode.SUCCESS
    return int(result)


if __name__ == "__main__":
    sys.exit(run())
