"""CLI interface for breg."""

import functools
import logging
import math
import sys
from pathlib import Path
from typing import Optional

import click

from . import discrete, expfam
from .checks import run_suite
from .config import ExitCode, Kind, Quantity, Suite
from .errors import BregError, DomainError, InputError
from .families import parse_family
from .generators import parse_generator
from .grid import family_pair, grid_spec, sweep, value_range
from .store import load_measure, load_settings, write_grid_csv

logger = logging.getLogger(__name__)


def format_value(value: float) -> str:
    """Shortest round-trip repr; infinities print as `inf` / `-inf`."""
    value = float(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(value)


def parse_vector(text: str, name: str) -> list[float]:
    """Parse a comma-separated decimal vector."""
    try:
        return [float(part) for part in text.split(",")]
    except ValueError:
        raise InputError(f"--{name}: invalid vector {text!r}")


def _exit_code(error: BregError) -> ExitCode:
    if isinstance(error, DomainError):
        return ExitCode.DOMAIN_ERROR
    if isinstance(error, InputError):
        return ExitCode.INPUT_ERROR
    return ExitCode.PROPERTY_FAILURE


def handle_errors(fn):
    """Report BregError as one `error=<code> detail=<message>` line and exit."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except BregError as e:
            click.echo(f"error={e.code} detail={e.message}", err=True)
            sys.exit(_exit_code(e))
    return wrapper


@click.group()
@click.version_option(version="0.1.0", prog_name="breg")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="JSON settings file")
@click.option("--verbose", "-v", count=True, help="-v for INFO, -vv for DEBUG logs on stderr")
@click.pass_context
@handle_errors
def cli(ctx: click.Context, config_path: Optional[str], verbose: int):
    """breg - scaled Bregman distances and phi-divergences

    Exact values for finite discrete measures, closed forms for exponential
    families, and oracle checks of both.

    Exit codes: 0 ok, 1 property failure, 2 input error, 3 domain error.
    """
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger("breg").setLevel(level)
    ctx.obj = load_settings(Path(config_path) if config_path else None)


# ============ Discrete Commands ============

@cli.command()
@click.option("--phi", required=True, help="kl | rkl | tv | pearson | lecam | power:<alpha>")
@click.option("--p", "p_path", required=True, type=click.Path(dir_okay=False), help="Measure file for P")
@click.option("--q", "q_path", required=True, type=click.Path(dir_okay=False), help="Measure file for Q")
@click.option("--m", "m_path", type=click.Path(dir_okay=False), help="Scale measure file (default: Q)")
@click.option("--kind", type=click.Choice([k.value for k in Kind]), default=Kind.BPHI.value, show_default=True)
@handle_errors
def divergence(phi: str, p_path: str, q_path: str, m_path: Optional[str], kind: str):
    """Compute D_phi(P, Q) or B_phi(P, Q | M) for discrete measures.

    Examples:
        breg divergence --phi kl --p p.json --q q.json --kind dphi
        breg divergence --phi power:0.5 --p p.json --q q.json --m m.json
    """
    g = parse_generator(phi)
    P = load_measure(Path(p_path))
    Q = load_measure(Path(q_path))
    if Kind(kind) is Kind.DPHI:
        value = discrete.d_phi(g, P, Q)
    else:
        M = load_measure(Path(m_path), probability=False) if m_path else Q
        value = discrete.b_phi(g, P, Q, M)
    click.echo(format_value(value))


@cli.command()
@click.option("--family", required=True, help="Counting family, e.g. binomial:10")
@click.option("--ptilde", required=True, type=float, help="Mean parameter of P")
@click.option("--qtilde", required=True, type=float, help="Mean parameter of Q")
@click.option("--alpha", "alpha_range", required=True, help="<min>:<max>:<steps>")
@click.option("--beta", "beta_range", default="0:1", show_default=True, help="<min>:<max>:<steps>")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False), help="CSV output path")
@click.option("--workers", type=int, default=None, help="Rows evaluated in parallel")
@click.pass_obj
@handle_errors
def grid3d(settings, family: str, ptilde: float, qtilde: float, alpha_range: str, beta_range: str,
           out_path: str, workers: Optional[int]):
    """Sweep B_alpha(P, Q | beta P + (1 - beta) Q) over an (alpha, beta) grid.

    Writes `alpha,beta,value` rows, alpha-major. Alpha points at 0 or 1
    use the reverse-KL and KL limits instead of the power formula.

    Examples:
        breg grid3d --family binomial:10 --ptilde 0.25 --qtilde 0.2 \\
            --alpha 0.2:2:50 --beta 0:1:50 --out grid.csv
    """
    spec = grid_spec(alpha_range, beta_range, settings.grid_steps)
    P, Q = family_pair(parse_family(family), ptilde, qtilde)
    rows = sweep(P, Q, spec, workers=workers or settings.workers)
    write_grid_csv(Path(out_path), rows)
    low, high = value_range(rows)
    click.echo(f"wrote {len(rows)} rows to {out_path} (values {format_value(low)} .. {format_value(high)})")


# ============ Exponential Family Commands ============

@cli.command("expfam")
@click.option("--family", required=True,
              help="binomial:<n> | rayleigh | poisson-process:<t> | wiener:<t> | gbm:<t>,<sigma>")
@click.option("--alpha", required=True, type=float)
@click.option("--theta1", required=True, help="Natural parameter, comma-separated")
@click.option("--theta2", required=True, help="Natural parameter, comma-separated")
@click.option("--theta0", help="Scale parameter (default: theta2)")
@click.option("--quantity", type=click.Choice([q.value for q in Quantity]), default=Quantity.BALPHA.value,
              show_default=True)
@handle_errors
def expfam_command(family: str, alpha: float, theta1: str, theta2: str, theta0: Optional[str], quantity: str):
    """Closed-form distances between members of an exponential family.

    Alpha within 1e-9 of 0 or 1 uses the limit formulas.

    Examples:
        breg expfam --family rayleigh --alpha 0.5 --theta1 1 --theta2 4 --quantity rho
        breg expfam --family binomial:10 --alpha 0.7 --theta1 -1.1 --theta2 -1.4 --theta0 -0.8
    """
    F = parse_family(family)
    t1 = expfam.natural_param(F, parse_vector(theta1, "theta1"))
    t2 = expfam.natural_param(F, parse_vector(theta2, "theta2"))
    t0 = expfam.natural_param(F, parse_vector(theta0, "theta0")) if theta0 else t2

    q = Quantity(quantity)
    if q is Quantity.DALPHA:
        value = expfam.d_alpha(F, alpha, t1, t2)
    elif q is Quantity.BALPHA:
        value = expfam.b_alpha(F, alpha, t1, t2, t0)
    elif q is Quantity.RHO:
        value = expfam.rho_alpha(F, alpha, t1, t2)
    elif q is Quantity.SIGMA:
        value = expfam.sigma_alpha(F, alpha, t0, t1, t2)
    else:
        value = expfam.renyi_alpha(F, alpha, t1, t2)
    click.echo(format_value(value))


# ============ Check Commands ============

@cli.command()
@click.option("--suite", required=True, type=click.Choice([s.value for s in Suite]))
@click.option("--seed", type=int, default=None, help="Random seed (default from settings)")
@click.option("--report-dir", type=click.Path(file_okay=False), default=None, help="Save the JSON report here")
@click.pass_obj
@handle_errors
def check(settings, suite: str, seed: Optional[int], report_dir: Optional[str]):
    """Run a property suite and print pass/fail per property.

    Examples:
        breg check --suite counterexample
        breg check --suite identities --seed 7 --report-dir reports/
    """
    overrides = {}
    if seed is not None:
        overrides["seed"] = seed
    if report_dir is not None:
        overrides["report_dir"] = Path(report_dir)
    report = run_suite(Suite(suite), settings.model_copy(update=overrides))

    for result in report.results:
        status = "PASS" if result.passed else "FAIL"
        line = f"{status} {result.name}: max_deviation={result.max_deviation:.3g} cases={result.cases}"
        if result.detail:
            line += f" ({result.detail})"
        click.echo(line)

    if report.passed:
        click.echo(f"{report.suite.value}: all {len(report.results)} properties passed")
        return
    click.echo(f"{report.suite.value}: {len(report.failures)} of {len(report.results)} properties failed", err=True)
    sys.exit(ExitCode.PROPERTY_FAILURE)


if __name__ == "__main__":
    cli()
