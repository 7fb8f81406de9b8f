#!/usr/bin/env python3
"""
ncerg Command-Line Interface
Run scenario files, the embedded self-test, and one-off rearrangement, norm
and averaging computations.
"""

import sys
import json
import logging
from typing import Optional, Tuple, Union

try:
    import click
except ImportError:
    print("Error: CLI requires 'click' package. Install with: pip install 'ncerg[cli]'")
    sys.exit(1)

from ncerg import __version__
from ncerg.algebra import AlgebraShape, Operator
from ncerg.averaging import AveragingMethod, average
from ncerg.config import Settings, load_settings
from ncerg.exceptions import NCERGError
from ncerg.experiments import EXPERIMENTS, allowed_params
from ncerg.literals import (
    descriptor_from_text,
    family_from_text,
    operator_from_literal,
    operator_to_literal,
    parse_literal,
    parse_number_list,
    weights_from_text,
)
from ncerg.rearrangement import StepFunction, mu as rearrangement
from ncerg.reports import jsonable
from ncerg.runner import EXIT_OK, run_scenario, selftest as run_selftest
from ncerg.spaces import standard_descriptors

LOG_LEVELS = {0: logging.WARNING, 1: logging.INFO}


def _fail(message: str) -> None:
    click.echo(click.style(f"✗ Error: {message}", fg='red', bold=True), err=True)
    sys.exit(1)


def _settings() -> Settings:
    try:
        return load_settings()
    except NCERGError as e:
        _fail(str(e))


def _element(
    diag: Optional[str],
    weights: Optional[str],
    element: Optional[str],
    shape: Optional[AlgebraShape] = None,
) -> Union[Operator, StepFunction]:
    if element and diag:
        raise click.UsageError("Use either --element or --diag, not both")
    if element:
        return parse_literal(element, shape)
    if not diag:
        raise click.UsageError("Give the element with --diag (and --weights) or --element")
    values = parse_number_list(diag)
    literal = {"diag": values}
    if weights is not None or shape is None:
        literal["weights"] = weights_from_text(weights, len(values))
    return operator_from_literal(literal, shape)


@click.group()
@click.version_option(__version__)
@click.option('-v', '--verbose', count=True, help='Log INFO with -v, DEBUG with -vv')
def cli(verbose: int):
    """ncerg - local ergodic averages on finite-dimensional von Neumann algebras"""
    logging.basicConfig(
        level=LOG_LEVELS.get(verbose, logging.DEBUG),
        format="%(levelname)s %(name)s: %(message)s",
    )


@cli.command()
@click.argument('scenario', type=click.Path(dir_okay=False))
@click.option('--out', 'out_dir', type=click.Path(file_okay=False), help='Report directory')
@click.option('--seed', type=int, help='Override the scenario seed')
@click.option('--json', 'output_json', is_flag=True, help='Print the report as JSON')
def run(scenario: str, out_dir: Optional[str], seed: Optional[int], output_json: bool):
    """
    Run a scenario file and write its report.

    EXAMPLE:
        ncerg run converge.json --out out --seed 7

    Exit codes: 0 success, 1 validation error, 2 bound check failed.
    """
    result = run_scenario(scenario, out_dir, seed, _settings())
    if result.report is None:
        click.echo(click.style(f"✗ Scenario Error: {result.error}", fg='red', bold=True), err=True)
        sys.exit(result.exit_code)

    if output_json:
        click.echo(result.report.to_json(), nl=False)
    elif result.exit_code == EXIT_OK:
        click.echo(click.style(f"✓ {result.report.experiment} finished", fg='green', bold=True))
    else:
        click.echo(click.style(f"✗ {result.report.experiment}: bound check failed", fg='red', bold=True))
    if not output_json:
        for path in result.paths:
            click.echo(f"  wrote {path}")
    sys.exit(result.exit_code)


@cli.command()
@click.option('--seed', type=int, help='Seed for the randomized criteria')
@click.option('--out', 'out_dir', type=click.Path(file_okay=False), help='Write selftest.json here')
@click.option('--json', 'output_json', is_flag=True, help='Print the report as JSON')
@click.option('--debug-quadrature-order', 'quadrature_order', type=int, hidden=True)
def selftest(seed: Optional[int], out_dir: Optional[str], output_json: bool, quadrature_order: Optional[int]):
    """
    Run the embedded acceptance suite.

    EXAMPLE:
        ncerg selftest --seed 1 --out out
    """
    result = run_selftest(seed, out_dir, quadrature_order, _settings())
    if output_json:
        click.echo(result.report.to_json(), nl=False)
    else:
        click.echo(click.style(f"Acceptance suite (seed {result.report.seed}):", bold=True))
        click.echo()
        for row in result.rows:
            mark = click.style("✓", fg='green') if row.passed else click.style("✗", fg='red')
            click.echo(f"  {mark} {row.name:<20} {row.detail}")
        click.echo()
        if result.exit_code == EXIT_OK:
            click.echo(click.style("✓ All criteria passed", fg='green', bold=True))
        else:
            failed = sum(not r.passed for r in result.rows)
            click.echo(click.style(f"✗ {failed} criteria failed", fg='red', bold=True))
    sys.exit(result.exit_code)


@cli.command()
@click.option('--diag', help='Diagonal values, comma-separated (e.g. "3,1,-2")')
@click.option('--weights', help='Atom weights, comma-separated (default: all 1)')
@click.option('--element', help='Operator or step-function literal (JSON, diag:..., step:...)')
@click.option('--t', 'ts', type=float, multiple=True, help='Sample mu at t (repeatable)')
@click.option('--json', 'output_json', is_flag=True, help='Output as JSON')
def mu(diag: Optional[str], weights: Optional[str], element: Optional[str], ts: Tuple[float, ...], output_json: bool):
    """
    Generalized singular-value function mu_t(x).

    EXAMPLE:
        ncerg mu --diag "3,1,-2" --weights "1,2,0.5"
    """
    try:
        x = _element(diag, weights, element)
        m = x if isinstance(x, StepFunction) else rearrangement(x)
        samples = [[t, float(m(t))] for t in ts]
    except NCERGError as e:
        _fail(str(e))

    if output_json:
        payload = {"mu": m.to_list(), "integral": m.integral(), "sup": m.sup, "support": m.support}
        if samples:
            payload["samples"] = samples
        click.echo(json.dumps(jsonable(payload), indent=2, sort_keys=True))
        return
    click.echo(click.style("mu(x):", bold=True))
    start = 0.0
    for end, value in m.knots:
        click.echo(f"  [{start:.6g}, {end:.6g})  {value:.12g}")
        start = end
    if m.is_zero:
        click.echo("  0 everywhere")
    for t, value in samples:
        click.echo(f"  mu_{t:g} = {value:.12g}")


@cli.command()
@click.option('--diag', help='Diagonal values, comma-separated')
@click.option('--weights', help='Atom weights, comma-separated (default: all 1)')
@click.option('--element', help='Operator or step-function literal')
@click.option('--norm', 'norms', multiple=True, help='Descriptor (e.g. lp:2, l1+linf, orlicz:power:3); repeatable')
@click.option('--json', 'output_json', is_flag=True, help='Output as JSON')
def norm(diag: Optional[str], weights: Optional[str], element: Optional[str], norms: Tuple[str, ...], output_json: bool):
    """
    Symmetric norms of an element (all built-in norms by default).

    EXAMPLE:
        ncerg norm --diag "1,-1" --norm lp:2 --norm lorentz:sqrt
    """
    try:
        x = _element(diag, weights, element)
        descriptors = [descriptor_from_text(n) for n in norms] or list(standard_descriptors().values())
        values = {d.label: d.norm(x) for d in descriptors}
    except NCERGError as e:
        _fail(str(e))

    if output_json:
        click.echo(json.dumps(jsonable(values), indent=2, sort_keys=True))
        return
    width = max(len(label) for label in values)
    for label, value in values.items():
        click.echo(f"  {click.style(label.ljust(width), fg='cyan', bold=True)}  {value:.12g}")


@cli.command(name='average')
@click.option('--family', required=True, help='Semigroup: heat_cycle:N, builtin:NAME or JSON spec')
@click.option('--diag', help='Diagonal values of x, comma-separated')
@click.option('--weights', help='Atom weights (must match the family algebra)')
@click.option('--element', help='Operator literal for x')
@click.option('--t', 't', type=float, default=1.0, show_default=True, help='Averaging time')
@click.option('--method', type=click.Choice(['phi1', 'quad']), default='phi1', show_default=True)
@click.option('--order', type=int, default=12, show_default=True, help='Quadrature order (quad only)')
@click.option('--json', 'output_json', is_flag=True, help='Output as JSON')
def average_cmd(family: str, diag: Optional[str], weights: Optional[str], element: Optional[str],
                t: float, method: str, order: int, output_json: bool):
    """
    Local ergodic average A_t(x).

    EXAMPLE:
        ncerg average --family heat_cycle:2 --diag "1,-1" --t 1
    """
    try:
        sg = family_from_text(family)
        x = _element(diag, weights, element, sg.shape)
        if isinstance(x, StepFunction):
            raise click.UsageError("average needs an operator, not a step function")
        chosen = AveragingMethod.from_spec({"method": method, "order": order})
        y = average(sg, x, t, chosen)
    except NCERGError as e:
        _fail(str(e))

    if output_json:
        click.echo(json.dumps(jsonable(operator_to_literal(y)), indent=2, sort_keys=True))
        return
    click.echo(click.style(f"A_{t:g}(x) for {sg.name} ({method}):", bold=True))
    if sg.shape.is_diagonal:
        click.echo("  diag " + ", ".join(f"{v.real:.12g}" for v in y.diagonal_values()))
    else:
        for k, block in enumerate(y.blocks):
            click.echo(f"  block {k}:")
            for row in block:
                click.echo("    " + "  ".join(f"{v.real:+.6g}{v.imag:+.6g}j" for v in row))


@cli.command()
@click.option('--search', help='Search experiments by keyword')
@click.option('--json', 'output_json', is_flag=True, help='Output as JSON')
def experiments(search: Optional[str], output_json: bool):
    """
    List the experiments a scenario can run.

    EXAMPLE:
        ncerg experiments
        ncerg experiments --search bound
    """
    items = list(EXPERIMENTS.items())

    if search:
        search_lower = search.lower()
        items = [(e, desc) for e, desc in items
                 if search_lower in e.lower() or search_lower in desc.lower()]

    if output_json:
        click.echo(json.dumps(
            {e: {"description": desc, "params": sorted(allowed_params(e))} for e, desc in items}, indent=2))
    else:
        if search:
            click.echo(click.style(f"Experiments matching '{search}':", bold=True))
        else:
            click.echo(click.style(f"ncerg Experiments ({len(items)} total):", bold=True))
        click.echo()

        for name, description in sorted(items):
            click.echo(f"  {click.style(name, fg='cyan', bold=True):10} {description}")
            click.echo(f"  {'':10} params: {', '.join(sorted(allowed_params(name)))}")

        if not items and search:
            click.echo(click.style(f"No experiments found matching '{search}'", fg='yellow'))


if __name__ == '__main__':
    cli()
