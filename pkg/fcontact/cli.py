"""Command-line interface; every report is one JSON object per line on standard output."""
import functools
import json

import click

from .deformations import RotationMatrix
from .exceptions import CatalogError, ConfigError, ConvergenceError, FContactError, ParseError
from .fcontact import FContact
from .config import parse_rows
from .fields import OneForm
from .mapping_torus import AutomorphismMap, sliced_chart
from .pipeline import to_json_line
from .structures import Level

CATALOG_PREFIX = 'catalog:'

_LEVELS = click.Choice(['none', 'metric-f', 'f-contact', 'f-K-contact', 'S'])


def _emit(record):
    click.echo(to_json_line(record))


def _handle_errors(command):
    """Exit 2 on bad input, 1 on any other library error."""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except (ConfigError, ParseError, CatalogError) as e:
            click.echo(f"Error: {e}", err=True)
            raise SystemExit(2)
        except FContactError as e:
            click.echo(f"Error: {e}", err=True)
            raise SystemExit(1)
    return wrapper


def _params(pairs):
    params = {}
    for pair in pairs:
        key, separator, value = pair.partition('=')
        if not separator:
            raise ConfigError(f"--param expects key=value, got {pair!r}")
        try:
            params[key.strip()] = int(value)
        except ValueError:
            raise ConfigError(f"--param {key} must be an integer, got {value!r}") from None
    return params


def _json_option(text, name):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"--{name}: line {e.lineno}, column {e.colno}: {e.msg}") from None


def _load(client, source, params):
    """(structure, catalog item or None) for a JSON path or `catalog:NAME`."""
    if source.startswith(CATALOG_PREFIX):
        item = client.catalog_get(source[len(CATALOG_PREFIX):], **_params(params))
        return item.structure, item
    if params:
        raise ConfigError("--param only applies to catalog sources")
    return client.structure_load(source), None


def _finish(passed):
    if not passed:
        raise SystemExit(1)


def _verified(client, structure, level, **extra):
    report = client.structure_verify(structure, Level.parse(level))
    _emit({**extra, 'structure': structure.label, 'dim': structure.dim, 's': structure.s,
           **report.to_dict()})
    return report.passed


source_argument = click.argument('source')
param_option = click.option('--param', 'params', multiple=True, metavar='KEY=VALUE',
                            help='Catalog parameter, e.g. --param n=2 (repeatable).')
level_option = click.option('--level', default='S', show_default=True, type=_LEVELS,
                            help='Verification level to check.')


@click.group()
@click.option('--samples', type=click.IntRange(min=1), default=None,
              help='Number of sample points (default 64, or $FCONTACT_SAMPLES).')
@click.option('--seed', type=int, default=None, help='Sampling seed (default 42, or $FCONTACT_SEED).')
@click.option('--tol', type=float, default=None,
              help='Verification tolerance (default 1e-9, or $FCONTACT_TOLERANCE).')
@click.option('--fd-check', is_flag=True, default=False,
              help='Cross-check every derivative against central differences.')
@click.pass_context
def cli(ctx, samples, seed, tol, fd_check):
    """Verify and deform metric f-contact structures."""
    ctx.obj = {'samples': samples, 'seed': seed, 'tol': tol, 'fd_check': fd_check}


def _client(ctx):
    return FContact(**ctx.obj)


@cli.command('verify')
@source_argument
@param_option
@level_option
@click.pass_context
@_handle_errors
def verify_command(ctx, source, params, level):
    """Check the axioms of SOURCE (a structure JSON file or catalog:NAME)."""
    client = _client(ctx)
    structure, _ = _load(client, source, params)
    _finish(_verified(client, structure, level, op='verify'))


@cli.command('deform')
@source_argument
@param_option
@click.option('--kind', required=True, type=click.Choice(['rotate', 'antirotate', 'type2']))
@click.option('--matrix', default=None, help='JSON s x s orthogonal matrix for (anti-)rotations.')
@click.option('--theta', default=None,
              help='JSON list of s one-forms, each a list of component expressions (type2). '
                   'For catalog sources "default" selects the built-in horizontal family.')
@level_option
@click.pass_context
@_handle_errors
def deform_command(ctx, source, params, kind, matrix, theta, level):
    """Deform SOURCE and verify the result."""
    client = _client(ctx)
    structure, item = _load(client, source, params)
    if kind in ('rotate', 'antirotate'):
        if matrix is None:
            raise ConfigError(f"--matrix is required for {kind}")
        A = RotationMatrix(_json_option(matrix, 'matrix'))
        deformed = client.deform_rotate(structure, A) if kind == 'rotate' else client.deform_antirotate(structure, A)
    else:
        if theta is None:
            raise ConfigError("--theta is required for type2")
        if theta == 'default' and item is not None:
            thetas = item.thetas()
        else:
            rows = _json_option(theta, 'theta')
            N = structure.dim
            if (not isinstance(rows, list) or len(rows) != structure.s
                    or any(not isinstance(row, list) or len(row) != N for row in rows)):
                raise ConfigError(f"--theta must list {structure.s} one-forms of {N} components")
            thetas = [OneForm.from_exprs(structure.chart, row, label=f"theta{i + 1}")
                      for i, row in enumerate(parse_rows(rows, structure.chart, {}, 'theta'))]
        deformed = client.deform_type2(structure, thetas)
    _finish(_verified(client, deformed, level, op=kind))


@cli.command('lift')
@source_argument
@param_option
@level_option
@click.pass_context
@_handle_errors
def lift_command(ctx, source, params, level):
    """Lift SOURCE to the product with a line and verify the lifted structure."""
    client = _client(ctx)
    structure, _ = _load(client, source, params)
    lifted = client.torus_lift(structure)
    _finish(_verified(client, lifted, level, op='lift', coords=list(lifted.chart.coord_names)))


@cli.command('slice')
@source_argument
@param_option
@level_option
@click.pass_context
@_handle_errors
def slice_command(ctx, source, params, level):
    """Restrict a lifted SOURCE to t = 0 and verify the slice."""
    client = _client(ctx)
    structure, _ = _load(client, source, params)
    sliced = client.torus_slice(structure)
    _finish(_verified(client, sliced, level, op='slice', coords=list(sliced.chart.coord_names)))


@cli.command('check-deck')
@source_argument
@param_option
@click.option('--map', 'map_', default=None, help='JSON list of component expressions of phi on SOURCE.')
@click.option('--inverse', default=None, help='JSON list of component expressions of phi^-1.')
@click.option('--automorphism', default=None, help='Label of a catalog automorphism of SOURCE.')
@click.option('--t0', type=float, required=True, help='Translation along t.')
@click.option('--lifted', is_flag=True, default=False, help='SOURCE is already lifted; phi acts on its base.')
@click.pass_context
@_handle_errors
def check_deck_command(ctx, source, params, map_, inverse, automorphism, t0, lifted):
    """Check invariance of the lift of SOURCE under (p, t) -> (phi(p), t + t0)."""
    client = _client(ctx)
    structure, item = _load(client, source, params)
    base_chart = sliced_chart(structure.chart) if lifted else structure.chart
    if automorphism is not None:
        if item is None:
            raise ConfigError("--automorphism needs a catalog source")
        if lifted:
            raise ConfigError("--automorphism names a map of SOURCE itself; use --map with --lifted")
        phi = item.automorphism(automorphism)
    elif map_ is not None:
        texts = _json_option(map_, 'map')
        inverse_texts = _json_option(inverse, 'inverse') if inverse is not None else None
        phi = AutomorphismMap.parse(base_chart, texts, inverse_texts)
    else:
        raise ConfigError("Either --map or --automorphism is required")
    total = structure if lifted else client.torus_lift(structure)
    report = client.torus_check_deck(total, phi, t0)
    _emit({'op': 'check-deck', 't0': t0, **report.to_dict()})
    _finish(report.passed)


@cli.command('search-rotation')
@click.option('--s', 's', type=click.IntRange(min=2), required=True, help='Size of the orthogonal matrix.')
@click.option('--target', required=True, help='Comma-separated target coordinates summing to zero.')
@click.pass_context
@_handle_errors
def search_rotation_command(ctx, s, target):
    """Find A in O(s) with h(A) = TARGET."""
    try:
        u = [float(x) for x in target.split(',')]
    except ValueError:
        raise ConfigError(f"--target must be a comma-separated list of numbers, got {target!r}") from None
    client = _client(ctx)
    try:
        solution = client.rotation_search(u, s=s)
    except ConvergenceError as e:
        _emit({'op': 'search-rotation', 'target': u, 'error': str(e), 'best_residual': e.best_residual,
               'passed': False})
        raise SystemExit(1)
    _emit({'op': 'search-rotation', 'target': u, **solution.to_dict(), 'passed': True})


@cli.group('catalog')
def catalog_group():
    """Built-in example structures."""


@catalog_group.command('list')
@click.pass_context
@_handle_errors
def catalog_list_command(ctx):
    for entry in _client(ctx.find_root()).catalog_list():
        _emit(entry)


@catalog_group.command('show')
@click.argument('name')
@param_option
@click.pass_context
@_handle_errors
def catalog_show_command(ctx, name, params):
    _emit(_client(ctx.find_root()).catalog_show(name, **_params(params)))


@cli.command('run')
@click.argument('pipeline', type=click.Path(dir_okay=False))
@click.pass_context
@_handle_errors
def run_command(ctx, pipeline):
    """Run the steps of PIPELINE (a JSON file), one report line per step."""
    records, passed = _client(ctx).pipeline_run(pipeline)
    for record in records:
        _emit(record)
    _finish(passed)


if __name__ == '__main__':
    cli()
