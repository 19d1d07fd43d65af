"""
``mag`` command-line interface.

Exit codes: 0 ok, 1 usage error, 2 data error (invalid MAG, ζ, manifest,
missing file, unhealthy backend), 3 internal error.
"""

import json
import sys
from pathlib import Path

import click

from centrality import CLOSENESS_MODES, DISTANCES, MEASURES, MODES, compute_centrality
from config import Config
from logging_config import log_exception, setup_logging
from mag_core import MagError, digraph_to_mag, mag_summary
from mag_io import load_mag, read_scores, write_mag_file, write_scores
from matrix_oracle import SEMIRINGS, reachability_report
from ranking import TIE_RULES, depth_for, persistence_for, rbo, to_ranking, top_k_table
from subdet import aggregate_mag

logger = setup_logging('magcent')


class MagGroup(click.Group):
    """Click group that maps failures onto the documented exit codes."""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            rv = super().main(args=args, prog_name=prog_name, complete_var=complete_var,
                              standalone_mode=False, **extra)
            code = rv if isinstance(rv, int) else 0
        except click.UsageError as e:
            e.show()
            code = 1
        except click.ClickException as e:
            e.show()
            code = 1
        except click.Abort:
            click.echo("Aborted!", err=True)
            code = 1
        except (MagError, OSError) as e:
            click.echo(f"Error: {e}", err=True)
            code = 2
        except Exception as e:
            log_exception(logger, e, "Internal error")
            click.echo(f"Internal error: {e}", err=True)
            code = 3
        if standalone_mode:
            sys.exit(code)
        return code


def _zeta_arg(text):
    """``--zeta`` accepts ``1,0,0`` or the integer form."""
    if text is None:
        return None
    text = text.strip()
    return int(text) if text.isdigit() else text


def _sink(output):
    return open(output, 'w', encoding='utf-8', newline='') if output else None


dedup_option = click.option('--dedup', is_flag=True, help='Merge repeated edges instead of rejecting them.')


@click.group(cls=MagGroup)
def cli():
    """Centrality on MultiAspect Graphs, with and without spurious paths."""


@cli.command()
@click.option('--input', 'input_path', required=True, type=click.Path(dir_okay=False),
              help='MAG file.')
@dedup_option
def info(input_path, dedup):
    """Aspects, sizes and edge count of a MAG."""
    summary = mag_summary(load_mag(input_path, dedup=dedup))
    for key, value in summary.items():
        if isinstance(value, list):
            value = ', '.join(value)
        elif isinstance(value, float):
            value = f"{value:.6g}"
        click.echo(f"{key + ':':<12}{value}")


@cli.command()
@click.option('--input', 'input_path', required=True, type=click.Path(dir_okay=False))
@dedup_option
def validate(input_path, dedup):
    """Parse a MAG file and report the first error, if any."""
    mag = load_mag(input_path, dedup=dedup)
    click.echo(f"OK: p={mag.p} n={mag.n} m={mag.m}")


@cli.command()
@click.option('--input', 'input_path', required=True, type=click.Path(dir_okay=False))
@click.option('--measure', type=click.Choice(MEASURES), default='betweenness', show_default=True)
@click.option('--mode', type=click.Choice(MODES), default='composite', show_default=True)
@click.option('--zeta', default=None, help='Sub-determination, e.g. 1,0 (required unless --mode composite).')
@click.option('--distance', type=click.Choice(DISTANCES), default=None,
              help=f'Sub-determined distance (default {Config.DISTANCE_MODE}).')
@click.option('--closeness', type=click.Choice(CLOSENESS_MODES), default=None,
              help=f'Closeness formula (default {Config.CLOSENESS_MODE}).')
@click.option('--output', type=click.Path(dir_okay=False), default=None, help='CSV file (default stdout).')
@click.option('--progress', is_flag=True, help='Show a progress bar for betweenness.')
@dedup_option
def centrality(input_path, measure, mode, zeta, distance, closeness, output, progress, dedup):
    """Betweenness, closeness or path statistics of a MAG."""
    mag = load_mag(input_path, dedup=dedup)
    result = compute_centrality(mag, measure, mode, _zeta_arg(zeta), distance=distance,
                                closeness=closeness, progress=progress)
    if measure == 'pathstats':
        text = json.dumps(result, indent=2)
        if output:
            Path(output).write_text(text + '\n', encoding='utf-8')
        else:
            click.echo(text)
        return
    sink = _sink(output)
    try:
        write_scores(result, sink or sys.stdout)
    finally:
        if sink:
            sink.close()


@cli.command()
@click.option('--input', 'input_path', required=True, type=click.Path(dir_okay=False))
@click.option('--zeta', required=True, help='Sub-determination, e.g. 1,0.')
@click.option('--output', type=click.Path(dir_okay=False), default=None, help='MAG file (default stdout).')
@dedup_option
def aggregate(input_path, zeta, output, dedup):
    """Write the simplified aggregated MAG over the kept aspects."""
    mag = load_mag(input_path, dedup=dedup)
    aggregated = digraph_to_mag(aggregate_mag(mag, _zeta_arg(zeta)))
    comment = f"aggregate of {Path(input_path).name} zeta={zeta}"
    sink = _sink(output)
    try:
        write_mag_file(aggregated, sink or sys.stdout, comment=comment)
    finally:
        if sink:
            sink.close()


@cli.command()
@click.option('--aspects', required=True, help='Aspect sizes, e.g. 1000,10.')
@click.option('--edges', 'edge_count', required=True, type=int, help='Exact number of edges.')
@click.option('--seed', default=0, type=int, show_default=True)
@click.option('--reciprocal', is_flag=True, help='Draw unordered pairs and add both directions.')
@click.option('--output', type=click.Path(dir_okay=False), default=None, help='MAG file (default stdout).')
def generate(aspects, edge_count, seed, reciprocal, output):
    """Seeded G(n, m) random MAG."""
    from generate import GenSpec, random_mag

    spec = GenSpec(GenSpec.parse_sizes(aspects), edge_count, seed=seed, reciprocal=reciprocal)
    mag = random_mag(spec)
    comment = f"random MAG sizes={aspects} m={edge_count} seed={seed}" + (" reciprocal" if reciprocal else "")
    sink = _sink(output)
    try:
        write_mag_file(mag, sink or sys.stdout, comment=comment)
    finally:
        if sink:
            sink.close()


@cli.command()
@click.argument('first', type=click.Path(dir_okay=False))
@click.argument('second', type=click.Path(dir_okay=False))
@click.option('--rbo-weight', default=Config.RBO_WEIGHT, type=float, show_default=True,
              help='Share of the RBO weight on the top positions.')
@click.option('--rbo-depth', default=Config.RBO_DEPTH, type=float, show_default=True,
              help='Fraction of the ranking that carries --rbo-weight.')
@click.option('--truncate', default=None, type=click.IntRange(min=1), help='Compare only the top k positions.')
@click.option('--ties', type=click.Choice(TIE_RULES), default='identifier', show_default=True)
@click.option('--top', default=0, type=click.IntRange(min=0), help='Print the top-k position table.')
def compare(first, second, rbo_weight, rbo_depth, truncate, ties, top):
    """RBO and RBD between two score files."""
    a_scores, b_scores = read_scores(first), read_scores(second)
    a = to_ranking(a_scores, ties, items=a_scores.labels())
    b = to_ranking(b_scores, ties, items=b_scores.labels())
    length = len(a)
    p = persistence_for(length, rbo_weight, rbo_depth)
    similarity = rbo(a, b, p, truncate=truncate)
    click.echo(f"items:       {length}")
    click.echo(f"depth:       {depth_for(rbo_depth, length)}")
    click.echo(f"persistence: {p:.10f}")
    click.echo(f"RBO:         {similarity:.12g}")
    click.echo(f"RBD:         {1.0 - similarity:.12g}")
    if top:
        click.echo()
        click.echo(top_k_table(a, b, top).to_string(index=False))


@cli.command()
@click.option('--input', 'input_path', required=True, type=click.Path(dir_okay=False))
@click.option('--zeta', required=True, help='Sub-determination, e.g. 1,0.')
@click.option('--check', type=click.Choice(['reachability']), default='reachability', show_default=True)
@click.option('--semiring', type=click.Choice(SEMIRINGS), default='boolean', show_default=True)
@dedup_option
def oracle(input_path, zeta, check, semiring, dedup):
    """Aggregate-first versus close-first reachability patterns."""
    mag = load_mag(input_path, dedup=dedup)
    report = reachability_report(mag, _zeta_arg(zeta), semiring=semiring)

    def pairs(name):
        items = report[name]
        click.echo(f"{name} ({len(items)}):")
        for u, v in items:
            click.echo(f"  {u} -> {v}")

    click.echo(f"check: {check}  zeta: {report['zeta']}  semiring: {semiring}")
    pairs('sub_first')
    pairs('bfs_first')
    pairs('spurious')


@cli.command()
@click.option('--manifest', 'manifest_path', required=True, type=click.Path(dir_okay=False),
              help='JSON experiment manifest.')
@click.option('--backend', type=click.Choice(['local', 'celery']), default='local', show_default=True)
@click.option('--progress/--no-progress', default=True, help='Progress bar for the local backend.')
def experiment(manifest_path, backend, progress):
    """Ensemble of naive versus sub-determined rankings, compared with RBO/RBD."""
    from experiment import ExperimentManifest, run_experiment

    manifest = ExperimentManifest.from_json(manifest_path)
    report = run_experiment(manifest, backend=backend, progress=progress)
    click.echo(report.summary.to_string(index=False))
    click.echo(f"Results written to {report.output_dir}")


@cli.command()
def config():
    """Print the effective configuration."""
    Config.print_config()


@cli.command()
def health():
    """Check the Redis broker and the Celery workers."""
    from health import health_check

    result = health_check()
    click.echo(json.dumps(result, indent=2))
    if result['status'] != 'healthy':
        raise MagError("Experiment backend is unhealthy")


if __name__ == '__main__':
    cli()
