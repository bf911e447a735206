"""
Command line surface: invsim match | validate | stats | gen | dual | convert-blogcatalog

Reports go to stdout, diagnostics and progress to stderr. Exit codes: 0 success, 1 usage or configuration error,
2 input parse or validation error, 3 internal invariant violation.
"""
import json
import logging
import sys
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import click
import typer

try:  # typer >= 0.22 vendors its own click; catch the exceptions typer actually raises
    from typer._click import exceptions as click_exceptions
except ImportError:
    click_exceptions = click.exceptions

from InvestigativeSearchTools.exceptions import ConfigError, InvariantViolation, InvSimError
from InvestigativeSearchTools.graph import VALIDATION_MODES, validate_query
from InvestigativeSearchTools.graph_data import create_analysis
from InvestigativeSearchTools.log_utils import setup_logger
from InvestigativeSearchTools.Matching.inv_sim import DEFAULT_HOP_BOUND
from InvestigativeSearchTools.Matching.ranking import REPORT_FORMATS, RANK_KEYS
from InvestigativeSearchTools.Utils import graph_io
from InvestigativeSearchTools.Utils.blogcatalog import convert_blogcatalog
from InvestigativeSearchTools.Utils.generator import load_gen_spec, write_generated

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_INVARIANT = 3

app = typer.Typer(add_completion=False, no_args_is_help=True,
                  help='Investigative graph pattern matching: partial matches of a query pattern, ranked per person.')


@dataclass
class RunConfig(object):
    """Validated settings of one command execution."""
    command: str
    paths: dict = field(default_factory=dict)
    top_k: int = 20
    hop_bound: int = DEFAULT_HOP_BOUND
    output_format: str = 'json'
    oracle: bool = False
    threads: int = -1
    rank_by: str = 'size'
    cache_dir: Optional[str] = None
    log_dir: Optional[str] = None
    verbose: int = 0

    def __post_init__(self):
        if self.top_k < 1:
            raise ConfigError('--top-k must be >= 1, got %d' % self.top_k)
        if self.hop_bound < 1:
            raise ConfigError('--hops must be >= 1, got %d' % self.hop_bound)
        if self.threads == 0:
            raise ConfigError('--threads must be a positive count or negative (joblib convention), got 0')
        if self.output_format not in REPORT_FORMATS:
            raise ConfigError('unknown format %r (allowed: %s)' % (self.output_format, ', '.join(REPORT_FORMATS)))
        if self.rank_by not in RANK_KEYS:
            raise ConfigError('unknown rank key %r (allowed: %s)' % (self.rank_by, ', '.join(RANK_KEYS)))

    @property
    def log_level(self):
        if self.verbose >= 2:
            return logging.DEBUG
        return logging.INFO if self.verbose == 1 else logging.WARNING


def exit_code_for(e):
    if isinstance(e, InvariantViolation):
        return EXIT_INVARIANT
    if isinstance(e, ConfigError):
        return EXIT_USAGE
    return EXIT_INPUT


@contextmanager
def _handle_errors():
    """Renders domain and I/O errors on stderr and turns them into the matching exit code."""
    try:
        yield
    except InvSimError as e:
        typer.echo('error: %s' % e, err=True)
        raise typer.Exit(exit_code_for(e))
    except (OSError, UnicodeError) as e:
        typer.echo('error: %s' % e, err=True)
        raise typer.Exit(EXIT_INPUT)


def _setup(cfg):
    setup_logger(fname='invsim_' + cfg.command.replace('-', '_'), log_dir=cfg.log_dir, level=cfg.log_level)
    log.debug('%s', cfg)


def _echo_bytes(payload):
    typer.echo(payload.decode('utf-8'), nl=False)


VERBOSE_OPTION = typer.Option(0, '-v', '--verbose', count=True, help='-v for info, -vv for debug logging on stderr.')
LOG_DIR_OPTION = typer.Option(None, '--log-dir', help='Also write a timestamped log file here.')
NODES_OPTION = typer.Option(..., '--graph-nodes', help='Node TSV: id<TAB>label')
EDGES_OPTION = typer.Option(..., '--graph-edges', help='Edge TSV: src<TAB>dst[<TAB>label]')
QUERY_OPTION = typer.Option(..., '--query', help='Query JSON.')
HOPS_OPTION = typer.Option(DEFAULT_HOP_BOUND, '--hops', help='Relevant set depth.')
CACHE_OPTION = typer.Option(None, '--cache-dir', help='Cache parsed graphs and results here with joblib.')


@app.command('match')
def cmd_match(graph_nodes: Path = NODES_OPTION,
              graph_edges: Path = EDGES_OPTION,
              query: Path = QUERY_OPTION,
              top_k: int = typer.Option(20, '--top-k', help='Number of persons reported.'),
              hops: int = HOPS_OPTION,
              output_format: str = typer.Option('json', '--format', help='json or tsv'),
              oracle: bool = typer.Option(False, '--oracle', help='Cross-check with the exhaustive search.'),
              threads: int = typer.Option(-1, '--threads', help='Workers, -1 for all cores.'),
              rank_by: str = typer.Option('size', '--rank-by', help='size or jaccard'),
              progress: bool = typer.Option(False, '--progress', help='Progress bars on stderr.'),
              cache_dir: Optional[Path] = CACHE_OPTION,
              log_dir: Optional[Path] = LOG_DIR_OPTION,
              verbose: int = VERBOSE_OPTION):
    """Run investigative simulation and print the ranked report."""
    with _handle_errors():
        cfg = RunConfig(command='match',
                        paths={'nodes': str(graph_nodes), 'edges': str(graph_edges), 'query': str(query)},
                        top_k=top_k, hop_bound=hops, output_format=output_format, oracle=oracle, threads=threads,
                        rank_by=rank_by, cache_dir=None if cache_dir is None else str(cache_dir),
                        log_dir=None if log_dir is None else str(log_dir), verbose=verbose)
        _setup(cfg)

        ana = create_analysis('InvestigativeMatchAnalysis',
                              nodes_path=cfg.paths['nodes'], edges_path=cfg.paths['edges'],
                              query_path=cfg.paths['query'], hop_bound=cfg.hop_bound, n_jobs=cfg.threads,
                              top_k=cfg.top_k, rank_by=cfg.rank_by, output_format=cfg.output_format,
                              run_oracle=cfg.oracle, progress=progress)
        if cfg.cache_dir is not None:
            ana.cache_dir = cfg.cache_dir
            ana.res_save_dir = cfg.cache_dir
            ana.load_res_if_file_exists = True
            ana.save_res = True
        res = ana.run()

        _echo_bytes(res['report'])
        if cfg.oracle:
            typer.echo('agreement: %s (%d anchors)' % (res['oracle']['agreement'], res['oracle']['anchors']),
                       err=True)


@app.command('validate')
def cmd_validate(query: Path = QUERY_OPTION,
                 mode: str = typer.Option('investigative', '--mode', help='investigative or dual'),
                 hops: int = HOPS_OPTION,
                 log_dir: Optional[Path] = LOG_DIR_OPTION,
                 verbose: int = VERBOSE_OPTION):
    """Check a query and print the validation report. Exits 2 if it has violations."""
    with _handle_errors():
        cfg = RunConfig(command='validate', paths={'query': str(query)}, hop_bound=hops,
                        log_dir=None if log_dir is None else str(log_dir), verbose=verbose)
        _setup(cfg)
        if mode not in VALIDATION_MODES:
            raise ConfigError('unknown mode %r (allowed: %s)' % (mode, ', '.join(VALIDATION_MODES)))
        report = validate_query(graph_io.load_query(cfg.paths['query']), mode, cfg.hop_bound)
        typer.echo(report.render())
    if not report.ok:
        raise typer.Exit(EXIT_INPUT)


@app.command('stats')
def cmd_stats(graph_nodes: Path = NODES_OPTION,
              graph_edges: Path = EDGES_OPTION,
              kinds: Optional[str] = typer.Option(None, '--kinds',
                                                  help='Comma separated labels to keep; the rest are collapsed.'),
              other_kind: str = typer.Option('other', '--other-kind', help='Name of the collapsed labels.'),
              log_dir: Optional[Path] = LOG_DIR_OPTION,
              verbose: int = VERBOSE_OPTION):
    """Print node and edge counts per label as a table followed by JSON."""
    with _handle_errors():
        cfg = RunConfig(command='stats', paths={'nodes': str(graph_nodes), 'edges': str(graph_edges)},
                        log_dir=None if log_dir is None else str(log_dir), verbose=verbose)
        _setup(cfg)
        g = graph_io.load_graph(cfg.paths['nodes'], cfg.paths['edges'])
        kind_list = None if kinds is None else [k.strip() for k in kinds.split(',') if k.strip()]
        stats = graph_io.compute_stats(g, kinds=kind_list, other_kind=other_kind)
        typer.echo(graph_io.render_stats(stats))
        typer.echo(json.dumps(graph_io.stats_to_dict(stats), indent=2, sort_keys=True))


@app.command('gen')
def cmd_gen(spec: Path = typer.Option(..., '--spec', help='Generator spec JSON.'),
            out_dir: Path = typer.Option(..., '--out-dir', help='Where nodes.tsv, edges.tsv and truth.json go.'),
            log_dir: Optional[Path] = LOG_DIR_OPTION,
            verbose: int = VERBOSE_OPTION):
    """Generate a synthetic graph with planted matches."""
    with _handle_errors():
        cfg = RunConfig(command='gen', paths={'spec': str(spec), 'out_dir': str(out_dir)},
                        log_dir=None if log_dir is None else str(log_dir), verbose=verbose)
        _setup(cfg)
        paths = write_generated(load_gen_spec(cfg.paths['spec']), cfg.paths['out_dir'])
        for name in sorted(paths):
            typer.echo('wrote %s' % paths[name], err=True)


@app.command('dual')
def cmd_dual(graph_nodes: Path = NODES_OPTION,
             graph_edges: Path = EDGES_OPTION,
             query: Path = QUERY_OPTION,
             cache_dir: Optional[Path] = CACHE_OPTION,
             log_dir: Optional[Path] = LOG_DIR_OPTION,
             verbose: int = VERBOSE_OPTION):
    """Print the maximum dual simulation relation, query node -> data nodes."""
    with _handle_errors():
        cfg = RunConfig(command='dual',
                        paths={'nodes': str(graph_nodes), 'edges': str(graph_edges), 'query': str(query)},
                        cache_dir=None if cache_dir is None else str(cache_dir),
                        log_dir=None if log_dir is None else str(log_dir), verbose=verbose)
        _setup(cfg)
        ana = create_analysis('DualSimAnalysis', nodes_path=cfg.paths['nodes'], edges_path=cfg.paths['edges'],
                              query_path=cfg.paths['query'])
        ana.cache_dir = cfg.cache_dir
        _echo_bytes(ana.run()['report'])


@app.command('convert-blogcatalog')
def cmd_convert_blogcatalog(raw_dir: Path = typer.Option(..., '--raw-dir', help='Directory with the relation files.'),
                            out_dir: Path = typer.Option(..., '--out-dir', help='Where nodes.tsv and edges.tsv go.'),
                            sep: str = typer.Option('\t', '--sep', help='Field separator of the raw files.'),
                            log_dir: Optional[Path] = LOG_DIR_OPTION,
                            verbose: int = VERBOSE_OPTION):
    """Convert the raw BlogCatalog relations into node and edge TSVs."""
    with _handle_errors():
        cfg = RunConfig(command='convert-blogcatalog', paths={'raw_dir': str(raw_dir), 'out_dir': str(out_dir)},
                        log_dir=None if log_dir is None else str(log_dir), verbose=verbose)
        _setup(cfg)
        out = convert_blogcatalog(cfg.paths['raw_dir'], cfg.paths['out_dir'], sep=sep)
        typer.echo('wrote %d nodes to %s and %d edges to %s'
                   % (out['num_nodes'], out['nodes'], out['num_edges'], out['edges']), err=True)


def main(argv=None):
    """Entry point. Returns the exit code instead of calling sys.exit when argv is given."""
    command = typer.main.get_command(app)
    args = sys.argv[1:] if argv is None else list(argv)
    try:
        code = command.main(args=args, prog_name='invsim', standalone_mode=False)
    except click_exceptions.ClickException as e:
        e.show()
        code = EXIT_USAGE
    except click_exceptions.Abort:
        typer.echo('aborted', err=True)
        code = EXIT_USAGE
    code = EXIT_OK if not isinstance(code, int) else code
    if argv is None:
        sys.exit(code)
    return code


if __name__ == '__main__':
    main()
