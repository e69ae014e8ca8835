"""
Command line interface of the runTCS script.

Contains
--------
* :func:`tcsynth.cli.main`
"""
import argparse
import logging
import sys

from . import __version__
from ._exceptions import TCError, TCKeyError
from .bench import FORMATS
from .linters import LINTERS
from .runner import TCRunner

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_IO = 2


def _common(parser):
    parser.add_argument('-c', '--config', default=None,
                        help='YAML configuration file')
    parser.add_argument('-d', '--debug', action='store_true',
                        help='Debug logging')
    parser.add_argument('--fuel', type=int, default=None,
                        help='Candidate-application budget '
                        '(default TCSYNTH_FUEL or 20000)')
    parser.add_argument('--max-depth', type=int, default=None,
                        help='Maximum subgoal depth')
    parser.add_argument('--tabled', action='store_true', default=None,
                        help='Tabled resolution')
    parser.add_argument('--json', action='store_true',
                        help='Machine-readable output')


def build_parser():
    parser = argparse.ArgumentParser(
        prog='runTCS',
        description='Typeclass instance synthesis and linting for .tc files')
    parser.add_argument('--version', action='version',
                        version='%(prog)s {}'.format(__version__))
    sub = parser.add_subparsers(dest='command')
    sub.required = True

    check = sub.add_parser('check', help='Parse and build files')
    check.add_argument('files', nargs='+')
    _common(check)

    synth = sub.add_parser('synth', help='Answer #synth goals')
    synth.add_argument('files', nargs='+')
    _common(synth)

    lint = sub.add_parser('lint', help='Run linters')
    lint.add_argument('files', nargs='+')
    lint.add_argument('--linter', action='append', choices=LINTERS,
                      help='Linter to run (repeatable, default all)')
    lint.add_argument('--per-instance', action='store_true', default=None,
                      help='fails_quickly per instance binder')
    _common(lint)

    bench = sub.add_parser('bench', help='Bundled versus unbundled blowup')
    bench.add_argument('--format', choices=FORMATS, default=None)
    bench.add_argument('-o', '--results-dir', default=None,
                       help='Directory for blowup.csv and blowup.png')
    bench.add_argument('-n', '--np', type=int, default=None, dest='n_p',
                       help='Number of processes')
    bench.add_argument('--bundled', default=None,
                       help='Bundled hierarchy .tc file')
    bench.add_argument('--unbundled', default=None,
                       help='Unbundled hierarchy .tc file')
    _common(bench)
    return parser


def set_logging(debug=False):
    """Log the tcsynth package to standard error."""
    logger = logging.getLogger('tcsynth')
    handler = logging.StreamHandler(sys.stderr)
    if debug:
        fmt = '%(levelname)s:%(name)s:%(funcName)s:%(message)s'
        logger.setLevel(logging.DEBUG)
    else:
        fmt = '%(name)s:%(funcName)s:%(message)s'
        logger.setLevel(logging.WARNING)
    handler.setFormatter(logging.Formatter(fmt))
    logger.handlers = [handler]
    return logger


def _override(cfg, overrides):
    return type(cfg)(**dict(cfg._asdict(), **overrides))


def _configure(runner, args):
    overrides = {}
    if args.fuel is not None:
        overrides['fuel'] = args.fuel
    # bench --max-depth is the product nesting depth
    if args.max_depth is not None and args.command != 'bench':
        overrides['max_depth'] = args.max_depth
    if args.tabled:
        overrides['tabled'] = True
    if overrides:
        runner.synth_config = _override(runner.synth_config, overrides)
        overrides.pop('tabled', None)
        runner.lint_config = _override(runner.lint_config, overrides)


def run(args, stdout=None):
    """Run a parsed command line, returning the exit code."""
    stdout = stdout if stdout is not None else sys.stdout
    runner = TCRunner(args.config, color=stdout.isatty())
    _configure(runner, args)
    if args.command == 'check':
        code, text = runner.cmd_check(args.files)
    elif args.command == 'synth':
        code, text = runner.cmd_synth(args.files, json_output=args.json)
    elif args.command == 'lint':
        code, text = runner.cmd_lint(args.files, args.linter,
                                     args.per_instance, args.json)
    else:
        code, text = runner.cmd_bench(
            max_depth=args.max_depth,
            format='json' if args.json else args.format,
            results_dir=args.results_dir,
            n_p=args.n_p,
            bundled=args.bundled,
            unbundled=args.unbundled,
            fuel=args.fuel)
    stdout.write(text + '\n')
    return code


def main(argv=None, stdout=None):
    """
    Entry point of runTCS.

    Returns
    -------
    int
        0 on success, 1 for failed goals, findings or build errors, 2 for
        unreadable inputs or an invalid configuration.
    """
    args = build_parser().parse_args(argv)
    logger = set_logging(args.debug)
    try:
        return run(args, stdout)
    except OSError as e:
        logger.error('%s', e)
        return EXIT_IO
    except (TCKeyError, ValueError) as e:
        logger.error('invalid configuration: %s', e)
        return EXIT_IO
    except TCError as e:
        logger.error('%s', e)
        return EXIT_FAILED
