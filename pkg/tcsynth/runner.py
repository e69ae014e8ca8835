"""
Runner module.

The module contains the classes reading the configuration and running
the ``check``, ``synth``, ``lint`` and ``bench`` commands over ``.tc``
files.

Contains
--------
* :class:`tcsynth.runner.ReadConfiguration`
* :class:`tcsynth.runner.TCRunner`
"""
import json
import os

from autologging import logged
from termcolor import colored

from ._exceptions import TCError, TCKeyError, TCSynthFailure
from .bench import (BENCH_DEPTH, BENCH_FUEL, FORMATS, emit_report,
                    load_bench_environments, plot_blowup, rows_to_frame,
                    run_blowup)
from .corpus import read_source, read_yaml
from .hierarchy import EnvironmentBuilder
from .linters import ERROR, LINTERS, findings_to_json, lint_environment
from .synth import SynthConfig, make_local_instances, synthesize
from .terms import render

FUEL_VARIABLE = 'TCSYNTH_FUEL'


def default_fuel(environ=None):
    """Fuel from the TCSYNTH_FUEL variable, 20000 when unset."""
    environ = os.environ if environ is None else environ
    value = environ.get(FUEL_VARIABLE)
    if not value:
        return SynthConfig().fuel
    try:
        return int(value)
    except ValueError:
        raise ValueError('{} must be an integer, got {!r}'.format(
            FUEL_VARIABLE, value))


@logged
class ReadConfiguration(object):
    """Read configuration file for tcsynth."""

    def __init__(self, yml=None):
        """
        Init configuration.

        Parameters
        ----------
        yml: str, dict, optional
            Input dict or yaml file with the ``synth``, ``lint`` and
            ``bench`` sections. Missing sections take the defaults.
        """
        if yml is None:
            yml_input = {}
        elif isinstance(yml, str):
            yml_input = read_yaml(yml) or {}
        elif isinstance(yml, dict):
            yml_input = yml
        else:
            raise ValueError('Define yml as file name or dictionary')

        synth = yml_input.get('synth') or {}
        defaults = SynthConfig(fuel=default_fuel())
        self.synth_config = SynthConfig(
            fuel=synth.get('fuel', defaults.fuel),
            max_depth=synth.get('max_depth', defaults.max_depth),
            tabled=synth.get('tabled', defaults.tabled))

        lint = yml_input.get('lint') or {}
        self.linters = tuple(lint.get('linters', LINTERS))
        for name in self.linters:
            if name not in LINTERS:
                raise TCKeyError('unknown linter {}'.format(name))
        self.lint_config = SynthConfig(
            fuel=lint.get('fuel', self.synth_config.fuel),
            max_depth=lint.get('max_depth', self.synth_config.max_depth),
            tabled=lint.get('tabled', False))
        self.per_instance = bool(lint.get('per_instance', False))

        bench = yml_input.get('bench') or {}
        self.bench = {
            'max_depth': bench.get('max_depth', BENCH_DEPTH),
            'fuel': bench.get('fuel', BENCH_FUEL),
            'format': bench.get('format', 'table'),
            'bundled': bench.get('bundled'),
            'unbundled': bench.get('unbundled'),
            'n_p': bench.get('n_p', 1)
        }
        if self.bench['format'] not in FORMATS:
            raise TCKeyError('unknown bench format {}'.format(
                self.bench['format']))
        self.__log.debug('Synth %s, lint %s', self.synth_config,
                         self.lint_config)


@logged
class TCRunner(ReadConfiguration):
    """
    tcsynth runner.

    Every command returns ``(exit_code, text)``: 0 on success, 1 for
    build errors, failed goals or error findings. Unreadable files raise
    :class:`OSError`.

    Parameters
    ----------
    yml: str, dict, optional
        Configuration, see :class:`ReadConfiguration`
    color: bool, default=False
        Colour verdicts with termcolor
    """

    def __init__(self, yml=None, color=False):
        super(TCRunner, self).__init__(yml)
        self.color = color

    def _paint(self, text, ok):
        if not self.color:
            return text
        return colored(text, 'green' if ok else 'red')

    @staticmethod
    def _check_paths(files):
        for path in files:
            if not os.path.isfile(path):
                raise OSError('cannot read {}'.format(path))

    @staticmethod
    def _error(path, e):
        if e.line is None:
            return '{}: {}'.format(path, e)
        if hasattr(e, 'col'):
            return '{}:{}'.format(path, e)
        return '{}:{}: {}'.format(path, e.line, e)

    def build(self, files):
        """
        Parse and build files into one environment.

        Returns
        -------
        env: Environment
        goals: list
        lines: list
            Per-file status
        failed: bool
        """
        self._check_paths(files)
        builder = EnvironmentBuilder()
        lines, failed = [], False
        for path in files:
            if failed:
                lines.append('{}: skipped'.format(path))
                continue
            try:
                source = read_source(path)
                builder.add_file(source)
            except TCError as e:
                self.__log.info('Build of %s failed: %s', path, e)
                lines.append(self._paint(self._error(path, e), False))
                failed = True
                continue
            lines.append('{}: {} ({} commands)'.format(
                path, self._paint('ok', True), len(source.commands)))
        env, goals = builder.build()
        return env, goals, lines, failed

    def cmd_check(self, files):
        """Parse and build files, one status line per file."""
        _, _, lines, failed = self.build(files)
        return int(failed), '\n'.join(lines)

    def solve_goals(self, env, goals, cfg=None):
        """
        Synthesize every goal.

        Returns
        -------
        list
            One dict per goal with goal, file, line, block, verdict, term
            and stats.
        """
        cfg = cfg if cfg is not None else self.synth_config
        rows = []
        for entry in goals:
            row = {
                'goal': render(entry.goal),
                'file': entry.path,
                'line': entry.line,
                'block': entry.block
            }
            try:
                locals = None
                if entry.locals:
                    locals = make_local_instances(entry.locals, env, cfg)
                r = synthesize(entry.goal, env, locals, cfg)
            except TCSynthFailure as e:
                row.update(verdict=e.verdict, term=None,
                           stats=e.stats.as_dict() if e.stats else None)
            else:
                row.update(verdict='found', term=render(r.term),
                           stats=r.stats.as_dict())
            self.__log.info('#synth %s: %s', row['goal'], row['verdict'])
            rows.append(row)
        return rows

    def _format_goal(self, row):
        applied = row['stats']['applied'] if row['stats'] else 0
        if row['verdict'] == 'found':
            text = 'found {}'.format(row['term'])
        else:
            text = row['verdict']
        return '#synth {}: {} (applied={})'.format(
            row['goal'], self._paint(text, row['verdict'] == 'found'),
            applied)

    def cmd_synth(self, files, json_output=False):
        """Answer the ``#synth`` goals of files; exit 0 iff all found."""
        env, goals, lines, failed = self.build(files)
        if failed:
            return 1, '\n'.join(lines)
        if not goals:
            self.__log.warning('No #synth goals in %s', files)
        rows = self.solve_goals(env, goals)
        code = int(any(row['verdict'] != 'found' for row in rows))
        if json_output:
            return code, json.dumps({'goals': rows}, indent=2)
        return code, '\n'.join(self._format_goal(row) for row in rows)

    def cmd_lint(self, files, linters=None, per_instance=None,
                 json_output=False):
        """Run linters; exit 1 iff an error-severity finding exists."""
        env, goals, lines, failed = self.build(files)
        if failed:
            return 1, '\n'.join(lines)
        linters = self.linters if not linters else linters
        per_instance = self.per_instance if per_instance is None \
            else per_instance
        findings = lint_environment(env, goals, linters, self.lint_config,
                                    per_instance)
        code = int(any(f.severity == ERROR for f in findings))
        if json_output:
            return code, findings_to_json(findings)
        if not findings:
            return code, 'no findings'
        return code, '\n'.join('{}: {}: {}: {}'.format(
            self._paint(f.severity, f.severity != ERROR), f.linter,
            f.subject, f.message) for f in findings)

    def cmd_bench(self, max_depth=None, format=None, results_dir=None,
                  n_p=None, bundled=None, unbundled=None, fuel=None):
        """
        Run the bundled versus unbundled benchmark.

        Parameters
        ----------
        results_dir: str, optional
            When set, ``blowup.csv`` and ``blowup.png`` are written there
        """
        settings = dict(self.bench)
        for key, value in (('max_depth', max_depth), ('format', format),
                           ('n_p', n_p), ('bundled', bundled),
                           ('unbundled', unbundled), ('fuel', fuel)):
            if value is not None:
                settings[key] = value
        paths = [p for p in (settings['bundled'], settings['unbundled']) if p]
        self._check_paths(paths)
        env_b, env_u = load_bench_environments(settings['bundled'],
                                               settings['unbundled'])
        cfg = SynthConfig(fuel=settings['fuel'],
                          max_depth=self.synth_config.max_depth)
        rows = run_blowup(settings['max_depth'], env_b, env_u, cfg,
                          settings['n_p'])
        if results_dir is not None:
            results_dir = self.set_results_dir(results_dir)
            csv = os.path.join(results_dir, 'blowup.csv')
            self.__log.debug('Export bench rows to %s', csv)
            rows_to_frame(rows).to_csv(csv, index=False)
            plot_blowup(rows, os.path.join(results_dir, 'blowup.png'))
        code = int(any(r.error is not None for r in rows))
        return code, emit_report(rows, settings['format'])

    @staticmethod
    def set_results_dir(results_dir):
        if results_dir is None:
            results_dir = os.getcwd()
        if not os.path.exists(results_dir):
            os.mkdir(results_dir)
        return results_dir
