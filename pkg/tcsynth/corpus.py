"""
Corpus module.

Loads the ``.tc`` fixture files with their ``manifest.yml`` expectations
and checks the expectations against the engine and the linters.

Contains
--------
* :class:`tcsynth.corpus.CorpusManifest`
* :class:`tcsynth.corpus.CorpusEntry`
* :func:`tcsynth.corpus.load_corpus`
* :func:`tcsynth.corpus.verify_entry`
"""
import os
from dataclasses import dataclass, field
from typing import Optional, Tuple

from autologging import logged
from ruamel.yaml import YAML

from . import bins
from ._exceptions import TCError, TCMissingFile, TCSynthFailure
from .hierarchy import build_environment
from .linters import lint_diamond, lint_environment, lint_fails_quickly
from .parser import SourceFile, parse_file, parse_term
from .synth import (SynthConfig, check_result, make_local_instances,
                    synthesize)
from .terms import render

MANIFEST = 'manifest.yml'

REQUIRED = ('02_add_group.tc', '02_pointwise.tc', '03_comm_monoid.tc',
            '04_module.tc', '05_hom_classes.tc', '06_nsmul_diamond.tc',
            '06_unique_loop.tc', '07_mixins.tc', '08_fact_zmod.tc',
            '09_unbundled.tc', '09_has_bot_loop.tc')


def corpus_dir():
    """Directory of the packaged corpus."""
    return os.path.join(os.path.dirname(bins.__file__), 'corpus')


def corpus_file(name):
    return os.path.join(corpus_dir(), name)


def read_yaml(path):
    with open(path, 'r') as f:
        return YAML(typ='safe', pure=True).load(f)


def read_source(path):
    """
    Read and parse a ``.tc`` file.

    Raises
    ------
    OSError
        File cannot be read
    TCParseError
    """
    with open(path, 'r', encoding='utf-8') as f:
        return parse_file(f.read(), path)


def load_environment(paths):
    """Parse paths and build them, in order, into one environment."""
    return build_environment([read_source(p) for p in paths])


@dataclass
class CorpusEntry:
    """
    Corpus file with its expectations.

    ``error`` holds the :class:`TCMissingFile` or parse error raised
    while loading, None otherwise.
    """

    file: str
    path: str
    anchor: str = ''
    expect: Tuple[dict, ...] = ()
    source: Optional[SourceFile] = None
    error: Optional[Exception] = None

    @property
    def ok(self):
        return self.error is None


@dataclass
class CorpusManifest:
    root: str
    entries: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, name):
        for entry in self.entries:
            if entry.file == name:
                return entry
        raise KeyError(name)

    @property
    def errors(self):
        return [e for e in self.entries if e.error is not None]


@dataclass(frozen=True)
class Outcome:
    """Result of one expectation."""

    file: str
    expectation: dict = field(hash=False)
    ok: bool = False
    actual: str = ''

    @property
    def description(self):
        exp = self.expectation
        if 'synth' in exp:
            return '#synth {} -> {}'.format(exp['synth'], exp.get('verdict'))
        if 'lint' in exp:
            return 'lint {} {} -> {}'.format(exp['lint'],
                                             exp.get('subject', ''),
                                             exp.get('verdict'))
        return str(exp)


def load_corpus(root=None):
    """
    Load the corpus manifest and parse its files.

    Parameters
    ----------
    root: str, optional
        Corpus directory, the packaged corpus by default

    Returns
    -------
    CorpusManifest
        One entry per manifest file, per required file and per other
        ``.tc`` file of root. Missing and unparsable files are entries
        with ``error`` set.
    """
    root = root if root is not None else corpus_dir()
    manifest = os.path.join(root, MANIFEST)
    listed = {}
    if os.path.isfile(manifest):
        listed = read_yaml(manifest) or {}
    files = list(listed)
    files.extend(f for f in REQUIRED if f not in files)
    if os.path.isdir(root):
        files.extend(
            sorted(f for f in os.listdir(root)
                   if f.endswith('.tc') and f not in files))
    result = CorpusManifest(root)
    for name in files:
        info = listed.get(name) or {}
        entry = CorpusEntry(name, os.path.join(root, name),
                            info.get('anchor', ''),
                            tuple(info.get('expect') or ()))
        if not os.path.isfile(entry.path):
            entry.error = TCMissingFile('missing corpus file {}'.format(name))
        else:
            try:
                entry.source = read_source(entry.path)
            except TCError as e:
                entry.error = e
        result.entries.append(entry)
    return result


def _config(exp):
    defaults = SynthConfig()
    return SynthConfig(fuel=exp.get('fuel', defaults.fuel),
                       max_depth=exp.get('max_depth', defaults.max_depth),
                       tabled=exp.get('tabled', defaults.tabled))


@logged
class ExpectationChecker(object):
    """
    Check the expectations of one corpus entry.

    Parameters
    ----------
    entry: CorpusEntry
        Loaded entry
    """

    def __init__(self, entry):
        self.entry = entry
        self.env, self.goals = build_environment([entry.source])

    def _locals(self, goal, occurrence, cfg):
        matching = [g for g in self.goals if g.goal == goal]
        if not matching:
            return None
        entry = matching[min(occurrence, len(matching)) - 1]
        if not entry.locals:
            return None
        return make_local_instances(entry.locals, self.env, cfg)

    def synth(self, exp):
        goal = parse_term(exp['synth'])
        cfg = _config(exp)
        try:
            locals = self._locals(goal, exp.get('occurrence', 1), cfg)
            r = synthesize(goal, self.env, locals, cfg)
        except TCSynthFailure as e:
            applied = e.stats.applied if e.stats is not None else 0
            ok = e.verdict == exp['verdict'] and 'term' not in exp \
                and applied <= exp.get('max_applied', applied)
            return ok, '{} (applied={})'.format(e.verdict, applied)
        term = render(r.term)
        ok = (exp['verdict'] == 'found'
              and term == exp.get('term', term)
              and r.stats.applied <= exp.get('max_applied', r.stats.applied)
              and check_result(goal, r, self.env, locals))
        return ok, 'found {} (applied={})'.format(term, r.stats.applied)

    def lint(self, exp):
        name = exp['lint']
        cfg = _config(exp)
        if name == 'diamond':
            findings = lint_diamond(self.env, parse_term(exp['goal']), cfg)
        elif name == 'fails_quickly':
            findings = lint_fails_quickly(self.env, cfg,
                                          exp.get('per_instance', False))
        else:
            findings = lint_environment(self.env, self.goals, [name], cfg)
        if 'subject' in exp:
            findings = [f for f in findings if f.subject == exp['subject']]
        if exp['verdict'] == 'clean':
            ok = not findings
        else:
            ok = bool(findings)
            if 'path' in exp:
                ok = ok and any(
                    f.data.get('path') == list(exp['path']) for f in findings)
            if 'field' in exp:
                ok = ok and any(exp['field'] in f.data.get('fields', ())
                                for f in findings)
            if 'count' in exp:
                ok = ok and len(findings) == exp['count']
        actual = '; '.join(f.message for f in findings) or 'clean'
        return ok, actual

    def check(self, exp):
        if 'synth' in exp:
            ok, actual = self.synth(exp)
        elif 'lint' in exp:
            ok, actual = self.lint(exp)
        else:
            ok, actual = False, 'unknown expectation'
        if not ok:
            self.__log.warning('%s: %s got %s', self.entry.file, exp, actual)
        return Outcome(self.entry.file, exp, ok, actual)


def verify_entry(entry):
    """
    Execute the expectations of an entry.

    Parameters
    ----------
    entry: CorpusEntry

    Returns
    -------
    list
        One :class:`Outcome` per expectation, or a single failed outcome
        when the entry could not be loaded or built.
    """
    if entry.error is not None:
        return [Outcome(entry.file, {'load': entry.file}, False,
                        str(entry.error))]
    try:
        checker = ExpectationChecker(entry)
    except TCError as e:
        return [Outcome(entry.file, {'build': entry.file}, False,
                        '{}: {}'.format(e.line, e))]
    return [checker.check(exp) for exp in entry.expect]
