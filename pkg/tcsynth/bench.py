"""
Bench module.

Bundled versus unbundled scaling: ``comm_monoid`` is synthesized for
products nested to increasing depth and the size of the instance term
is recorded together with the search effort.

Contains
--------
* :class:`tcsynth.bench.BenchRow`
* :class:`tcsynth.bench.BlowupBenchmark`
* :func:`tcsynth.bench.run_blowup`
* :func:`tcsynth.bench.emit_report`
* :func:`tcsynth.bench.growth_summary`
* :func:`tcsynth.bench.plot_blowup`
"""
import json
import time
from dataclasses import dataclass
from typing import Optional

import matplotlib
# Force matplotlib to not use any Xwindows backend.
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
import tabulate
from autologging import logged
from pathos.multiprocessing import ProcessPool

from ._exceptions import TCSynthFailure
from .corpus import corpus_file, load_environment
from .synth import SynthConfig, synthesize
from .terms import Const

BUNDLED = 'bundled'
UNBUNDLED = 'unbundled'
MODES = (BUNDLED, UNBUNDLED)
FORMATS = ('table', 'json', 'csv')
COLUMNS = ('mode', 'depth', 'term_size', 'applied', 'elapsed_ms')

# the unbundled side needs a larger budget than the synthesis default
BENCH_FUEL = 200000
BENCH_DEPTH = 6


@dataclass(frozen=True)
class BenchRow:
    """
    One synthesis of the benchmark.

    Parameters
    ----------
    mode: str
        bundled or unbundled
    depth: int
        Nesting level of ``prod``, 0 for the base type
    term_size: int
        Size of the instance term, None on failure
    applied: int
        Candidate applications
    elapsed: float
        Wall time in milliseconds, informational only
    error: str
        Failure verdict, None on success
    """

    mode: str
    depth: int
    term_size: Optional[int]
    applied: Optional[int]
    elapsed: float = 0.0
    error: Optional[str] = None

    def as_dict(self):
        d = {
            'mode': self.mode,
            'depth': self.depth,
            'term_size': self.term_size,
            'applied': self.applied,
            'elapsed_ms': self.elapsed
        }
        if self.error is not None:
            d['error'] = self.error
        return d


def nested_prod(depth, base='nat'):
    """``prod (... (prod base base) ...) base`` nested depth times."""
    t = Const(base)
    for _ in range(depth):
        t = Const('prod', (t, Const(base)))
    return t


def bench_goal(depth, cls='comm_monoid'):
    return Const(cls, (nested_prod(depth), ))


def _bench_row(task):
    mode, depth, env, cfg = task
    start = time.perf_counter()
    try:
        r = synthesize(bench_goal(depth), env, cfg=cfg)
    except TCSynthFailure as e:
        elapsed = round((time.perf_counter() - start) * 1e3, 3)
        applied = e.stats.applied if e.stats is not None else None
        return BenchRow(mode, depth, None, applied, elapsed, e.verdict)
    elapsed = round((time.perf_counter() - start) * 1e3, 3)
    return BenchRow(mode, depth, r.stats.size, r.stats.applied, elapsed)


def sort_rows(rows):
    """Bundled block first, each block by depth."""
    return sorted(rows, key=lambda r: (MODES.index(r.mode), r.depth))


@logged
class BlowupBenchmark(object):
    """
    Bundled versus unbundled term size benchmark.

    Parameters
    ----------
    env_bundled: Environment
        Environment with the bundled hierarchy and its nat and prod
        instances
    env_unbundled: Environment
        Same hierarchy with superclasses as instance binders
    cfg: SynthConfig, optional
        Budget of every synthesis, fuel 200000 by default
    n_p: int, default=1
        Number of processes
    """

    def __init__(self, env_bundled, env_unbundled, cfg=None, n_p=1):
        self.envs = {BUNDLED: env_bundled, UNBUNDLED: env_unbundled}
        self.cfg = cfg if cfg is not None else SynthConfig(fuel=BENCH_FUEL)
        self.n_p = n_p

    def run(self, max_depth=BENCH_DEPTH):
        """
        Synthesize every (mode, depth) goal.

        Parameters
        ----------
        max_depth: int
            Largest nesting depth

        Returns
        -------
        list
            :class:`BenchRow` sorted by mode, then depth. Failures are
            kept as rows with ``error`` set.
        """
        tasks = [(mode, depth, self.envs[mode], self.cfg) for mode in MODES
                 if self.envs[mode] is not None
                 for depth in range(max_depth + 1)]
        self.__log.info('Run %s benchmark goals on %s processes', len(tasks),
                        self.n_p)
        if self.n_p > 1:
            pool = ProcessPool(nodes=self.n_p)
            rows = pool.map(_bench_row, tasks)
        else:
            rows = [_bench_row(task) for task in tasks]
        for row in rows:
            if row.error is not None:
                self.__log.warning('%s depth %s: %s', row.mode, row.depth,
                                   row.error)
        return sort_rows(rows)


def load_bench_environments(bundled=None, unbundled=None):
    """Environments of the packaged bundled and unbundled hierarchies."""
    bundled = bundled or corpus_file('09_bundled.tc')
    unbundled = unbundled or corpus_file('09_unbundled.tc')
    return load_environment([bundled])[0], load_environment([unbundled])[0]


def run_blowup(max_depth, env_bundled, env_unbundled, cfg=None, n_p=1):
    """
    Run the scaling benchmark.

    Parameters
    ----------
    max_depth: int
        Largest nesting depth
    env_bundled, env_unbundled: Environment
    cfg: SynthConfig, optional
    n_p: int, default=1

    Returns
    -------
    list
        :class:`BenchRow` for each mode and each depth 0..max_depth
    """
    return BlowupBenchmark(env_bundled, env_unbundled, cfg, n_p).run(
        max_depth)


def rows_to_frame(rows):
    records = [r.as_dict() for r in sort_rows(rows)]
    columns = list(COLUMNS)
    if any('error' in rec for rec in records):
        columns.append('error')
    df = pd.DataFrame(records, columns=columns)
    for col in ('depth', 'term_size', 'applied'):
        df[col] = df[col].astype('Int64')
    return df


def emit_report(rows, format='table'):
    """
    Serialize benchmark rows.

    Parameters
    ----------
    rows: list
        :class:`BenchRow`
    format: str, default='table'
        table, json or csv

    Returns
    -------
    str
    """
    if format not in FORMATS:
        raise ValueError('format {} not in {}'.format(format, FORMATS))
    if format == 'json':
        return json.dumps({'rows': [r.as_dict() for r in sort_rows(rows)]},
                          indent=2)
    df = rows_to_frame(rows)
    if format == 'csv':
        return df.to_csv(index=False)
    records = [[None if pd.isnull(v) else v for v in rec]
               for rec in df.itertuples(index=False)]
    return tabulate.tabulate(records, headers=list(df.columns))


def growth_summary(rows):
    """
    Growth of the term size with the depth.

    Returns
    -------
    pandas.DataFrame
        Indexed by depth with the term size of each mode, the ratio to the
        previous depth (``<mode>_ratio``) and the unbundled to bundled
        ratio (``separation``).
    """
    df = rows_to_frame(rows)
    sizes = df.pivot(index='depth', columns='mode', values='term_size')
    summary = pd.DataFrame(index=sizes.index)
    for mode in MODES:
        if mode in sizes:
            col = sizes[mode].astype(float)
            summary[mode] = col
            summary[mode + '_ratio'] = col / col.shift(1)
    if all(mode in sizes for mode in MODES):
        summary['separation'] = summary[UNBUNDLED] / summary[BUNDLED]
    return summary


def affine_envelope(rows, mode=BUNDLED):
    """
    Check the affine bound ``size(n) <= size(0) + C n``.

    C is fitted at depths 1 and 2.

    Returns
    -------
    slope: int
        C, None when depths 0 to 2 are missing
    ok: bool
    """
    sizes = {
        r.depth: r.term_size
        for r in rows if r.mode == mode and r.term_size is not None
    }
    if not all(d in sizes for d in (0, 1, 2)):
        return None, False
    slope = sizes[2] - sizes[1]
    depths = np.array(sorted(sizes))
    values = np.array([sizes[d] for d in depths])
    return slope, bool(np.all(values <= sizes[0] + slope * depths))


def plot_blowup(rows, path):
    """Plot term size versus depth, log scale, to path."""
    fig, ax = plt.subplots()
    for mode in MODES:
        sel = [
            r for r in sort_rows(rows)
            if r.mode == mode and r.term_size is not None
        ]
        if sel:
            ax.semilogy([r.depth for r in sel], [r.term_size for r in sel],
                        marker='o', label=mode)
    ax.set_xlabel('prod nesting depth')
    ax.set_ylabel('instance term size')
    ax.spines['top'].set_visible(False)
    ax.spines['right'].set_visible(False)
    ax.legend(loc='best', frameon=False)
    fig.savefig(path, dpi=120, bbox_inches='tight')
    plt.close(fig)
    return path
