"""Test the bundled versus unbundled benchmark."""
import json
import os

import numpy as np
import pytest

from tcsynth.bench import (BENCH_DEPTH, BUNDLED, UNBUNDLED, BenchRow,
                           affine_envelope, bench_goal, emit_report,
                           growth_summary, load_bench_environments,
                           nested_prod, plot_blowup, rows_to_frame,
                           run_blowup)
from tcsynth.terms import render

max_depth = BENCH_DEPTH
unbundled_sizes = [1, 15, 59, 159, 349, 671, 1175]


@pytest.fixture(scope='module')
def rows():
    env_b, env_u = load_bench_environments()
    return run_blowup(max_depth, env_b, env_u)


def _sizes(rows, mode):
    return [r.term_size for r in rows if r.mode == mode]


def test_goal():
    assert render(nested_prod(0)) == 'nat'
    assert render(bench_goal(2)) == 'comm_monoid (prod (prod nat nat) nat)'


def test_rows(rows):
    assert [(r.mode, r.depth) for r in rows] == \
        [(BUNDLED, d) for d in range(max_depth + 1)] + \
        [(UNBUNDLED, d) for d in range(max_depth + 1)]
    assert all(r.error is None for r in rows)


def test_bundled_linear(rows):
    assert _sizes(rows, BUNDLED) == [2 * n + 1 for n in range(max_depth + 1)]
    slope, ok = affine_envelope(rows)
    assert slope == 2
    assert ok


def test_unbundled_growth(rows):
    sizes = _sizes(rows, UNBUNDLED)
    assert sizes == unbundled_sizes
    ratios = np.array(sizes[2:]) / np.array(sizes[1:-1])
    assert np.all(ratios[:3] >= 2)
    # one recursive call per class and depth: a quartic, not exponential
    assert np.all(np.diff(ratios) < 0)
    assert np.all(np.diff(sizes, 4) == 8)
    _, ok = affine_envelope(rows, UNBUNDLED)
    assert not ok


def test_growth_summary(rows):
    summary = growth_summary(rows)
    assert list(summary.index) == list(range(max_depth + 1))
    separation = summary['separation'].values
    assert separation[0] == 1
    assert np.all(np.diff(separation) > 0)
    np.testing.assert_allclose(summary[BUNDLED + '_ratio'].values[1:],
                               [3, 5 / 3, 7 / 5, 9 / 7, 11 / 9, 13 / 11])


def test_applied_monotonic(rows):
    for mode in (BUNDLED, UNBUNDLED):
        applied = [r.applied for r in rows if r.mode == mode]
        assert applied == sorted(applied)


def test_emit_report(rows):
    data = json.loads(emit_report(rows, 'json'))
    assert data['rows'][0] == rows[0].as_dict()
    csv = emit_report(rows, 'csv')
    assert csv.splitlines()[0] == 'mode,depth,term_size,applied,elapsed_ms'
    assert csv.splitlines()[1].startswith('bundled,0,1,')
    table = emit_report(rows)
    assert 'unbundled' in table
    assert '349' in table
    with pytest.raises(ValueError):
        emit_report(rows, 'xml')


def test_failed_row():
    rows = [
        BenchRow(UNBUNDLED, 1, None, 10, 0.5, 'fuel_exhausted'),
        BenchRow(BUNDLED, 0, 1, 1, 0.1)
    ]
    df = rows_to_frame(rows)
    assert list(df['mode']) == [BUNDLED, UNBUNDLED]
    assert list(df.columns)[-1] == 'error'
    assert rows[0].as_dict()['error'] == 'fuel_exhausted'
    assert 'error' not in rows[1].as_dict()


def test_plot(rows, tmp_path):
    path = plot_blowup(rows, str(tmp_path / 'blowup.png'))
    assert os.path.getsize(path) > 0
