#!/usr/bin/env python

# stdlib imports
from fractions import Fraction
import json
import os
import warnings

# third party imports
import numpy as np
import pytest

# local imports
from gstn.commands import (EXIT_DIFFERENT_COMPONENTS, EXIT_FAILURE, EXIT_OK,
        RunConfig, render, run)
from gstn.constants import DEFAULT_SEED, SEED_VARIABLE
from gstn.errors import EnumerationCapExceeded, InvalidN
from gstn.paths import random_pair
from gstn.quadratic import build_form
from gstn.spectral import eigendecompose


def test_run_config():
    cfg = RunConfig(command='form', n=5, seed=3)
    assert cfg.samples == cfg.config['sampling']['samples']
    assert cfg.trials == cfg.config['oracle']['trials']
    cfg = RunConfig(command='components', n=4, eps_steps=7)
    assert cfg.config['components']['eps_steps'] == 7
    for options in ({'format': 'xml'}, {'samples': 0}, {'eps_min': -1.0},
            {'seed': -2}):
        try:
            RunConfig(command='form', n=4, **options)
            success = True
        except ValueError:
            success = False
        assert success == False
    try:
        RunConfig(command='form', n=2)
        success = True
    except InvalidN:
        success = False
    assert success == False
    try:
        run(RunConfig(command='form'))
        success = True
    except ValueError:
        success = False
    assert success == False


def test_seed_variable():
    saved = os.environ.get(SEED_VARIABLE)
    os.environ[SEED_VARIABLE] = '42'
    try:
        assert RunConfig(command='form', n=4).seed == 42
        assert RunConfig(command='form', n=4, seed=7).seed == 7
    finally:
        if saved is None:
            del os.environ[SEED_VARIABLE]
        else:
            os.environ[SEED_VARIABLE] = saved


def test_cmd_form():
    report, table, code = run(RunConfig(command='form', n=5, check=True))
    assert code == EXIT_OK
    assert report['inertia'] == [2, 1, 2]
    assert report['exact_inertia'] == [2, 1, 2]
    assert report['slice_type'] == 'I × S¹ × S¹'
    assert len(report['Q']) == 5
    assert [row['sign'] for row in table] == ['zero', 'positive',
            'positive', 'negative', 'negative']


def test_cmd_restricted():
    report, table, code = run(RunConfig(command='restricted', n=5,
            check=True))
    assert code == EXIT_OK
    assert report['text'] == '-3(x1 - x3)^2'
    assert report['kernel_dim'] == 2
    assert report['published_match'] is True
    assert report['b_vector']['match']
    # the published digits agree column by column, not under one sign
    assert report['b_vector']['matched_up_to'] == 'per-column signs'
    assert 'per-column signs' in report['b_vector']['note']
    assert len(table) == 3
    report, table, code = run(RunConfig(command='restricted', n=6,
            check=True))
    assert code == EXIT_OK
    assert report['elimination']['match']
    assert report['elimination']['discriminant'] == '-384(x2 - x3)^2'
    assert report['kernel_dim'] == 1
    report, table, code = run(RunConfig(command='restricted', n=7,
            check=True))
    assert code == EXIT_OK
    assert report['kernel'] == [[1, 0, 1, 0, 1, 0, 1],
            [0, 1, 0, 1, 0, 1, 0]]
    report, table, code = run(RunConfig(command='restricted', n=9,
            check=True))
    assert code == EXIT_OK
    assert report['published_match'] == 'n/a'
    assert report['kernel_dim'] == 2


def test_cmd_oracle():
    report, table, code = run(RunConfig(command='oracle', n=3, x='1,0,0'))
    assert code == EXIT_OK
    assert report['trials'] == 1
    assert report['point']['residual'] == Fraction(-1, 16)
    assert report['point']['psi'] == Fraction(1, 16)
    report, table, code = run(RunConfig(command='oracle', n=6, trials=5,
            seed=9))
    assert code == EXIT_OK
    assert report['tally'] == '5/5'
    assert report['influence_agrees'] == 5
    assert report['index_symmetry']
    assert len(table) == 5
    try:
        run(RunConfig(command='oracle', n=17, trials=1))
        success = True
    except EnumerationCapExceeded:
        success = False
    assert success == False
    try:
        run(RunConfig(command='oracle', n=4, x='1,0,0'))
        success = True
    except ValueError:
        success = False
    assert success == False


def test_cmd_components_small():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always')
        report, table, code = run(RunConfig(command='components', n=4,
                samples=10, check=True))
    assert any('plateau' in str(w.message) for w in caught)
    assert report['stable_count'] is None
    assert report['expected'] == 2
    assert report['sample_count'] == 10
    assert report['cylinder_separation'] >= report['separation_bound'] - \
            1e-12
    assert code == EXIT_FAILURE
    assert len(table) == len(report['epsilon_grid'])


def test_cmd_path():
    report, table, code = run(RunConfig(command='path', n=4,
            random_pair=True, opposite_cylinders=True))
    assert code == EXIT_DIFFERENT_COMPONENTS
    assert report['passed'] is False
    report, table, code = run(RunConfig(command='path', n=5,
            random_pair=True, seed=12))
    assert code == EXIT_OK
    assert report['passed']
    assert report['waypoint_count'] == len(table)
    assert report['max_abs_psi'] < 1e-8


def test_cmd_path_endpoints():
    form = build_form(5)
    spectrum = eigendecompose(form)
    p, q = random_pair(5, spectrum, 12)
    text_p = ','.join(repr(float(v)) for v in p)
    text_q = ','.join(repr(float(v)) for v in q)
    report, table, code = run(RunConfig(command='path', n=5, p=text_p,
            q=text_q))
    assert code == EXIT_OK
    assert report['passed']
    np.testing.assert_array_equal(report['p'], p)
    # one endpoint alone, none, or mixed with --random-pair
    for options in ({'p': text_p}, {'q': text_q}, {},
            {'random_pair': True, 'p': text_p},
            {'p': text_p, 'q': '0.5,0.5'}):
        try:
            run(RunConfig(command='path', n=5, **options))
            success = True
        except ValueError:
            success = False
        assert success == False


@pytest.mark.slow
def test_cmd_report():
    document, table, code = run(RunConfig(command='report', nmax=6,
            trials=5, seed=DEFAULT_SEED))
    assert code == EXIT_OK
    assert document['passed']
    assert sorted(document['inertia']) == [3, 4, 5, 6]
    assert document['components'] == {3: 2, 4: 2, 5: 1, 6: 1}
    assert document['paths'][4]['failed'] == 0
    assert document['oracle'][6] == '5/5'
    assert [row['n'] for row in table] == [3, 4, 5, 6]
    # same seed, same bytes
    again, again_table, _ = run(RunConfig(command='report', nmax=6,
            trials=5, seed=DEFAULT_SEED))
    for fmt in ('json', 'csv', 'text'):
        assert render(document, table, fmt) == render(again, again_table,
                fmt)


def test_render():
    report = {'n': 4, 'value': 1.0 / 3.0, 'ratio': Fraction(3, 8),
            'flags': np.array([True, False]), 'nan': float('nan'),
            'nested': {'count': np.int64(2), 'list': [0.1, 0.2]}}
    data = json.loads(render(report, None, 'json', digits=4))
    assert data['value'] == 0.3333
    assert data['ratio'] == '3/8'
    assert data['flags'] == [True, False]
    assert data['nan'] is None
    assert data['nested'] == {'count': 2, 'list': [0.1, 0.2]}
    table = [{'index': 1, 'eigenvalue': 0.5}, {'index': 2,
            'eigenvalue': -0.25}]
    text = render(report, table, 'csv')
    assert text.splitlines()[0] == 'index,eigenvalue'
    assert len(text.splitlines()) == 3
    text = render(report, table, 'text')
    assert 'ratio: 3/8' in text
    assert '  count: 2' in text


if __name__ == '__main__':
    test_run_config()
    test_seed_variable()
    test_cmd_form()
    test_cmd_restricted()
    test_cmd_oracle()
    test_cmd_components_small()
    test_cmd_path()
    test_cmd_path_endpoints()
    test_render()
