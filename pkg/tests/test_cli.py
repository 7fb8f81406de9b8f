#!/usr/bin/env python3
"""
Tests for ncerg CLI commands.
Run with: pytest tests/test_cli.py
"""

import json
import math

import pytest
from click.testing import CliRunner
from ncerg.cli import cli


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def scenario(tmp_path):
    def write(name, body):
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps({"schema": 1, **body}), encoding="utf-8")
        return str(path)
    return write


def test_cli_version(runner):
    """Test ncerg --version."""
    result = runner.invoke(cli, ['--version'])
    assert result.exit_code == 0
    assert '0.1.0' in result.output


def test_experiments_list(runner):
    """Test ncerg experiments."""
    result = runner.invoke(cli, ['experiments'])
    assert result.exit_code == 0
    assert '7 total' in result.output
    assert 'ds-verify' in result.output
    assert 'params:' in result.output


def test_experiments_search(runner):
    """Test ncerg experiments --search."""
    result = runner.invoke(cli, ['experiments', '--search', 'bound'])
    assert result.exit_code == 0
    assert 'bounds' in result.output
    assert 'converge' not in result.output


def test_experiments_search_no_match(runner):
    result = runner.invoke(cli, ['experiments', '--search', 'zzz'])
    assert result.exit_code == 0
    assert 'No experiments found' in result.output


def test_experiments_json(runner):
    result = runner.invoke(cli, ['experiments', '--json'])
    assert result.exit_code == 0
    data = json.loads(result.output)
    assert 'lambda' in data['maximal']['params']


def test_mu_json(runner):
    """Test ncerg mu --json."""
    result = runner.invoke(cli, ['mu', '--diag', '3,1,-2', '--weights', '1,2,0.5', '--t', '2', '--json'])
    assert result.exit_code == 0
    data = json.loads(result.output)
    assert data['mu'] == [[1.0, 3.0], [1.5, 2.0], [3.5, 1.0]]
    assert data['integral'] == pytest.approx(6.0)
    assert data['samples'] == [[2.0, 1.0]]


def test_mu_text(runner):
    result = runner.invoke(cli, ['mu', '--diag', '3,1,-2', '--weights', '1,2,0.5'])
    assert result.exit_code == 0
    assert '[1.5, 3.5)' in result.output


def test_mu_step_literal(runner):
    result = runner.invoke(cli, ['mu', '--element', 'step:1:2,3:0.5', '--json'])
    assert result.exit_code == 0
    assert json.loads(result.output)['support'] == 3.0


def test_mu_zero(runner):
    result = runner.invoke(cli, ['mu', '--diag', '0,0'])
    assert result.exit_code == 0
    assert '0 everywhere' in result.output


def test_mu_needs_an_element(runner):
    result = runner.invoke(cli, ['mu'])
    assert result.exit_code == 2
    assert '--diag' in result.output


def test_mu_bad_weights(runner):
    result = runner.invoke(cli, ['mu', '--diag', '1,2', '--weights', '1'])
    assert result.exit_code == 1
    assert 'Error' in result.output


def test_norm_json(runner):
    """Test ncerg norm --json."""
    result = runner.invoke(cli, ['norm', '--diag', '3,1,-2', '--weights', '1,2,0.5',
                                 '--norm', 'lp:2', '--norm', 'l1&linf', '--json'])
    assert result.exit_code == 0
    values = sorted(json.loads(result.output).values())
    assert values == pytest.approx([math.sqrt(13.0), 6.0])


def test_norm_defaults_to_all(runner):
    result = runner.invoke(cli, ['norm', '--diag', '1,-1'])
    assert result.exit_code == 0
    assert 'lorentz' in result.output
    assert 'marcinkiewicz' in result.output


def test_norm_unknown_descriptor(runner):
    result = runner.invoke(cli, ['norm', '--diag', '1', '--norm', 'sobolev:2'])
    assert result.exit_code == 1
    assert 'Unknown norm shorthand' in result.output


def test_average_json(runner):
    """Test ncerg average --json."""
    result = runner.invoke(cli, ['average', '--family', 'heat_cycle:2', '--diag', '1,-1', '--json'])
    assert result.exit_code == 0
    data = json.loads(result.output)
    assert data['algebra'] == [[1, 1.0], [1, 1.0]]
    assert len(data['blocks']) == 2


def test_average_text(runner):
    result = runner.invoke(cli, ['average', '--family', 'heat_cycle:2', '--diag', '1,-1',
                                 '--method', 'quad', '--order', '8'])
    assert result.exit_code == 0
    assert 'heat_cycle(2)' in result.output
    assert '0.432332358' in result.output


def test_average_bad_order(runner):
    result = runner.invoke(cli, ['average', '--family', 'heat_cycle:2', '--diag', '1,-1',
                                 '--method', 'quad', '--order', '3'])
    assert result.exit_code == 1
    assert 'even integer' in result.output


def test_average_shape_mismatch(runner):
    result = runner.invoke(cli, ['average', '--family', 'heat_cycle:3', '--diag', '1,-1'])
    assert result.exit_code == 1


def test_run_ds_verify(runner, scenario, tmp_path):
    """Test ncerg run on a passing scenario."""
    path = scenario('shift', {"experiment": "ds-verify", "map": {"map": "cyclic_shift", "n": 4}})
    result = runner.invoke(cli, ['run', path, '--out', str(tmp_path / 'out')])
    assert result.exit_code == 0
    assert '✓ ds-verify finished' in result.output
    assert (tmp_path / 'out' / 'shift.report.json').exists()


def test_run_json_and_seed(runner, scenario):
    path = scenario('conv', {
        "experiment": "converge",
        "semigroup": {"family": "heat_cycle", "n": 4},
        "element": {"generator": "random_operator"},
        "params": {"t_grid": [0.5, 0.25]},
    })
    result = runner.invoke(cli, ['run', path, '--seed', '3', '--json'])
    assert result.exit_code == 0
    report = json.loads(result.output)
    assert report['seed'] == 3
    assert report['experiment'] == 'converge'


def test_run_bound_failure(runner, scenario):
    """Test ncerg run exit code 2 when a bound check fails."""
    path = scenario('bad', {
        "experiment": "bounds",
        "semigroup": {"family": "heat_cycle", "n": 3},
        "element": {"diag": [1, 0, 0]},
        "params": {"check": "continuity", "slack": -1},
    })
    result = runner.invoke(cli, ['run', path])
    assert result.exit_code == 2
    assert 'bound check failed' in result.output


def test_run_invalid_scenario(runner, scenario):
    """Test ncerg run exit code 1 on a validation error."""
    path = scenario('broken', {"experiment": "mu", "element": {"diag": [1]}, "colour": "blue"})
    result = runner.invoke(cli, ['run', path])
    assert result.exit_code == 1
    assert 'Scenario Error' in result.output
    assert 'colour' in result.output


@pytest.fixture
def clean_env(monkeypatch):
    monkeypatch.delenv('NCERG_SEED', raising=False)
    monkeypatch.delenv('NCERG_THREADS', raising=False)


def test_selftest_passes(runner, clean_env, tmp_path):
    """Test ncerg selftest with the default seed."""
    result = runner.invoke(cli, ['selftest', '--out', str(tmp_path)])
    assert result.exit_code == 0
    assert '✓ All criteria passed' in result.output
    assert '✗' not in result.output
    for name in ('mu-oracle', 'cross-method', 'closed-form', 'product-rewriting'):
        assert name in result.output
    report = json.loads((tmp_path / 'selftest.json').read_text(encoding='utf-8'))
    assert report['result']['passed'] is True
    assert len(report['result']['rows']) == 12


def test_selftest_bad_quadrature_order_fails(runner, clean_env):
    """Test the hidden --debug-quadrature-order flag breaks the quadrature criteria."""
    result = runner.invoke(cli, ['selftest', '--debug-quadrature-order', '2'])
    assert result.exit_code == 2
    assert 'criteria failed' in result.output
    failed = [line for line in result.output.splitlines() if '✗' in line]
    for name in ('cross-method', 'closed-form', 'product-rewriting'):
        assert any(name in line for line in failed)
