"""
Tests for ncerg scenario dispatch and report output.
"""

import json
import math

import numpy as np
import pytest

from ncerg.config import Settings
from ncerg.literals import operator_from_literal
from ncerg.runner import EXIT_BOUND_FAILURE, EXIT_OK, EXIT_VALIDATION, run_scenario, selftest


SETTINGS = Settings(seed=5, maximal_grid_points=8)


@pytest.fixture
def write_scenario(tmp_path):
    def write(name, body):
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps({"schema": 1, **body}, indent=2), encoding="utf-8")
        return path
    return write


def _report(path):
    return json.loads(path.read_text(encoding="utf-8"))


def test_mu_scenario(write_scenario, tmp_path):
    path = write_scenario("mu", {
        "experiment": "mu",
        "element": {"diag": [3, 1, -2], "weights": [1, 2, 0.5]},
        "params": {"t": [0.5, 2]},
    })
    result = run_scenario(path, settings=SETTINGS)
    assert result.exit_code == EXIT_OK
    report = _report(tmp_path / "mu.report.json")
    assert report["result"]["mu"] == [[1.0, 3.0], [1.5, 2.0], [3.5, 1.0]]
    assert report["result"]["samples"] == [[0.5, 3.0], [2.0, 1.0]]
    assert report["seed"] == 5
    assert (tmp_path / "mu.report.csv").read_text() == "end,value\n1,3\n1.5,2\n3.5,1\n"


def test_norm_scenario(write_scenario):
    path = write_scenario("norm", {
        "experiment": "norm",
        "element": {"diag": [3, 1, -2], "weights": [1, 2, 0.5]},
        "params": {"norms": [{"kind": "lp", "p": 2}, {"kind": "l1&linf"}]},
    })
    result = run_scenario(path, settings=SETTINGS)
    assert result.exit_code == EXIT_OK
    norms = result.report.result["norms"]
    assert sorted(norms.values()) == pytest.approx([math.sqrt(13.0), 6.0])
    assert len(result.report.result["traits"]) == 2


def test_ds_verify_scenario(write_scenario, tmp_path):
    path = write_scenario("ds", {"experiment": "ds-verify", "map": {"map": "cyclic_shift", "n": 4}})
    result = run_scenario(path, settings=SETTINGS)
    assert result.exit_code == EXIT_OK
    assert result.report.result["verdict"] is True
    assert result.report.result["algebra"] == [[1, 1.0]] * 4
    assert [p.name for p in result.paths] == ["ds.report.json"]


def test_ds_verify_failure_is_data(write_scenario):
    path = write_scenario("scale", {
        "experiment": "ds-verify",
        "map": {"map": "scaling", "c": 2, "algebra": [[1, 1], [1, 1]]},
    })
    result = run_scenario(path, settings=SETTINGS)
    assert result.exit_code == EXIT_OK
    assert result.report.result["verdict"] is False
    assert result.report.result["subunital_slack"] == pytest.approx(1.0)


def test_average_scenario(write_scenario):
    path = write_scenario("avg", {
        "experiment": "average",
        "semigroup": {"family": "heat_cycle", "n": 2},
        "element": {"diag": [1, -1]},
        "params": {"t": 1.0, "method": "quad", "order": 8, "error_estimate": True},
    })
    result = run_scenario(path, settings=SETTINGS)
    assert result.exit_code == EXIT_OK
    body = result.report.result
    factor = -math.expm1(-2.0) / 2.0
    y = operator_from_literal(body["average"])
    np.testing.assert_allclose(y.diagonal_values().real, [factor, -factor], atol=1e-10)
    assert body["method"] == {"method": "quad", "order": 8, "factorized": True}
    assert body["error_estimate"] < 1e-8


def test_converge_scenario(write_scenario, tmp_path):
    path = write_scenario("conv", {
        "experiment": "converge",
        "seed": 7,
        "semigroup": {"family": "heat_cycle", "n": 8},
        "element": {"generator": "random_positive", "seed": 3},
        "output": {"name": "table"},
    })
    result = run_scenario(path, settings=SETTINGS)
    assert result.exit_code == EXIT_OK
    assert result.report.seed == 7
    assert len(result.report.result["t_grid"]) == 10
    lines = (tmp_path / "table.csv").read_text().splitlines()
    assert lines[0] == "t,norm_value"
    assert len(lines) == 11


def test_maximal_discrete_scenario(write_scenario):
    path = write_scenario("yeadon", {
        "experiment": "maximal",
        "map": {"map": "cyclic_shift", "n": 4},
        "element": {"diag": [4, 0, 0, 0]},
        "params": {"lambda": 2, "discrete": True, "N": 20},
    })
    result = run_scenario(path, settings=SETTINGS)
    assert result.exit_code == EXIT_OK
    body = result.report.result
    assert body["projection_found"] and body["budget_met"]
    assert body["strategy"] == "brute_force"


def test_maximal_continuous_scenario(write_scenario):
    path = write_scenario("max", {
        "experiment": "maximal",
        "semigroup": {"family": "heat_cycle", "n": 4},
        "element": {"generator": "random_positive"},
        "params": {"lambda": 1.0, "strategy": "greedy_peel"},
    })
    result = run_scenario(path, settings=SETTINGS)
    assert result.exit_code == EXIT_OK
    assert result.report.result["grid_size"] == 9


def test_bounds_scenario_passes(write_scenario):
    path = write_scenario("bounds", {
        "experiment": "bounds",
        "semigroup": {"family": "heat_cycle", "n": 3},
        "element": {"diag": [0.1, -0.2, 0.3]},
        "params": {"check": "all", "p": "inf"},
    })
    result = run_scenario(path, settings=SETTINGS)
    assert result.exit_code == EXIT_OK
    checks = result.report.result["checks"]
    assert [c["name"] for c in checks] == ["rate", "continuity", "dyadic"]


def test_bounds_scenario_with_negative_slack_fails(write_scenario, tmp_path):
    path = write_scenario("bad", {
        "experiment": "bounds",
        "semigroup": {"family": "heat_cycle", "n": 3},
        "element": {"diag": [1, 0, 0]},
        "params": {"check": "continuity", "slack": -1},
    })
    result = run_scenario(path, settings=SETTINGS)
    assert result.exit_code == EXIT_BOUND_FAILURE
    assert result.report.result["passed"] is False
    assert (tmp_path / "bad.report.json").exists()


@pytest.mark.parametrize("body", [
    {"experiment": "mu", "element": {"diag": [1]}, "colour": 1},
    {"experiment": "average", "semigroup": {"family": "heat_cycle", "n": 2}, "element": {"diag": [1, 2, 3]}},
    {"experiment": "bounds", "semigroup": {"family": "heat_cycle", "n": 2}, "element": {"diag": [1, 2]},
     "params": {"check": "sharpness"}},
    {"experiment": "maximal", "semigroup": {"family": "heat_cycle", "n": 2}, "element": {"diag": [1, 2]}},
    {"experiment": "average", "semigroup": {"family": "heat_cycle", "n": 2}, "element": {"diag": [1, 2]},
     "params": {"method": "quad", "order": 3}},
])
def test_validation_errors(write_scenario, tmp_path, body):
    path = write_scenario("invalid", body)
    result = run_scenario(path, settings=SETTINGS)
    assert result.exit_code == EXIT_VALIDATION
    assert result.report is None and result.error
    assert not (tmp_path / "invalid.report.json").exists()


def test_missing_scenario_file(tmp_path):
    result = run_scenario(tmp_path / "missing.json", settings=SETTINGS)
    assert result.exit_code == EXIT_VALIDATION


def test_output_location_and_seed_override(write_scenario, tmp_path):
    path = write_scenario("where", {
        "experiment": "mu",
        "seed": 4,
        "element": {"generator": "random_hermitian", "algebra": [[2, 1.0]]},
        "output": {"dir": str(tmp_path / "from_scenario"), "csv": False},
    })
    result = run_scenario(path, settings=SETTINGS)
    assert result.paths == [tmp_path / "from_scenario" / "where.report.json"]
    overridden = run_scenario(path, out_dir=tmp_path / "cli", seed=9, settings=SETTINGS)
    assert overridden.paths == [tmp_path / "cli" / "where.report.json"]
    assert overridden.report.seed == 9
    assert overridden.report.scenario_hash == result.report.scenario_hash


def test_identical_runs_give_identical_bytes(write_scenario, tmp_path):
    path = write_scenario("same", {
        "experiment": "converge",
        "semigroup": {"family": "heat_cycle", "n": 4},
        "element": {"generator": "random_operator"},
    })
    run_scenario(path, out_dir=tmp_path / "a", settings=SETTINGS)
    run_scenario(path, out_dir=tmp_path / "b", settings=SETTINGS)
    assert (tmp_path / "a" / "same.report.json").read_bytes() == (tmp_path / "b" / "same.report.json").read_bytes()
    assert (tmp_path / "a" / "same.report.csv").read_bytes() == (tmp_path / "b" / "same.report.csv").read_bytes()


def test_selftest_report_is_reproducible(tmp_path):
    first = selftest(seed=3, out_dir=tmp_path / "a", settings=SETTINGS)
    second = selftest(seed=3, out_dir=tmp_path / "b", settings=SETTINGS)
    assert first.paths == [tmp_path / "a" / "selftest.json"]
    assert [row.name for row in first.rows] == [row.name for row in second.rows]
    assert len(first.rows) == 12
    assert first.exit_code == second.exit_code
    assert (tmp_path / "a" / "selftest.json").read_bytes() == (tmp_path / "b" / "selftest.json").read_bytes()
    assert _report(tmp_path / "a" / "selftest.json")["seed"] == 3


def test_selftest_without_out_dir_writes_nothing(tmp_path):
    result = selftest(seed=3, quadrature_order=2, settings=SETTINGS)
    assert result.paths == []
    assert result.exit_code == EXIT_BOUND_FAILURE
    assert result.report.result["quadrature_order"] == 2
    assert not next(row for row in result.rows if row.name == "cross-method").passed
