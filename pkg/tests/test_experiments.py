"""
Tests for the ncerg experiment vocabulary.
"""

from ncerg.experiments import (
    BOUND_CHECKS,
    EXPERIMENTS,
    EXPERIMENT_PARAMS,
    allowed_params,
    describe_experiment,
    is_valid_experiment,
)


def test_every_experiment_has_params():
    assert set(EXPERIMENTS) == set(EXPERIMENT_PARAMS)
    assert len(EXPERIMENTS) == 7


def test_valid_experiments():
    assert is_valid_experiment("converge")
    assert is_valid_experiment("DS-VERIFY")
    assert not is_valid_experiment("simulate")


def test_describe_experiment():
    assert "Choi" in describe_experiment("ds-verify")
    assert describe_experiment("nope") == "Unknown experiment"


def test_allowed_params():
    assert "lambda" in allowed_params("maximal")
    assert allowed_params("Bounds") >= {"check", "slack", "t0"}
    assert allowed_params("nope") == frozenset()


def test_bound_checks():
    assert BOUND_CHECKS == ("rate", "continuity", "dyadic")
