"""
Tests for ncerg settings and tolerances.
"""

import pytest

from ncerg.config import DEFAULT_SEED, TOLERANCES, Settings, load_settings
from ncerg.exceptions import InvalidParameterError


def test_defaults():
    settings = load_settings({})
    assert settings.seed == DEFAULT_SEED
    assert settings.threads == 1
    assert settings.quadrature_order == 12
    assert settings.tolerances == TOLERANCES


def test_environment_overrides():
    settings = load_settings({"NCERG_THREADS": "4", "NCERG_SEED": "9"})
    assert settings.threads == 4
    assert settings.seed == 9
    assert load_settings({"NCERG_SEED": " "}).seed == DEFAULT_SEED


@pytest.mark.parametrize("env", [
    {"NCERG_THREADS": "0"},
    {"NCERG_THREADS": "many"},
    {"NCERG_SEED": "-1"},
])
def test_invalid_environment(env):
    with pytest.raises(InvalidParameterError):
        load_settings(env)


def test_with_overrides_is_a_copy():
    settings = Settings()
    changed = settings.with_overrides(large_t=1e3)
    assert changed.large_t == 1e3
    assert settings.large_t == 1e6


def test_tolerances_to_dict():
    data = TOLERANCES.to_dict()
    assert data["merge"] == 1e-9
    assert data["budget"] == 1e-12
