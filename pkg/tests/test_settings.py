from __future__ import annotations

from pathlib import Path

import pytest

from scripts.kernel.closure import Limits
from scripts.settings import (
    BUDGET_KEYS,
    MAX_CLOSURE_ENV,
    ResolvedSettings,
    load_settings_config,
    resolve_settings,
)


CONFIG_PATH = Path(__file__).resolve().parents[1] / "config" / "cubewright.yaml"


@pytest.fixture
def config() -> dict:
    return load_settings_config(CONFIG_PATH)


def test_shipped_profiles(config):
    assert sorted(config["profiles"]) == ["desk", "exhaustive", "smoke"]
    for profile in config["profiles"].values():
        assert set(profile) <= set(BUDGET_KEYS)


def test_desk_profile_matches_builtin_defaults(config):
    desk = resolve_settings("desk", config, environ={})
    defaults = ResolvedSettings(profile="desk")
    assert desk == defaults
    assert desk.to_limits() == Limits()


def test_profile_values(config):
    smoke = resolve_settings("smoke", config, environ={})
    assert smoke.max_closure == 64
    assert smoke.wnu_arities == (2,)
    assert smoke.budgets()["wnu_arities"] == [2]
    assert "profile" not in smoke.budgets()

    exhaustive = resolve_settings("exhaustive", config, environ={})
    assert exhaustive.seed == 20240607
    assert exhaustive.workers == 4


def test_environment_sets_closure_cap(config):
    settings = resolve_settings("desk", config, environ={MAX_CLOSURE_ENV: "5000"})
    assert settings.max_closure == 5000
    assert settings.to_limits().max_closure == 5000


def test_command_line_beats_environment(config):
    settings = resolve_settings(
        "desk",
        config,
        overrides={"max_closure": 77, "window": None},
        environ={MAX_CLOSURE_ENV: "5000"},
    )
    assert settings.max_closure == 77
    assert settings.window == 4


def test_wnu_arities_from_text(config):
    settings = resolve_settings("desk", config, overrides={"wnu_arities": "2,5"}, environ={})
    assert settings.wnu_arities == (2, 5)


def test_unknown_profile(config):
    with pytest.raises(KeyError, match="Available profiles: desk, exhaustive, smoke"):
        resolve_settings("laptop", config, environ={})


def test_unknown_budget(config):
    with pytest.raises(KeyError, match="Unknown budget 'max_depth' in command line"):
        resolve_settings("desk", config, overrides={"max_depth": 3}, environ={})


@pytest.mark.parametrize(
    "overrides",
    [
        {"m_max": 0},
        {"window": -1},
        {"k_max": True},
        {"d_max": 2.5},
        {"wnu_arities": [1, 2]},
        {"wnu_arities": ""},
    ],
)
def test_invalid_budget_values(config, overrides):
    with pytest.raises(ValueError):
        resolve_settings("desk", config, overrides=overrides, environ={})


def test_seed_may_be_zero(config):
    assert resolve_settings("exhaustive", config, overrides={"seed": 0}, environ={}).seed == 0


def test_profile_entries_are_checked():
    config = {"profiles": {"odd": {"max_closre": 10}}}
    with pytest.raises(KeyError, match="profiles.odd"):
        resolve_settings("odd", config, environ={})


def test_empty_profile_keeps_defaults():
    settings = resolve_settings("bare", {"profiles": {"bare": None}}, environ={})
    assert settings == ResolvedSettings(profile="bare")


def test_missing_config_file(tmp_path):
    with pytest.raises(FileNotFoundError, match="--config"):
        load_settings_config(tmp_path / "absent.yaml")


def test_config_must_be_a_mapping(tmp_path):
    path = tmp_path / "list.yaml"
    path.write_text("- desk\n- smoke\n", encoding="utf-8")
    with pytest.raises(ValueError, match="not a mapping"):
        load_settings_config(path)
