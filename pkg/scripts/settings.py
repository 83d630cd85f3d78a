from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Mapping, Optional

import yaml

from scripts.cubeterm.analysis import DEFAULT_D_MAX, DEFAULT_K_MAX, DEFAULT_M_MAX, DEFAULT_PROBE_LENGTH
from scripts.congruence.generation import DEFAULT_CONGRUENCE_CAP, DEFAULT_MAX_CONGRUENCES
from scripts.kernel.closure import Limits
from scripts.kernel.subuniverses import DEFAULT_SUBUNIVERSE_BOUND
from scripts.kernel.tuples import DENSE_CODE_CAP
from scripts.maltsev.wnu import DEFAULT_WNU_ARITIES
from scripts.witness.claims import DEFAULT_SAMPLE_BUDGET
from scripts.witness.instance import DEFAULT_WINDOW


DEFAULT_CONFIG_PATH = Path("config/cubewright.yaml")
DEFAULT_PROFILE = "desk"
MAX_CLOSURE_ENV = "CUBEWRIGHT_MAX_CLOSURE"


@dataclass(frozen=True)
class ResolvedSettings:
    """Budgets resolved from defaults + profile + environment + CLI flags."""

    profile: str
    max_closure: int = Limits.max_closure
    max_work: int = Limits.max_work
    dense_code_cap: int = DENSE_CODE_CAP
    m_max: int = DEFAULT_M_MAX
    k_max: int = DEFAULT_K_MAX
    d_max: int = DEFAULT_D_MAX
    wnu_arities: tuple[int, ...] = DEFAULT_WNU_ARITIES
    window: int = DEFAULT_WINDOW
    sample_budget: int = DEFAULT_SAMPLE_BUDGET
    congruence_cap: int = DEFAULT_CONGRUENCE_CAP
    max_congruences: int = DEFAULT_MAX_CONGRUENCES
    subuniverse_bound: int = DEFAULT_SUBUNIVERSE_BOUND
    prec_probe_length: int = DEFAULT_PROBE_LENGTH
    seed: int = 0
    workers: int = 1

    def to_limits(self) -> Limits:
        return Limits(
            max_closure=self.max_closure,
            max_work=self.max_work,
            dense_code_cap=self.dense_code_cap,
        )

    def budgets(self) -> dict[str, Any]:
        """The budget keys as plain JSON values (no profile name)."""
        out = {}
        for f in fields(self):
            if f.name == "profile":
                continue
            value = getattr(self, f.name)
            out[f.name] = list(value) if isinstance(value, tuple) else value
        return out


BUDGET_KEYS = tuple(f.name for f in fields(ResolvedSettings) if f.name != "profile")


def load_settings_config(config_path: Path) -> dict:
    """
    Load YAML config/cubewright.yaml.

    Checks that the config file exists, then parses it into a Python dictionary.
    """
    if not config_path.exists():
        raise FileNotFoundError(
            f"Config not found: {config_path}\n\n"
            f"The repository ships config/cubewright.yaml; either run from the\n"
            f"repository root or pass --config with the path to a copy of it."
        )

    data = yaml.safe_load(config_path.read_text(encoding="utf-8"))

    if not isinstance(data, dict):
        raise ValueError(f"Config file is not a mapping/dict: {config_path}")

    return data


def _coerce(key: str, value: Any) -> Any:
    if key == "wnu_arities":
        if isinstance(value, str):
            value = [part for part in value.split(",") if part.strip()]
        arities = tuple(int(v) for v in value)
        if not arities or min(arities) < 2:
            raise ValueError(f"wnu_arities must list arities >= 2, got {value!r}.")
        return arities
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise ValueError(f"Budget '{key}' must be an integer, got {value!r}.")
    number = int(value)
    if number < 0 or (number == 0 and key not in ("seed",)):
        raise ValueError(f"Budget '{key}' must be positive, got {number}.")
    return number


def _merge(values: dict[str, Any], items: Mapping[str, Any], source: str) -> None:
    for key, value in items.items():
        if value is None:
            continue
        if key not in BUDGET_KEYS:
            raise KeyError(
                f"Unknown budget '{key}' in {source}.\n"
                f"Known budgets: {', '.join(BUDGET_KEYS)}"
            )
        values[key] = _coerce(key, value)


def resolve_settings(
    profile: str,
    config: dict,
    overrides: Optional[Mapping[str, Any]] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> ResolvedSettings:
    """
    Resolve the budgets for ``profile``.

    Precedence, lowest first:
      - built-in defaults
      - the profile's entries in config
      - CUBEWRIGHT_MAX_CLOSURE (closure cap only)
      - ``overrides`` (explicit CLI flags; None values are ignored)
    """
    profiles = config.get("profiles", {})
    environ = os.environ if environ is None else environ

    if profile not in profiles:
        raise KeyError(
            f"Profile '{profile}' not found in config.\n"
            f"Available profiles: {', '.join(sorted(profiles.keys())) or '(none)'}"
        )

    entries = profiles[profile] or {}
    if not isinstance(entries, dict):
        raise ValueError(f"profiles.{profile} is not a mapping/dict.")

    values: dict[str, Any] = {}
    _merge(values, entries, f"profiles.{profile}")
    if environ.get(MAX_CLOSURE_ENV):
        values["max_closure"] = _coerce("max_closure", environ[MAX_CLOSURE_ENV])
    _merge(values, overrides or {}, "command line")

    return replace(ResolvedSettings(profile=profile), **values)
