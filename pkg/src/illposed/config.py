"""Scenario configuration: flat key = value files with [section] headers.

Sections are named after the commands (burgers-gap, euler-gap, time-zero,
cascade, lemmas).  Values are plain scalars; ``p`` accepts ``inf``.
Overrides arrive as repeated ``key=value`` strings from the command line.
Unknown keys are rejected with the nearest valid name.
"""

from __future__ import annotations

import difflib
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class ScenarioConfig:
    which: str
    s: float
    p: float
    n_min: int
    n_max: int
    j_max: int
    points: int
    points_axis2: int
    box_half_width: float
    flow_steps: int
    solver_steps: int | None
    jobs: int
    output_dir: str

    @property
    def n_list(self) -> list[int]:
        return list(range(self.n_min, self.n_max + 1))

    def validated(self) -> "ScenarioConfig":
        if self.n_min > self.n_max:
            raise ConfigError(f"n_min={self.n_min} exceeds n_max={self.n_max}")
        if self.which in ("burgers-gap", "euler-gap", "time-zero"):
            dim = 1 if self.which == "burgers-gap" else 2
            if not self.s > 1.0 + dim / self.p:
                raise ConfigError(
                    f"regularity s={self.s} must exceed 1 + dim/p = {1 + dim / self.p}")
        if self.j_max < self.n_max:
            raise ConfigError(f"j_max={self.j_max} must cover n_max={self.n_max}")
        return self


SCENARIO_DEFAULTS: dict[str, ScenarioConfig] = {
    "burgers-gap": ScenarioConfig(
        which="burgers-gap", s=2.0, p=2.0, n_min=9, n_max=14, j_max=14,
        points=1 << 21, points_axis2=0, box_half_width=16.0,
        flow_steps=8, solver_steps=None, jobs=1, output_dir="."),
    "euler-gap": ScenarioConfig(
        which="euler-gap", s=2.5, p=2.0, n_min=5, n_max=8, j_max=8,
        points=1 << 15, points_axis2=128, box_half_width=16.0,
        flow_steps=8, solver_steps=None, jobs=1, output_dir="."),
    "time-zero": ScenarioConfig(
        which="time-zero", s=2.5, p=2.0, n_min=4, n_max=8, j_max=8,
        points=1 << 15, points_axis2=128, box_half_width=16.0,
        flow_steps=8, solver_steps=None, jobs=1, output_dir="."),
    "cascade": ScenarioConfig(
        which="cascade", s=2.0, p=2.0, n_min=8, n_max=8, j_max=9,
        points=1 << 16, points_axis2=0, box_half_width=16.0,
        flow_steps=16, solver_steps=None, jobs=1, output_dir="."),
    "lemmas": ScenarioConfig(
        which="lemmas", s=2.0, p=2.0, n_min=10, n_max=12, j_max=14,
        points=1 << 17, points_axis2=64, box_half_width=16.0,
        flow_steps=8, solver_steps=None, jobs=1, output_dir="."),
}

_FIELD_PARSERS = {
    "s": float,
    "p": lambda v: np.inf if v.strip().lower() in ("inf", "infinity") else float(v),
    "n_min": int,
    "n_max": int,
    "j_max": int,
    "points": int,
    "points_axis2": int,
    "box_half_width": float,
    "flow_steps": int,
    "solver_steps": lambda v: None if v.strip().lower() in ("auto", "none") else int(v),
    "jobs": int,
    "output_dir": str,
}


def _convert(key: str, raw: str, where: str):
    key = key.strip().replace("-", "_")
    if key not in _FIELD_PARSERS:
        near = difflib.get_close_matches(key, _FIELD_PARSERS.keys(), n=1)
        hint = f"; nearest valid key is '{near[0]}'" if near else ""
        raise ConfigError(f"{where}: unknown key '{key}'{hint}")
    try:
        return key, _FIELD_PARSERS[key](raw.strip())
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse value for '{key}': {exc}") from exc


def parse_config_text(text: str, source: str = "<config>") -> dict[str, dict]:
    """Parse the flat key = value format; returns {section: {key: value}}."""
    sections: dict[str, dict] = {}
    current: dict | None = None
    current_name = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith(";"):
            continue
        where = f"{source}:{lineno}"
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"{where}: unterminated section header")
            current_name = line[1:-1].strip()
            if current_name not in SCENARIO_DEFAULTS:
                near = difflib.get_close_matches(current_name, SCENARIO_DEFAULTS, n=1)
                hint = f"; nearest valid section is '{near[0]}'" if near else ""
                raise ConfigError(f"{where}: unknown section '{current_name}'{hint}")
            current = sections.setdefault(current_name, {})
            continue
        if "=" not in line:
            raise ConfigError(f"{where}: expected 'key = value'")
        if current is None:
            raise ConfigError(f"{where}: key outside any [section]")
        key, _, value = line.partition("=")
        k, v = _convert(key, value, where)
        current[k] = v
    return sections


def parse_config_file(path) -> dict[str, dict]:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config_text(text, source=str(path))


def apply_overrides(values: dict, overrides) -> dict:
    out = dict(values)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override '{item}' is not of the form key=value")
        key, _, value = item.partition("=")
        k, v = _convert(key, value, f"--set {item}")
        out[k] = v
    return out


def load_scenario(which: str, config_path=None, overrides=None,
                  output_dir: str | None = None) -> ScenarioConfig:
    if which not in SCENARIO_DEFAULTS:
        raise ConfigError(f"unknown scenario '{which}'")
    values: dict = {}
    if config_path is not None:
        values.update(parse_config_file(config_path).get(which, {}))
    values = apply_overrides(values, overrides)
    cfg = replace(SCENARIO_DEFAULTS[which], **values)
    if output_dir is not None:
        cfg = replace(cfg, output_dir=output_dir)
    return cfg.validated()
