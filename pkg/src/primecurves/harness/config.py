"""TOML experiment configs.

Top-level keys are exactly the ExperimentConfig field names; the only table
is ``[robustness]``. Layout::

    n = 1000                      # required
    samples = 8192
    realizations = 200
    base_seed = 0
    kinds = ["prime", "random-frequency", "cramer", "shuffled"]
    normalization = "centroid-diameter"
    mode = "points"
    max_attempts = 1000
    m_min = 1
    m_max = 10
    fit_lo = 3
    fit_hi = 7

    [robustness]
    windows = [[2, 8], [3, 7], [4, 8]]
    sizes = [200, 500]
    densities = [2048, 4096, 8192, 16384]
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Mapping

from ..ensemble import ConfigError, ExperimentConfig
from ..robustness import DEFAULT_DENSITIES, DEFAULT_SIZES, DEFAULT_WINDOWS

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

TOP_LEVEL = tuple(f.name for f in fields(ExperimentConfig))
ROBUSTNESS_KEYS = ("windows", "sizes", "densities")


@dataclass(frozen=True)
class RobustnessSettings:
    windows: tuple[tuple[int, int], ...] = DEFAULT_WINDOWS
    sizes: tuple[int, ...] = DEFAULT_SIZES
    densities: tuple[int, ...] = DEFAULT_DENSITIES

    def to_dict(self) -> dict:
        return {
            "windows": [list(w) for w in self.windows],
            "sizes": list(self.sizes),
            "densities": list(self.densities),
        }


def _int_list(name: str, value: Any) -> tuple[int, ...]:
    if not isinstance(value, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise ConfigError(name, f"expected a list of integers, got {value!r}")
    return tuple(value)


def parse_robustness(raw: Mapping[str, Any] | None) -> RobustnessSettings:
    raw = dict(raw or {})
    unknown = sorted(set(raw) - set(ROBUSTNESS_KEYS))
    if unknown:
        raise ConfigError(f"robustness.{unknown[0]}", "unknown field")
    kw = {}
    if "windows" in raw:
        windows = raw["windows"]
        if not isinstance(windows, list) or not all(isinstance(w, list) and len(w) == 2 for w in windows):
            raise ConfigError("robustness.windows", "expected a list of [lo, hi] pairs")
        kw["windows"] = tuple(_int_list("robustness.windows", w) for w in windows)
    for key in ("sizes", "densities"):
        if key in raw:
            kw[key] = _int_list(f"robustness.{key}", raw[key])
    return RobustnessSettings(**kw)


def config_fields(raw: Mapping[str, Any]) -> dict[str, Any]:
    """Flatten a parsed TOML document into ExperimentConfig keyword arguments."""
    out: dict[str, Any] = {}
    for key, value in raw.items():
        if key in TOP_LEVEL:
            out[key] = value
        elif key == "robustness":
            continue
        else:
            raise ConfigError(key, "unknown field")
    return out


def build_config(fields: Mapping[str, Any]) -> ExperimentConfig:
    if fields.get("n") is None:
        raise ConfigError("n", "required field is missing")
    return ExperimentConfig(**{k: v for k, v in fields.items() if v is not None})


def load_config(path: str | Path) -> tuple[dict[str, Any], RobustnessSettings]:
    """Read a config file into (ExperimentConfig fields, robustness settings)."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("config", f"{path}: {exc}") from None
    return config_fields(raw), parse_robustness(raw.get("robustness"))
