"""Scenario configuration files: TOML schema, defaults, round-tripping.

Defaults mirror the moving-target experiment (5x5 actor window, sensor
horizon 105, prior mean 0.5, feasibility threshold 0.501).
"""

from __future__ import annotations

import os

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from .abstraction import builtin_codebook_16, load_codebook
from .grid import load_raster
from .sim import ScenarioConfig
from .synthetic import smooth_obstacle_map

__all__ = ["ConfigError", "parse_config", "serialize_config", "build_scenario"]


class ConfigError(ValueError):
    """Configuration file is invalid; the message names the field."""


_DEFAULTS = {
    "map": {
        "source": "synthetic",
        "path": "",
        "format": "text",
        "rows": 64,
        "cols": 64,
        "seed": 1,
        "n_blobs": 12,
        "blob_sigma": 3.0,
    },
    "run": {
        "framework": "AS",
        "seed": 0,
        "decoder": "iterative",
        "step_cap": 0,  # 0 = use the simulator default
    },
    "actor": {
        "start": [12, 57],
        "window": [5, 5],
        "noise_var": 1e-6,
    },
    "sensor": {
        "start": [46, 62],
        "horizon": 105,
        "stripe_spacing": 1,
        "channel_noise_var": 1e-5,
        "codebook": "builtin16",
        "bits_per_measurement": 12,
        "bits_per_index": 4,
    },
    "target": {
        "position": [60, 49],
        "moving": False,
    },
    "belief": {
        "prior_mean": 0.5,
        "prior_var": 1.0,
        "dense": False,
    },
    "planner": {
        "movement_penalty": 0.025,
        "feasibility_threshold": 0.501,
    },
    "encoder": {
        "sigma": 20.0,
        "lambda_coefficient": 0.02,
        "squared_weights": True,
    },
}


def _coerce(section: str, key: str, value, template):
    if isinstance(template, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{section}.{key}: expected boolean, got {value!r}")
        return value
    if isinstance(template, int) and not isinstance(template, bool):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{section}.{key}: expected integer, got {value!r}")
        if isinstance(value, float) and not value.is_integer():
            raise ConfigError(f"{section}.{key}: expected integer, got {value!r}")
        return int(value)
    if isinstance(template, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{section}.{key}: expected number, got {value!r}")
        return float(value)
    if isinstance(template, str):
        if not isinstance(value, str):
            raise ConfigError(f"{section}.{key}: expected string, got {value!r}")
        return value
    if isinstance(template, list):
        if (
            not isinstance(value, list)
            or len(value) != len(template)
            or any(isinstance(v, bool) or not isinstance(v, int) for v in value)
        ):
            raise ConfigError(
                f"{section}.{key}: expected {len(template)} integers, got {value!r}"
            )
        return [int(v) for v in value]
    raise AssertionError(f"unhandled template for {section}.{key}")


def parse_config(path) -> dict:
    """Parse and normalize a scenario file; unknown keys are rejected."""
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}")
    out = {}
    for section, defaults in _DEFAULTS.items():
        given = raw.pop(section, {})
        if not isinstance(given, dict):
            raise ConfigError(f"{section}: expected a table")
        merged = {}
        for key, default in defaults.items():
            if key in given:
                merged[key] = _coerce(section, key, given.pop(key), default)
            else:
                merged[key] = default
        if given:
            raise ConfigError(f"{section}: unknown keys {sorted(given)}")
        out[section] = merged
    if raw:
        raise ConfigError(f"unknown sections {sorted(raw)}")
    return out


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        return "[" + ", ".join(str(v) for v in value) + "]"
    if isinstance(value, str):
        return '"' + value + '"'
    return str(value)


def serialize_config(config: dict) -> str:
    """Canonical TOML text; serialize(parse(.)) is idempotent."""
    lines = []
    for section, defaults in _DEFAULTS.items():
        lines.append(f"[{section}]")
        values = config.get(section, defaults)
        for key in defaults:
            lines.append(f"{key} = {_fmt(values.get(key, defaults[key]))}")
        lines.append("")
    return "\n".join(lines)


def build_scenario(config: dict, **overrides) -> ScenarioConfig:
    """Materialize maps/codebooks and construct a runnable scenario.

    ``overrides`` replace individual ScenarioConfig fields (used by CLI
    flags such as ``--framework`` and ``--seed``).
    """
    m = config["map"]
    if m["source"] == "synthetic":
        grid = smooth_obstacle_map(
            m["rows"],
            m["cols"],
            seed=m["seed"],
            n_blobs=m["n_blobs"],
            blob_sigma=m["blob_sigma"],
            clear=[tuple(config["actor"]["start"]), tuple(config["target"]["position"])],
        )
    elif m["source"] == "file":
        if not m["path"]:
            raise ConfigError("map.path: required when map.source = 'file'")
        if not os.path.exists(m["path"]):
            raise ConfigError(f"map.path: no such file: {m['path']}")
        grid = load_raster(m["path"], format=m["format"])
    else:
        raise ConfigError(f"map.source: unknown source {m['source']!r}")

    s = config["sensor"]
    if s["codebook"] == "builtin16":
        codebook = builtin_codebook_16(
            n_m=s["bits_per_measurement"], n_a=s["bits_per_index"]
        )
    else:
        if not os.path.exists(s["codebook"]):
            raise ConfigError(f"sensor.codebook: no such file: {s['codebook']}")
        codebook = load_codebook(s["codebook"])

    kwargs = dict(
        grid=grid,
        framework=config["run"]["framework"],
        codebook=codebook,
        seed=config["run"]["seed"],
        decoder=config["run"]["decoder"],
        step_cap=config["run"]["step_cap"] or None,
        actor_start=tuple(config["actor"]["start"]),
        actor_window=tuple(config["actor"]["window"]),
        actor_noise_var=config["actor"]["noise_var"],
        sensor_start=tuple(s["start"]),
        sensor_horizon=s["horizon"],
        stripe_spacing=s["stripe_spacing"],
        channel_noise_var=s["channel_noise_var"],
        target=tuple(config["target"]["position"]),
        target_moves=config["target"]["moving"],
        prior_mean=config["belief"]["prior_mean"],
        prior_var=config["belief"]["prior_var"],
        dense_belief=config["belief"]["dense"],
        movement_penalty=config["planner"]["movement_penalty"],
        feasibility_threshold=config["planner"]["feasibility_threshold"],
        sigma=config["encoder"]["sigma"],
        lambda_coefficient=config["encoder"]["lambda_coefficient"],
        squared_weights=config["encoder"]["squared_weights"],
    )
    kwargs.update(overrides)
    try:
        return ScenarioConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
