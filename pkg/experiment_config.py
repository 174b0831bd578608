#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Experiment Config
Loads json5 experiment documents, checks them against the experiment's declared
parameters and resolves CLI overrides. Nothing is computed before validation passes.
"""

import hashlib
import logging
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from typing import Any, Dict, Mapping, Optional

import json5
import numpy as np

from errors import SchemaError, UnknownExperimentError

logger = logging.getLogger(__name__)

TOP_LEVEL_KEYS = ("experiment", "seed", "threads", "out", "plot", "params")
SEED_LIMIT = 2 ** 64


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    params: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    threads: int = 1
    out: str = "results"
    plot: bool = False

    def resolved(self) -> Dict[str, Any]:
        """The full config with every default filled in, as echoed into the summary."""
        return asdict(self)

    def sha256(self) -> str:
        canonical = json5.dumps(self.resolved(), sort_keys=True, separators=(",", ":"), quote_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


# =============================================================================
# LOADING
# =============================================================================

def load_config(path: str) -> Dict[str, Any]:
    """Reads one json5 document."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json5.load(f)
    except FileNotFoundError as e:
        raise SchemaError(f"config file not found: {path}") from e
    except ValueError as e:
        raise SchemaError(f"{path} is not valid json5: {e}") from e
    logger.debug(f"📂 Config loaded: {path}")
    if not isinstance(raw, dict):
        raise SchemaError(f"{path}: the top level must be an object")
    return raw


# =============================================================================
# VALIDATION
# =============================================================================

def _type_name(value) -> str:
    return type(value).__name__


def _check_value(name: str, value, default) -> None:
    if default is None:
        return
    if isinstance(default, bool):
        ok = isinstance(value, bool)
    elif isinstance(default, int):
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif isinstance(default, float):
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    elif isinstance(default, str):
        # spec parameters take a keyword or an object
        ok = isinstance(value, (str, dict))
    elif isinstance(default, (list, tuple)):
        ok = isinstance(value, list)
    elif isinstance(default, dict):
        ok = isinstance(value, dict)
    else:
        ok = True
    if not ok:
        raise SchemaError(f"parameter '{name}' expects {_type_name(default)}, got {_type_name(value)} ({value!r})")


def _integer(raw: Mapping, key: str, default: int, lower: int, upper: Optional[int] = None) -> int:
    value = raw.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"'{key}' must be an integer, got {value!r}")
    if value < lower or (upper is not None and value >= upper):
        raise SchemaError(f"'{key}'={value} is out of range")
    return value


def validate(raw: Mapping[str, Any], registry: Mapping[str, Any]) -> ExperimentConfig:
    """Checks a raw document against the registry; registry values expose `.defaults`."""
    unknown = sorted(set(raw) - set(TOP_LEVEL_KEYS))
    if unknown:
        raise SchemaError(f"unknown config field(s): {', '.join(unknown)}")
    name = raw.get("experiment")
    if not isinstance(name, str):
        raise SchemaError("'experiment' must name a registered experiment")
    if name not in registry:
        raise UnknownExperimentError(name, registry)

    defaults = registry[name].defaults
    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise SchemaError("'params' must be an object")
    extra = sorted(set(params) - set(defaults))
    if extra:
        raise SchemaError(f"unknown parameter(s) for '{name}': {', '.join(extra)}; allowed: {', '.join(sorted(defaults))}")
    for key, value in params.items():
        _check_value(key, value, defaults[key])

    out = raw.get("out", "results")
    if not isinstance(out, str) or not out:
        raise SchemaError(f"'out' must be a directory path, got {out!r}")
    plot = raw.get("plot", False)
    if not isinstance(plot, bool):
        raise SchemaError(f"'plot' must be true or false, got {plot!r}")

    return ExperimentConfig(
        experiment=name,
        params={**defaults, **params},
        seed=_integer(raw, "seed", 0, 0, SEED_LIMIT),
        threads=_integer(raw, "threads", 1, 1),
        out=out,
        plot=plot,
    )


def with_overrides(
    config: ExperimentConfig,
    seed: Optional[int] = None,
    threads: Optional[int] = None,
    out: Optional[str] = None,
    plot: Optional[bool] = None,
) -> ExperimentConfig:
    """CLI flags win over config fields."""
    changes: Dict[str, Any] = {}
    if seed is not None:
        if not 0 <= seed < SEED_LIMIT:
            raise SchemaError(f"--seed must fit in 64 bits, got {seed}")
        changes["seed"] = seed
    if threads is not None:
        if threads < 1:
            raise SchemaError(f"--threads must be ≥ 1, got {threads}")
        changes["threads"] = threads
    if out is not None:
        changes["out"] = out
    if plot:
        changes["plot"] = True
    return replace(config, **changes) if changes else config


# =============================================================================
# PARAMETER HELPERS
# =============================================================================

def fraction_param(name: str, value) -> Fraction:
    """'1/3', 0.5 or 2 → Fraction."""
    try:
        return Fraction(value) if not isinstance(value, float) else Fraction(value).limit_denominator(10 ** 9)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise SchemaError(f"parameter '{name}' is not a rational number: {value!r}") from e


def int_list(name: str, value, minimum: int = 1):
    if not isinstance(value, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise SchemaError(f"parameter '{name}' must be a list of integers, got {value!r}")
    if any(v < minimum for v in value):
        raise SchemaError(f"parameter '{name}' needs entries ≥ {minimum}, got {value!r}")
    return [int(v) for v in value]


def rng_for(seed: int, stream: int = 0) -> np.random.Generator:
    """A generator for one named stream of a run; streams never share state."""
    return np.random.default_rng([seed % SEED_LIMIT, stream])
