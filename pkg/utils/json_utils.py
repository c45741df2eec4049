"""
JSON config utilities.
Loads a run config, merges it over the defaults in config.settings and
applies dotted command-line overrides (--set operator.alpha=0.5).
"""

import copy
import json
import math
import os
from typing import Any, Iterable

from config.settings import DEFAULT_RUN_CONFIG
from core.errors import ConfigError


def deep_merge(base: dict, override: dict) -> dict:
    """Recursively merge override into a copy of base; non-dict values replace."""
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def parse_literal(text: str) -> Any:
    """JSON literal when the text parses as one (0.5, [1,0,1], true, null), else the bare string."""
    text = text.strip()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_override(item: str):
    if "=" not in item:
        raise ConfigError(f"override '{item}' must look like a.b=value", field_path=item)
    path, raw = item.split("=", 1)
    path = path.strip()
    if not path or any(not part for part in path.split(".")):
        raise ConfigError(f"override '{item}' has an empty field name", field_path=path or item)
    return path, parse_literal(raw)


def set_path(config: dict, path: str, value: Any) -> dict:
    node = config
    parts = path.split(".")
    for depth, part in enumerate(parts[:-1]):
        child = node.get(part)
        if child is None:
            child = node[part] = {}
        elif not isinstance(child, dict):
            raise ConfigError(
                f"cannot set '{path}': '{'.'.join(parts[:depth + 1])}' is not an object", field_path=path
            )
        node = child
    node[parts[-1]] = value
    return config


def apply_overrides(config: dict, overrides: Iterable[str]) -> dict:
    out = copy.deepcopy(config)
    for item in overrides or ():
        path, value = parse_override(item)
        set_path(out, path, value)
    return out


def load_config(path: str = None, overrides: Iterable[str] = ()) -> dict:
    """Defaults, then the JSON document at path (if any), then the overrides."""
    raw = {}
    if path:
        if not os.path.exists(path):
            raise ConfigError(f"config file '{path}' not found", field_path="config")
        with open(path, "r", encoding="utf-8") as f:
            try:
                raw = json.load(f)
            except json.JSONDecodeError as e:
                raise ConfigError(f"config file '{path}' is not valid JSON: {e}", field_path="config")
        if not isinstance(raw, dict):
            raise ConfigError("config document must be a JSON object", field_path="config")
    return apply_overrides(deep_merge(DEFAULT_RUN_CONFIG, raw), overrides)


def to_jsonable(obj: Any) -> Any:
    """numpy scalars/arrays to Python values; NaN and infinities to null."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "tolist"):
        return to_jsonable(obj.tolist())
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    return obj
