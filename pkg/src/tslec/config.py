"""Plain-text ``key = value`` configuration shared by every parameter block.

Keys mirror dataclass field names.  They may be qualified with their block
(``env.episodes = 50``) or given bare (``episodes = 50``) when the name is
unambiguous.  ``#`` starts a comment.  Example::

    # shorter smoke run
    episodes = 20
    quantities = 4, 3, 2, 3, 2
    learning.gamma = 0.8
    seeds = 5
"""

from __future__ import annotations

import dataclasses
from typing import Iterable, Mapping

from .agent import AdaptationParams, LearningParams
from .env import EnvConfig
from .runner import SweepConfig
from .social import TrustParams

BLOCKS = {
    "env": EnvConfig,
    "learning": LearningParams,
    "trust": TrustParams,
    "adaptation": AdaptationParams,
    "sweep": SweepConfig,
}
_NESTED = {"env", "learning", "trust", "adaptation"}


class ConfigError(ValueError):
    pass


def _fields(block: str) -> dict[str, dataclasses.Field]:
    fields = {f.name: f for f in dataclasses.fields(BLOCKS[block])}
    if block == "sweep":
        fields = {k: v for k, v in fields.items() if k not in _NESTED}
    return fields


def resolve_key(key: str) -> tuple[str, str]:
    key = key.strip()
    if "." in key:
        block, name = key.split(".", 1)
        if block not in BLOCKS or name not in _fields(block):
            raise ConfigError(f"unknown config key {key!r}")
        return block, name
    owners = [b for b in BLOCKS if key in _fields(b)]
    if not owners:
        raise ConfigError(f"unknown config key {key!r}")
    if len(owners) > 1:
        raise ConfigError(f"ambiguous key {key!r}; qualify it as one of {', '.join(o + '.' + key for o in owners)}")
    return owners[0], key


def _default(block: str, name: str):
    return getattr(BLOCKS[block](), name)


def coerce(block: str, name: str, raw: str):
    default = _default(block, name)
    text = raw.strip()
    if isinstance(default, bool):
        low = text.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{block}.{name}: expected a boolean, got {raw!r}")
    if isinstance(default, tuple):
        parts = [p.strip() for p in text.strip("[]()").split(",") if p.strip()]
        if default and all(isinstance(v, int) for v in default):
            try:
                return tuple(int(p) for p in parts)
            except ValueError:
                raise ConfigError(f"{block}.{name}: expected integers, got {raw!r}") from None
        return tuple(p.upper() for p in parts)
    try:
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
    except ValueError:
        raise ConfigError(f"{block}.{name}: cannot parse {raw!r}") from None
    return text


def parse_lines(lines: Iterable[str]) -> dict[tuple[str, str], str]:
    out = {}
    for k, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {k}: expected key = value")
        key, value = line.split("=", 1)
        out[resolve_key(key)] = value
    return out


def parse_overrides(items: Iterable[str]) -> dict[tuple[str, str], str]:
    return parse_lines(items)


def build_config(values: Mapping[tuple[str, str], str] = (), base: SweepConfig = None) -> SweepConfig:
    """Apply raw ``(block, name) -> text`` values on top of ``base``."""
    base = base or SweepConfig()
    grouped: dict[str, dict] = {b: {} for b in BLOCKS}
    for (block, name), raw in dict(values).items():
        grouped[block][name] = coerce(block, name, raw)
    try:
        nested = {b: dataclasses.replace(getattr(base, b), **grouped[b]) for b in _NESTED}
        return dataclasses.replace(base, **grouped["sweep"], **nested)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(exc.args[0] if exc.args else str(exc)) from None


def load_config(path=None, overrides: Iterable[str] = ()) -> SweepConfig:
    values = {}
    if path is not None:
        with open(path) as fh:
            values.update(parse_lines(fh))
    values.update(parse_overrides(overrides))
    return build_config(values)


def dump_config(cfg: SweepConfig) -> str:
    lines = []
    for block in BLOCKS:
        obj = cfg if block == "sweep" else getattr(cfg, block)
        for name in _fields(block):
            value = getattr(obj, name)
            if isinstance(value, tuple):
                value = ", ".join(str(v) for v in value)
            lines.append(f"{block}.{name} = {value}")
    return "\n".join(lines) + "\n"
