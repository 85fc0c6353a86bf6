"""Pipeline configuration.

A config file is TOML with flat keys, for example::

    framework = "eds"
    iterations = 3          # or "auto"
    tokenizer_mode = "default"
    rule2b_word_run = true
    allow_unanchored = false
    force_top = true
    seed = 1
    train = "data/train.mrp"
    companion = "data/train.conllu"
    model = "eds.bundle"
    output = "out.mrp"

Missing keys take the per-framework defaults; command-line flags override
the file.
"""

from __future__ import annotations

import os
import sys
from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Optional, Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .graph import FRAMEWORKS
from .oracle import ITERATION_BUDGETS

CONFIG_ENV = "LAYERGRAPH_CONFIG"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Config:
    framework: str = "dm"
    tokenizer_mode: Optional[str] = None
    iterations: Union[int, str, None] = None
    rule2b_word_run: bool = True
    allow_unanchored: bool = False
    force_top: bool = True
    seed: int = 0
    train: Optional[str] = None
    companion: Optional[str] = None
    model: Optional[str] = None
    output: Optional[str] = None

    def __post_init__(self) -> None:
        if self.framework not in FRAMEWORKS:
            raise ConfigError(f"unknown framework {self.framework!r}")
        if self.tokenizer_mode is None:
            object.__setattr__(self, "tokenizer_mode", "ucca" if self.framework == "ucca" else "default")
        if self.tokenizer_mode not in ("default", "ucca"):
            raise ConfigError(f"unknown tokenizer mode {self.tokenizer_mode!r}")
        if self.iterations is None:
            object.__setattr__(self, "iterations", ITERATION_BUDGETS[self.framework])
        elif self.iterations != "auto":
            try:
                value = int(self.iterations)
            except (TypeError, ValueError):
                raise ConfigError(f"iterations must be an integer or 'auto', got {self.iterations!r}") from None
            if value < 0:
                raise ConfigError("iterations must not be negative")
            object.__setattr__(self, "iterations", value)

    @classmethod
    def for_framework(cls, framework: str, **overrides: Any) -> "Config":
        return cls(framework=framework, **{k: v for k, v in overrides.items() if v is not None})

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, obj: dict) -> "Config":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(obj) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**obj)

    def with_overrides(self, **overrides: Any) -> "Config":
        """Apply non-None overrides; changing the framework resets derived defaults."""
        values = {k: v for k, v in overrides.items() if v is not None}
        if "framework" in values and values["framework"] != self.framework:
            base = self.to_dict()
            for key in ("tokenizer_mode", "iterations"):
                base[key] = None
            base.update(values)
            return Config.from_dict(base)
        return replace(self, **values)


def load_config(path: Optional[str] = None) -> dict:
    """Raw key/values from ``path`` or ``$LAYERGRAPH_CONFIG``; empty if neither."""
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    try:
        with open(path, "rb") as handle:
            return tomllib.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"bad config {path}: {exc}") from None
