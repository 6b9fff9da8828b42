"""
Configuration for Thue2DLite
Search bounds, enumeration limits and semantics flags, loaded from .env, a
JSON config file and THUE2DLITE_* environment variables, in that order.
"""
import json
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv

from .errors import ConfigError

ENV_PREFIX = "THUE2DLITE_"
CONFIG_PATH_VARIABLE = "THUE2DLITE_CONFIG"
DEFAULT_CONFIG_PATH = Path.home() / '.thue2dlite' / 'config.json'


@dataclass(frozen=True)
class Config:
    max_word_len: Optional[int] = None        # None: |l| + |r| + 8
    max_expansions: int = 1_000_000
    max_semigroup_order: int = 3
    quotient_max_len: int = 6
    chase_depth: int = 3
    enum_max_vertices: int = 3
    enum_ceiling: int = 4
    enum_budget: int = 65536
    una: bool = True
    pcwa: bool = True
    phi_negate_T: bool = False
    workers: int = 4
    log_level: str = "WARNING"

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, int) and not isinstance(value, bool) and value < 0:
                raise ConfigError(f"{f.name} must be non-negative, got {value}")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")

    def updated(self, **overrides: Any) -> "Config":
        """Copy with the non-None overrides applied"""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _coerce(name: str, raw: Any) -> Any:
    kinds = {f.name: f.type for f in fields(Config)}
    if name not in kinds:
        raise ConfigError(f"unknown config field '{name}'")
    kind = kinds[name]
    if raw is None:
        return None
    try:
        if kind in (bool, "bool"):
            if isinstance(raw, bool):
                return raw
            lowered = str(raw).strip().lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if kind in (str, "str"):
            return str(raw)
        if str(raw).strip().lower() in ("", "none") and "Optional" in str(kind):
            return None
        return int(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"invalid value {raw!r} for {name}")


def load_config(path: Optional[str] = None, environ: Optional[Dict[str, str]] = None) -> Config:
    """
    Build a Config from defaults, the JSON file and the environment.

    Args:
        path: explicit JSON file; else THUE2DLITE_CONFIG, else ~/.thue2dlite/config.json if present
        environ: environment mapping (os.environ when omitted, after load_dotenv)

    Returns:
        The resulting Config; CLI flags are applied afterwards with Config.updated
    """
    if environ is None:
        load_dotenv()
        environ = dict(os.environ)

    values: Dict[str, Any] = {}
    config_path = path or environ.get(CONFIG_PATH_VARIABLE)
    candidate = Path(config_path) if config_path else DEFAULT_CONFIG_PATH
    if candidate.exists():
        try:
            with open(candidate, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config file {candidate}: {e}")
        if not isinstance(data, dict):
            raise ConfigError(f"config file {candidate} must hold a JSON object")
        for key, raw in data.items():
            values[key] = _coerce(key, raw)
    elif config_path:
        raise ConfigError(f"config file {candidate} does not exist")

    for f in fields(Config):
        key = ENV_PREFIX + f.name.upper()
        if key in environ:
            values[f.name] = _coerce(f.name, environ[key])

    return Config(**values)
