"""
Settings for the strata engine

Layered configuration: ``config/settings.yaml`` (or the file named by
STRATA_SETTINGS), then environment variables from ``.env``, then CLI flags.
"""

import os
from pathlib import Path
from typing import Any, Dict, Literal, Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from .errors import InvalidInputError

load_dotenv()

DEFAULT_MAX_BELL = 4140  # Bell(8)
DEFAULT_MAX_FORESTS = 200000

SETTINGS_PATH = Path(__file__).resolve().parent.parent / "config" / "settings.yaml"


class Guards(BaseModel):
    max_bell: int = Field(DEFAULT_MAX_BELL, gt=0, description="Largest Bell(n) the quotient oracle may enumerate.")
    max_forests: int = Field(DEFAULT_MAX_FORESTS, gt=0, description="Largest number of forests per complex.")


class CacheSettings(BaseModel):
    enabled: bool = True
    dir: str = ".strata_cache"


class RunConfig(BaseModel):
    """Effective configuration of one CLI run."""

    command: Optional[str] = None
    guards: Guards = Field(default_factory=Guards)
    threads: int = Field(1, ge=1)
    output: Literal["table", "json"] = "table"
    cache: CacheSettings = Field(default_factory=CacheSettings)
    strict: bool = Field(False, description="Fail instead of assuming reachability above the oracle guard.")


def _read_yaml(path: Path) -> Dict[str, Any]:
    if not path.exists():
        return {}
    with open(path, "r", encoding="utf-8") as f:
        return yaml.safe_load(f) or {}


def load_settings(path: Optional[Path] = None, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Merge YAML defaults, environment and explicit overrides into a RunConfig.

    Args:
        path: settings file; defaults to STRATA_SETTINGS or the bundled file
        overrides: values from the command line (None entries are ignored)

    Returns:
        RunConfig: validated configuration

    Raises:
        InvalidInputError: the merged configuration does not validate
    """
    path = Path(path or os.environ.get("STRATA_SETTINGS") or SETTINGS_PATH)
    data = _read_yaml(path)

    cache_dir = os.environ.get("STRATA_CACHE_DIR")
    if cache_dir:
        data.setdefault("cache", {})["dir"] = cache_dir

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key in ("max_bell", "max_forests"):
            data.setdefault("guards", {})[key] = value
        elif key == "cache_dir":
            data.setdefault("cache", {})["dir"] = value
        elif key == "no_cache":
            if value:
                data.setdefault("cache", {})["enabled"] = False
        else:
            data[key] = value

    try:
        return RunConfig(**data)
    except ValidationError as exc:
        raise InvalidInputError(f"invalid configuration: {exc}") from exc
