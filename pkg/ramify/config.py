from __future__ import annotations

import os
from collections.abc import Mapping, MutableMapping
from pathlib import Path
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from .models import Variant

ENV_PREFIX = "RAMIFY_"
# Fields that may come from RAMIFY_* variables.
ENV_FIELDS = ("p", "N", "variant", "seed", "output", "kmax")


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    command: str = ""
    p: int = 5
    N: int = 8
    variant: Variant = "uncond"
    seed: int = 0
    output: Literal["table", "records"] = "table"
    kmax: Optional[int] = Field(default=None, ge=0)
    model_path: Optional[Path] = None
    two_prime_stages: tuple[int, ...] = ()
    log_path: Optional[Path] = None
    verbose: bool = False
    params: dict[str, Any] = Field(default_factory=dict)


def _load_dotenv(path: Path, environ: MutableMapping[str, str]) -> None:
    if not path.exists():
        return
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError:
        return
    for line in lines:
        stripped = line.strip()
        if not stripped or stripped.startswith("#") or "=" not in stripped:
            continue
        key, value = stripped.split("=", 1)
        key = key.strip()
        value = value.strip()
        if not key or key in environ:
            continue
        if len(value) >= 2 and value[0] == value[-1] and value[0] in ("'", '"'):
            value = value[1:-1]
        environ[key] = value


def env_overrides(environ: Mapping[str, str]) -> dict[str, str]:
    overrides = {}
    for name in ENV_FIELDS:
        value = environ.get(f"{ENV_PREFIX}{name.upper()}", "").strip()
        if value:
            overrides[name] = value.lower() if name in ("variant", "output") else value
    return overrides


def resolve_config(
    flags: Mapping[str, Any],
    *,
    environ: MutableMapping[str, str] | None = None,
    dotenv_path: Path | None = Path(".env"),
) -> RunConfig:
    """Flags beat RAMIFY_* variables, which beat .env, which beats defaults.

    `.env` entries never replace variables that are already set.
    """
    env = os.environ if environ is None else environ
    if dotenv_path is not None:
        _load_dotenv(dotenv_path, env)
    values: dict[str, Any] = dict(env_overrides(env))
    values.update({key: value for key, value in flags.items() if value is not None})
    return RunConfig.model_validate(values)
