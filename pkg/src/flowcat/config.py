"""Run configuration: command-line arguments > environment > INI file > defaults."""

import configparser
import logging
import os
from collections.abc import Mapping
from fractions import Fraction
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .constants import (
    CONFIG_SECTION,
    DEFAULT_EPSILON,
    DEFAULT_GRID_STEPS,
    DEFAULT_MAX_CODIM,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    ENV_EPSILON,
    ENV_MAX_CODIM,
    ENV_RING,
    ENV_THREADS,
    OutputFormat,
    Ring,
)
from .error_codes import ErrorCode
from .exceptions import ConfigError
from .types import Natural, Rational

logger = logging.getLogger(__name__)

# Setting name -> environment variable.
ENVIRONMENT_KEYS = {
    "threads": ENV_THREADS,
    "ring": ENV_RING,
    "epsilon": ENV_EPSILON,
    "max_codim": ENV_MAX_CODIM,
}


class RunConfig(BaseModel):
    """Settings shared by every subcommand."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    ring: Ring = Ring.Z
    epsilon: Rational = DEFAULT_EPSILON
    max_codim: Natural = DEFAULT_MAX_CODIM
    grid_steps: int = Field(default=DEFAULT_GRID_STEPS, ge=1)
    samples: Natural = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    threads: int = Field(default=1, ge=1)
    output_format: OutputFormat = OutputFormat.JSON

    @field_validator("epsilon")
    @classmethod
    def validate_epsilon(cls, v: Fraction) -> Fraction:
        if not 0 < v < 1:
            raise ValueError("epsilon must lie strictly between 0 and 1")

        return v


def load_config_file(config_path: str | Path) -> dict[str, str]:
    """Read the ``[flowcat]`` section of an INI file."""

    path = Path(config_path)
    if not path.exists():
        raise ConfigError(
            f"Configuration file not found: {path}", code=ErrorCode.CONFIG_INVALID
        )

    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.read(path, encoding="utf-8")
    if not parser.has_section(CONFIG_SECTION):
        logger.warning("No [%s] section in %s", CONFIG_SECTION, path)
        return {}

    return dict(parser.items(CONFIG_SECTION))


def resolve_config(
    overrides: Mapping[str, Any] | None = None,
    config_path: str | Path | None = None,
    environ: Mapping[str, str] | None = None,
) -> RunConfig:
    """Merge settings with precedence overrides > environment > file > defaults."""

    environ = os.environ if environ is None else environ
    values: dict[str, Any] = {}

    if config_path is not None:
        values.update(load_config_file(config_path))

    for key, variable in ENVIRONMENT_KEYS.items():
        raw = environ.get(variable)
        if raw:
            values[key] = raw

    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value

    try:
        return RunConfig(**values)
    except ValidationError as exc:
        raise ConfigError(
            f"Invalid flowcat configuration: {exc}", code=ErrorCode.CONFIG_INVALID
        ) from exc
