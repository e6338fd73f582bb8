"""
Configuration management.

This module handles loading and validation of run configuration from
YAML or JSON files, environment variables, and dictionaries.
"""

import os
import re
from pathlib import Path
from typing import Any, Literal

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic import ValidationError as PydanticValidationError

from pachner_walk.core.exceptions import ConfigurationError

ENV_PREFIX = "PACHNER_WALK_"

_BETA_TOKEN = re.compile(r"^\s*([0-9.eE+-]+)\s*\*\s*alpha\s*$")


class Config:
    """
    Configuration manager for Pachner Walk.

    Loads configuration from YAML (or JSON) files and environment variables,
    with support for nested key access and defaults.

    Example:
        >>> config = Config.from_file("pachner-walk.yaml")
        >>> config.get("alpha", 1e-2)
        0.001
        >>> config.get("heatmap.bins", 64)
        64
    """

    def __init__(self, config_dict: dict[str, Any] | None = None) -> None:
        """
        Initialize Config with dictionary.

        Args:
            config_dict: Configuration dictionary
        """
        self._config = dict(config_dict or {})
        # Keys passed to set() win over environment overrides.
        self._explicit: set[str] = set()
        load_dotenv()

    @classmethod
    def from_file(cls, config_path: str | Path) -> "Config":
        """
        Load configuration from a YAML or JSON file.

        Raises:
            ConfigurationError: If file cannot be loaded
        """
        config_file = Path(config_path)

        if not config_file.exists():
            raise ConfigurationError(
                f"Configuration file not found: {config_path}",
                config_key="config_path",
            )

        try:
            with open(config_file, encoding="utf-8") as f:
                config_dict = yaml.safe_load(f) or {}
        except Exception as e:
            raise ConfigurationError(
                f"Failed to parse configuration file: {e}",
                config_key="config_path",
            ) from e

        if not isinstance(config_dict, dict):
            raise ConfigurationError(
                "Configuration file must contain a mapping", config_key="config_path"
            )
        return cls(config_dict)

    @classmethod
    def from_dict(cls, config_dict: dict[str, Any]) -> "Config":
        return cls(config_dict)

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get configuration value by key.

        Supports nested keys using dot notation (e.g., "heatmap.bins").
        Environment variables (PACHNER_WALK_HEATMAP_BINS) take precedence
        over config file values, but not over values passed to set().
        """
        env_value = os.getenv(ENV_PREFIX + key.upper().replace(".", "_"))
        if env_value is not None and key not in self._explicit:
            return env_value

        value: Any = self._config
        for k in key.split("."):
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default

        return value

    def set(self, key: str, value: Any) -> None:
        """Set configuration value (dot notation for nested keys)."""
        keys = key.split(".")
        config = self._config

        for k in keys[:-1]:
            if k not in config:
                config[k] = {}
            config = config[k]

        config[keys[-1]] = value
        self._explicit.add(key)

    def validate(self) -> bool:
        """
        Validate configuration against RunConfig.

        Environment overrides are applied to top-level scalar keys first,
        except for keys passed to set().

        Raises:
            ConfigurationError: If configuration is invalid
        """
        merged = dict(self._config)
        for name in RunConfig.scalar_fields():
            env_value = os.getenv(ENV_PREFIX + name.upper())
            if env_value is not None and name not in self._explicit:
                merged[name] = env_value

        try:
            validated = RunConfig(**merged)
        except PydanticValidationError as exc:
            error_messages = "; ".join(
                f"{'.'.join(str(p) for p in err.get('loc', ()))}: {err.get('msg', 'Unknown error')}"
                for err in exc.errors()
            )
            raise ConfigurationError(
                f"Configuration invalid: {error_messages}",
                config_key="root",
            ) from exc

        # Keep the normalized config (with defaults) for downstream consumers.
        self._config = validated.model_dump()
        return True

    def run_config(self) -> "RunConfig":
        """Validated RunConfig built from this configuration."""
        self.validate()
        return RunConfig(**self._config)

    def to_dict(self) -> dict[str, Any]:
        return self._config.copy()


class CoinsConfig(BaseModel):
    """Coins as 8 reals each: row-major (re, im) pairs of a 2x2 matrix."""

    W: list[float] | None = None
    U1: list[float] | None = None
    U2: list[float] | None = None
    U3: list[float] | None = None

    @field_validator("W", "U1", "U2", "U3")
    @classmethod
    def validate_length(cls, value: list[float] | None) -> list[float] | None:
        if value is not None and len(value) != 8:
            raise ValueError("a coin is given as exactly 8 reals")
        return value


class SlotAmplitude(BaseModel):
    """One explicit initial amplitude: side path from the origin, side, value."""

    path: list[int] = Field(default_factory=list)
    side: int = Field(ge=1, le=3)
    re: float = 0.0
    im: float = 0.0

    @field_validator("path")
    @classmethod
    def validate_path(cls, value: list[int]) -> list[int]:
        if any(k not in (1, 2, 3) for k in value):
            raise ValueError("path entries must be side indices 1, 2 or 3")
        return value


class HeatmapConfig(BaseModel):
    """Heatmap emission settings; every_n_steps = 0 emits only the final step."""

    half_extent: float = Field(default=20.0, gt=0)
    bins: int = Field(default=64, ge=1)
    every_n_steps: int = Field(default=0, ge=0)


class RunConfig(BaseModel):
    """Full run configuration schema."""

    model_config = ConfigDict(extra="forbid")

    alpha: float = Field(default=1e-2, ge=0, le=1)
    beta: float | str = "3*alpha"
    steps: int = Field(default=200, ge=1)
    coins: CoinsConfig = Field(default_factory=CoinsConfig)
    initial_state: Literal["origin-default"] | list[SlotAmplitude] = "origin-default"
    ball_radius: float = Field(default=1.0, gt=0)
    eta_window: int = Field(default=5, ge=3)
    heatmap: HeatmapConfig = Field(default_factory=HeatmapConfig)
    snapshot_every: int = Field(default=0, ge=0)
    out_dir: str = Field(default="runs/latest", min_length=1)
    max_moments: int = Field(default=4, ge=2)
    assert_level: Literal["none", "norm", "full"] = "norm"
    log_level: str = "INFO"
    initial_radius: float = Field(default=3.0, gt=0)

    @field_validator("eta_window")
    @classmethod
    def validate_eta_window(cls, value: int) -> int:
        if value % 2 == 0:
            raise ValueError("eta_window must be odd")
        return value

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, value: str) -> str:
        allowed = {"CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG"}
        upper = value.upper()
        if upper not in allowed:
            raise ValueError(f"log_level must be one of {sorted(allowed)}")
        return upper

    @field_validator("beta")
    @classmethod
    def validate_beta(cls, value: float | str) -> float | str:
        if isinstance(value, str):
            try:
                return float(value)
            except ValueError:
                if _BETA_TOKEN.match(value) is None:
                    raise ValueError("beta must be a number or a '<ratio>*alpha' token") from None
                return value.replace(" ", "")
        return value

    @model_validator(mode="after")
    def validate_resolved_beta(self) -> "RunConfig":
        beta = self.resolved_beta()
        if not 0.0 <= beta <= 1.0:
            raise ValueError(f"beta resolves to {beta}, outside [0, 1]")
        if self.alpha == 0.0 and beta == 1.0:
            raise ValueError("alpha = 0 with beta = 1 refines the grid without bound")
        return self

    def resolved_beta(self) -> float:
        """beta as a number; '<ratio>*alpha' becomes ratio * alpha."""
        if isinstance(self.beta, str):
            match = _BETA_TOKEN.match(self.beta)
            if match is None:
                raise ConfigurationError(f"Unresolvable beta '{self.beta}'", config_key="beta")
            return float(match.group(1)) * self.alpha
        return float(self.beta)

    @classmethod
    def scalar_fields(cls) -> list[str]:
        """Top-level fields that accept environment overrides."""
        return [
            "alpha",
            "beta",
            "steps",
            "ball_radius",
            "eta_window",
            "snapshot_every",
            "out_dir",
            "max_moments",
            "assert_level",
            "log_level",
            "initial_radius",
        ]
